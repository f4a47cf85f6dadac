"""Built-in oracle suite, runnable without pytest via the CLI or the HTTP API.

Every check compares a production code path against an independent
brute-force reference from :mod:`ddsense.oracles` or against an exact
closed-form value.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import oracles
from .baseline import ofdm_demodulate, ofdm_modulate
from .channel import ChannelSpec, Target, apply_channel
from .core import (
    DDGrid,
    FrameConfig,
    RngStream,
    TFGrid,
    TimeSeries,
    dft,
    random_qpsk_grid,
    random_qpsk_symbols,
)
from .estimator import correlate2d_fast, correlate2d_reference, pick_peaks, refine_fractional
from .harness import associate
from .modem import demodulate, dzt_demod, heisenberg_rect, isfft, modulate, sfft, wigner_rect


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str


def _rng():
    return RngStream(20240901, 0).generator()


def _complex(rng, *shape):
    return rng.normal(size=shape) + 1j * rng.normal(size=shape)


def check_dft_against_summation() -> CheckResult:
    rng = _rng()
    worst = 0.0
    for L in (3, 8, 17):
        v = _complex(rng, L)
        worst = max(worst, float(np.max(np.abs(dft(v) - oracles.direct_dft(v)))))
        worst = max(
            worst, float(np.max(np.abs(dft(v, inverse=True) - oracles.direct_dft(v, inverse=True))))
        )
    return CheckResult("dft matches O(L^2) summation", worst < 1e-12, f"max abs err {worst:.2e}")


def check_transforms_against_summation() -> CheckResult:
    rng = _rng()
    x = _complex(rng, 3, 5)
    cfg = FrameConfig(M=5, N=3, delta_f=1e3, f_c=1e9)
    e1 = np.max(np.abs(isfft(DDGrid(x)).entries - oracles.direct_isfft(x)))
    e2 = np.max(np.abs(sfft(TFGrid(x)).entries - oracles.direct_sfft(x)))
    r = _complex(rng, 15)
    e3 = np.max(np.abs(dzt_demod(TimeSeries(r), cfg).entries - oracles.direct_dzt(r, 5)))
    e4 = np.max(np.abs(wigner_rect(TimeSeries(r), cfg).entries - oracles.direct_wigner_rect(r, 5)))
    e5 = np.max(
        np.abs(heisenberg_rect(TFGrid(x)).samples - oracles.direct_heisenberg_rect(x))
    )
    worst = float(max(e1, e2, e3, e4, e5))
    return CheckResult(
        "grid transforms match brute-force sums", worst < 1e-12, f"max abs err {worst:.2e}"
    )


def check_roundtrip_and_zak() -> CheckResult:
    cfg = FrameConfig(M=32, N=16)
    rng = _rng()
    x = random_qpsk_grid(cfg, rng)
    rt = float(np.max(np.abs(demodulate(modulate(x), cfg).entries - x.entries)))
    r = TimeSeries(_complex(rng, cfg.grid_size))
    zak = float(np.max(np.abs(dzt_demod(r, cfg).entries - sfft(wigner_rect(r, cfg)).entries)))
    ok = rt < 1e-10 and zak < 1e-10
    return CheckResult("round trip and Zak-path equivalence", ok, f"roundtrip {rt:.2e}, zak {zak:.2e}")


def check_integer_channel_closed_form() -> CheckResult:
    cfg = FrameConfig(M=16, N=16)
    rng = _rng()
    x = random_qpsk_grid(cfg, rng)
    taps = [(0.9 * np.exp(0.4j), 3, 5), (0.7 * np.exp(-1.1j), 9, -6)]
    spec = ChannelSpec(
        targets=tuple(Target(g, float(l), float(k)) for g, l, k in taps), config=cfg
    )
    y = demodulate(apply_channel(modulate(x), spec), cfg)
    ref = oracles.dd_response_integer_taps(x.entries, taps)
    err = float(np.max(np.abs(y.entries - ref)))
    return CheckResult("integer-tap channel matches closed form", err < 1e-9, f"max abs err {err:.2e}")


def check_matched_peak() -> CheckResult:
    cfg = FrameConfig(M=16, N=16)
    rng = _rng()
    x = random_qpsk_grid(cfg, rng)
    h = 0.8 * np.exp(0.3j)
    spec = ChannelSpec(targets=(Target(h, 5.0, -3.0),), config=cfg)
    y = demodulate(apply_channel(modulate(x), spec), cfg)
    v = correlate2d_fast(y, x)
    peak = pick_peaks(v, 1)[0]
    value_ok = abs(peak.magnitude - cfg.grid_size * abs(h)) < 1e-9 * cfg.grid_size * abs(h)
    place_ok = peak.k_int == -3 and peak.l_int == 5
    return CheckResult(
        "matched filter peak equals MN|h| at the target bin",
        value_ok and place_ok,
        f"peak {peak.magnitude:.6f} at ({peak.k_int}, {peak.l_int})",
    )


def check_fast_correlator() -> CheckResult:
    rng = _rng()
    worst = 0.0
    for n, m in ((4, 4), (8, 8), (16, 32)):
        y = DDGrid(_complex(rng, n, m))
        x = DDGrid(_complex(rng, n, m))
        diff = np.max(
            np.abs(correlate2d_fast(y, x).values - correlate2d_reference(y, x).values)
        )
        worst = max(worst, float(diff))
    return CheckResult("fast correlator equals reference", worst < 1e-9, f"max abs err {worst:.2e}")


def check_fractional_refinement() -> CheckResult:
    cfg = FrameConfig(M=32, N=32)
    probe = np.zeros((cfg.N, cfg.M), dtype=complex)
    probe[0, 0] = 1.0
    x = DDGrid(probe)
    worst = 0.0
    for frac in (-0.4, -0.2, 0.3, 0.45):
        spec = ChannelSpec(targets=(Target(1.0, 10.0 + frac, 4.0 + frac),), config=cfg)
        y = demodulate(apply_channel(modulate(x), spec), cfg)
        v = correlate2d_fast(y, x)
        est = refine_fractional(v, pick_peaks(v, 1), cfg)[0]
        worst = max(worst, abs(est.l_tau_hat - (10.0 + frac)), abs(est.k_nu_hat - (4.0 + frac)))
    return CheckResult(
        "fractional refinement on probe frame", worst < 2e-2, f"max index err {worst:.2e}"
    )


def check_ofdm_baseline() -> CheckResult:
    cfg = FrameConfig(M=32, N=8)
    rng = _rng()
    x_tf = TFGrid(random_qpsk_symbols(cfg, rng))
    rt = float(
        np.max(np.abs(ofdm_demodulate(ofdm_modulate(x_tf, 8), cfg, 8).entries - x_tf.entries))
    )
    return CheckResult("ofdm modulate/demodulate round trip", rt < 1e-12, f"max abs err {rt:.2e}")


def check_association() -> CheckResult:
    cfg = FrameConfig(M=32, N=16)
    truth = [(0.0, 0.0), (10.0, 5.0)]
    ests = [(10.1, 4.9), (0.2, 0.1)]
    perm = associate(truth, ests, cfg)
    return CheckResult("association picks crossed pairing", perm == [1, 0], f"perm {perm}")


ALL_CHECKS = (
    check_dft_against_summation,
    check_transforms_against_summation,
    check_roundtrip_and_zak,
    check_integer_channel_closed_form,
    check_matched_peak,
    check_fast_correlator,
    check_fractional_refinement,
    check_ofdm_baseline,
    check_association,
)


def run_selftests() -> list[CheckResult]:
    return [check() for check in ALL_CHECKS]
