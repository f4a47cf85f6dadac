"""Periodogram-based OFDM radar baseline.

Data symbols ride directly on the time-frequency grid; each slot gets a
cyclic prefix long enough to swallow the largest delay, so after CP
stripping every target contributes a clean 2D phase ramp to the
element-wise quotient Y_TF / X_TF. A 2D DFT of the quotient (inverse
along the subcarrier axis for delay, forward along the slot axis for
Doppler) then concentrates each target into one bin. The baseline reads
integer bins only; with the CP the slot period grows to (M + cp)/M slots,
so the raw Doppler bin is rescaled by M/(M + cp) before rounding.
"""

from __future__ import annotations

import numpy as np

from .core import FrameConfig, TFGrid, TimeSeries, signed_doppler
from .estimator import EstimationError, TargetEstimate, _strict_local_maxima
from .channel import indices_to_physical


def ofdm_modulate(x_tf: TFGrid, cp_len: int) -> TimeSeries:
    """Per-slot inverse DFT with a cyclic prefix of cp_len samples; length N*(M+cp_len)."""
    if cp_len < 0:
        raise ValueError("cyclic prefix length must be >= 0")
    x = x_tf.entries
    M = x.shape[1]
    blocks = np.fft.ifft(x, axis=1) * np.sqrt(M)
    if cp_len:
        blocks = np.hstack([blocks[:, M - cp_len:], blocks])
    return TimeSeries(blocks.reshape(-1))


def ofdm_demodulate(r: TimeSeries, cfg: FrameConfig, cp_len: int) -> TFGrid:
    """Strip the cyclic prefix of each slot and take the forward block DFT."""
    if cp_len < 0:
        raise ValueError("cyclic prefix length must be >= 0")
    span = cfg.M + cp_len
    if len(r) != cfg.N * span:
        raise ValueError(f"time series length {len(r)} != N*(M+cp) = {cfg.N * span}")
    blocks = r.samples.reshape(cfg.N, span)[:, cp_len:]
    return TFGrid(np.fft.fft(blocks, axis=1) / np.sqrt(cfg.M))


def ofdm_periodogram(y_tf: TFGrid, x_tf: TFGrid, zero_pad: int = 1) -> np.ndarray:
    """Magnitude periodogram of the symbol quotient, shape (zero_pad*N, zero_pad*M).

    Unnormalized transforms, so an identity channel peaks at (0, 0) with
    value M*N. Peak bins map to delay/Doppler indices divided by zero_pad.
    """
    if zero_pad < 1:
        raise ValueError("zero_pad factor must be >= 1")
    _check_pair(y_tf, x_tf)
    X = x_tf.entries
    if np.any(np.abs(X) == 0):
        raise ValueError("transmitted grid contains zero symbols; quotient undefined")
    G = y_tf.entries / X
    N, M = G.shape
    delay_axis = np.fft.ifft(G, n=zero_pad * M, axis=1) * (zero_pad * M)
    return np.abs(np.fft.fft(delay_axis, n=zero_pad * N, axis=0))


def periodogram_peaks(power: np.ndarray, P: int) -> list[tuple[int, int, float]]:
    """Largest P strict circular local maxima of a periodogram as (row, col, value)."""
    if P < 1:
        raise ValueError("P must be >= 1")
    mask = _strict_local_maxima(power)
    rows, cols = np.nonzero(mask)
    if rows.size < P:
        raise EstimationError(f"found {rows.size} local maxima, need {P}")
    order = sorted(
        ((float(power[r, l]), int(r), int(l)) for r, l in zip(rows, cols)),
        key=lambda t: (-t[0], t[1], t[2]),
    )
    out = []
    excluded: set[tuple[int, int]] = set()
    n_rows, n_cols = power.shape
    for value, r, l in order:
        if (r, l) in excluded:
            continue
        out.append((r, l, value))
        for dk in (-1, 0, 1):
            for dl in (-1, 0, 1):
                excluded.add(((r + dk) % n_rows, (l + dl) % n_cols))
        if len(out) == P:
            return out
    raise EstimationError(f"only {len(out)} peaks survive neighbourhood exclusion, need {P}")


def estimate_targets_ofdm(
    y_tf: TFGrid,
    x_tf: TFGrid,
    P: int,
    cfg: FrameConfig,
    cp_len: int,
    zero_pad: int = 1,
) -> list[TargetEstimate]:
    """Integer-bin estimates from the periodogram, Doppler corrected for the CP slot stretch."""
    power = ofdm_periodogram(y_tf, x_tf, zero_pad)
    slot_stretch = (cfg.M + cp_len) / cfg.M
    n_rows = power.shape[0]
    out = []
    for r, l, value in periodogram_peaks(power, P):
        k_raw = signed_doppler(r, n_rows) / zero_pad
        k_hat = float(np.round(k_raw / slot_stretch))
        l_hat = float(np.round(l / zero_pad)) % cfg.M
        rng_m, vel_mps = indices_to_physical(l_hat, k_hat, cfg)
        out.append(
            TargetEstimate(
                l_tau_hat=l_hat,
                k_nu_hat=k_hat,
                range_hat_m=rng_m,
                velocity_hat_mps=vel_mps,
                peak_magnitude=value,
            )
        )
    return out


def _check_pair(y_tf: TFGrid, x_tf: TFGrid):
    if y_tf.entries.shape != x_tf.entries.shape:
        raise ValueError(
            f"grid shapes differ: {y_tf.entries.shape} vs {x_tf.entries.shape}"
        )
