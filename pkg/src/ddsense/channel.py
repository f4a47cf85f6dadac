"""Multi-target delay-Doppler channel with fractional indices and AWGN.

Each reflector applies a fractional circular delay (realized exactly as a
phase ramp on the signed DFT bins of the whole frame) followed by a
Doppler phase ramp referenced to the delayed signal, r(t) ~ h *
exp(j2pi nu (t - tau)) * s(t - tau). Delays and Dopplers wrap modulo the
frame, which makes the closed-form DD input-output relation for
integer-index targets exact.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import C_LIGHT, DDGrid, FrameConfig, RngStream, TimeSeries
from .modem import demodulate, modulate


@dataclass(frozen=True)
class Target:
    """One reflector: complex gain, real delay index l_tau, real signed Doppler index k_nu."""

    gain: complex
    l_tau: float
    k_nu: float

    def __post_init__(self):
        if abs(self.gain) == 0.0:
            raise ValueError("target gain must be nonzero")

    @property
    def delay_int(self) -> int:
        return int(np.round(self.l_tau))

    @property
    def delay_frac(self) -> float:
        return float(self.l_tau - self.delay_int)

    @property
    def doppler_int(self) -> int:
        return int(np.round(self.k_nu))

    @property
    def doppler_frac(self) -> float:
        return float(self.k_nu - self.doppler_int)


@dataclass(frozen=True)
class ChannelSpec:
    """A target list bound to a frame configuration.

    Targets sharing one integer delay bin violate the separability
    assumption behind the per-column refinement; they are rejected unless
    ``allow_shared_delay_bins`` is set, in which case a warning is issued.
    """

    targets: tuple[Target, ...]
    config: FrameConfig
    allow_shared_delay_bins: bool = False

    def __post_init__(self):
        object.__setattr__(self, "targets", tuple(self.targets))
        if len(self.targets) < 1:
            raise ValueError("channel needs at least one target")
        cfg = self.config
        for t in self.targets:
            if not 0.0 <= t.l_tau < cfg.M:
                raise ValueError(f"delay index {t.l_tau} outside [0, M={cfg.M})")
            if not -cfg.N / 2.0 <= t.k_nu < cfg.N / 2.0:
                raise ValueError(f"Doppler index {t.k_nu} outside [-N/2, N/2) for N={cfg.N}")
        bins = [t.delay_int % cfg.M for t in self.targets]
        if len(set(bins)) != len(bins):
            msg = "two targets share the same integer delay bin; per-target accuracy is not guaranteed"
            if self.allow_shared_delay_bins:
                warnings.warn(msg, stacklevel=2)
            else:
                raise ValueError(msg + " (set allow_shared_delay_bins=True to force)")

    @property
    def n_targets(self) -> int:
        return len(self.targets)


@dataclass(frozen=True)
class NoiseSpec:
    """Circularly-symmetric complex AWGN with per-sample variance sigma2."""

    sigma2: float

    def __post_init__(self):
        if self.sigma2 < 0:
            raise ValueError("noise variance must be >= 0")

    @classmethod
    def from_snr_db(cls, snr_db: float) -> "NoiseSpec":
        """SNR defined as unit symbol energy over per-sample noise variance."""
        return cls(sigma2=10.0 ** (-snr_db / 10.0))

    @property
    def snr_db(self) -> float:
        if self.sigma2 == 0:
            return np.inf
        return float(10.0 * np.log10(1.0 / self.sigma2))


def physical_to_indices(range_m: float, velocity_mps: float, cfg: FrameConfig) -> tuple[float, float]:
    """Convert round-trip range/velocity to (l_tau, k_nu) grid indices.

    l_tau = (2R/c) * M * delta_f and k_nu = (2 f_c V / c) * N * T.
    """
    if range_m < 0:
        raise ValueError("range must be >= 0")
    l_tau = (2.0 * range_m / C_LIGHT) * cfg.M * cfg.delta_f
    k_nu = (2.0 * cfg.f_c * velocity_mps / C_LIGHT) * cfg.N * cfg.T
    if l_tau >= cfg.M:
        max_range = cfg.M * cfg.range_bin_m
        raise ValueError(
            f"range {range_m} m gives delay index {l_tau:.2f} >= M={cfg.M}; "
            f"unambiguous range limit is {max_range:.1f} m"
        )
    if abs(k_nu) >= cfg.N / 2.0:
        vmax = cfg.max_unambiguous_velocity_mps
        raise ValueError(
            f"velocity {velocity_mps} m/s gives Doppler index {k_nu:.2f} beyond +-N/2={cfg.N // 2}; "
            f"unambiguous limit is {vmax:.1f} m/s ({vmax * 3.6:.0f} km/h)"
        )
    return float(l_tau), float(k_nu)


def indices_to_physical(l_tau: float, k_nu: float, cfg: FrameConfig) -> tuple[float, float]:
    """Inverse of physical_to_indices; pure conversion, no range checks."""
    range_m = C_LIGHT * l_tau / (2.0 * cfg.M * cfg.delta_f)
    velocity_mps = C_LIGHT * k_nu / (2.0 * cfg.f_c * cfg.N * cfg.T)
    return float(range_m), float(velocity_mps)


def fractional_circular_shift(x: np.ndarray, delay: float) -> np.ndarray:
    """Circularly delay a vector by a possibly fractional number of samples.

    Exact for frame-circular signals: multiplies DFT bin f by
    exp(-j2pi f delay / L) using the symmetric signed bin convention.
    """
    L = x.shape[0]
    f = np.fft.fftfreq(L) * L
    return np.fft.ifft(np.fft.fft(x) * np.exp(-2j * np.pi * f * delay / L))


def apply_channel(s: TimeSeries, spec: ChannelSpec) -> TimeSeries:
    """Noiseless multi-target channel, circular over the input's own length.

    The Doppler ramp advances by k_nu / (M*N) cycles per sample regardless
    of the input length, so the same spec drives both the plain M*N-sample
    frame and the cyclic-prefixed frame of the OFDM baseline.
    """
    x = s.samples
    L = x.shape[0]
    q = np.arange(L)
    grid = spec.config.grid_size
    out = np.zeros(L, dtype=complex)
    for t in spec.targets:
        delayed = fractional_circular_shift(x, t.l_tau)
        out += t.gain * np.exp(2j * np.pi * t.k_nu * (q - t.l_tau) / grid) * delayed
    return TimeSeries(out)


def add_awgn(r: TimeSeries, noise: NoiseSpec, rng) -> TimeSeries:
    """Add i.i.d. complex Gaussian noise, variance sigma2 per complex sample."""
    if noise.sigma2 == 0:
        return r
    gen = rng.generator() if isinstance(rng, RngStream) else rng
    L = len(r)
    scale = np.sqrt(noise.sigma2 / 2.0)
    z = scale * (gen.normal(size=L) + 1j * gen.normal(size=L))
    return TimeSeries(r.samples + z)


def effective_dd_channel(spec: ChannelSpec) -> DDGrid:
    """DD-domain impulse response of the whole chain.

    Probes modulate -> channel -> demodulate with a unit impulse at grid
    position (0, 0). Integer-index targets give exactly one nonzero entry
    each; fractional indices spread along the corresponding axis with a
    Dirichlet-kernel profile.
    """
    cfg = spec.config
    probe = np.zeros((cfg.N, cfg.M), dtype=complex)
    probe[0, 0] = 1.0
    return demodulate(apply_channel(modulate(DDGrid(probe)), spec), cfg)


def make_targets(entries: Sequence[tuple[complex, float, float]]) -> tuple[Target, ...]:
    """Build targets from (gain, l_tau, k_nu) triples."""
    return tuple(Target(gain=g, l_tau=lt, k_nu=kn) for g, lt, kn in entries)
