"""Shared numeric foundations for the delay-Doppler sensing chain.

Grid geometry, complex signal containers for the three signal domains
(delay-Doppler, time-frequency, time), unitary DFT helpers, QPSK symbol
mapping, signed Doppler index arithmetic, and counter-based RNG streams
for reproducible parallel Monte Carlo runs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

C_LIGHT = 299792458.0  # free-space speed of light, m/s


@dataclass(frozen=True)
class FrameConfig:
    """Geometry and RF parameters of one sensing frame.

    M delay bins (subcarriers) by N Doppler bins (time slots), subcarrier
    spacing ``delta_f`` in Hz and carrier ``f_c`` in Hz. The symbol
    duration T is always the exact reciprocal of ``delta_f`` and is never
    stored separately.
    """

    M: int
    N: int
    delta_f: float = 39e3
    f_c: float = 24e9
    modulation: str = "qpsk"

    def __post_init__(self):
        if self.M < 2 or self.N < 2:
            raise ValueError(f"grid must be at least 2x2, got M={self.M}, N={self.N}")
        if self.delta_f <= 0:
            raise ValueError("subcarrier spacing must be positive")
        if self.f_c <= 0:
            raise ValueError("carrier frequency must be positive")
        if self.modulation != "qpsk":
            raise ValueError(f"unsupported modulation {self.modulation!r}")

    @property
    def T(self) -> float:
        """Symbol duration in seconds; T * delta_f == 1 exactly."""
        return 1.0 / self.delta_f

    @property
    def grid_size(self) -> int:
        return self.M * self.N

    @property
    def bandwidth(self) -> float:
        return self.M * self.delta_f

    @property
    def frame_duration(self) -> float:
        return self.N * self.T

    @property
    def range_bin_m(self) -> float:
        """Range spanned by one delay bin: c / (2 M delta_f)."""
        return C_LIGHT / (2.0 * self.M * self.delta_f)

    @property
    def velocity_bin_mps(self) -> float:
        """Velocity spanned by one Doppler bin: c / (2 f_c N T)."""
        return C_LIGHT / (2.0 * self.f_c * self.N * self.T)

    @property
    def max_unambiguous_velocity_mps(self) -> float:
        """Largest speed whose Doppler index stays below N/2."""
        return (self.N / 2.0) * self.velocity_bin_mps


def _frozen_complex(values, ndim):
    arr = np.array(values, dtype=complex)
    if arr.ndim != ndim or arr.size == 0:
        raise ValueError(f"expected non-empty {ndim}-D complex array, got shape {arr.shape}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class DDGrid:
    """Delay-Doppler symbol grid: N rows (Doppler index k) x M columns (delay index l)."""

    entries: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "entries", _frozen_complex(self.entries, 2))

    @property
    def n_doppler(self) -> int:
        return self.entries.shape[0]

    @property
    def n_delay(self) -> int:
        return self.entries.shape[1]

    def at(self, k: int, l: int) -> complex:
        """Entry at Doppler k and delay l, both wrapped circularly."""
        return self.entries[k % self.n_doppler, l % self.n_delay]

    @property
    def energy(self) -> float:
        return float(np.sum(np.abs(self.entries) ** 2))

    def check_frame(self, cfg: FrameConfig):
        if self.entries.shape != (cfg.N, cfg.M):
            raise ValueError(
                f"grid shape {self.entries.shape} does not match frame (N={cfg.N}, M={cfg.M})"
            )


@dataclass(frozen=True)
class TFGrid:
    """Time-frequency grid: N rows (time slot n) x M columns (subcarrier m)."""

    entries: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "entries", _frozen_complex(self.entries, 2))

    @property
    def n_slots(self) -> int:
        return self.entries.shape[0]

    @property
    def n_subcarriers(self) -> int:
        return self.entries.shape[1]

    @property
    def energy(self) -> float:
        return float(np.sum(np.abs(self.entries) ** 2))

    def check_frame(self, cfg: FrameConfig):
        if self.entries.shape != (cfg.N, cfg.M):
            raise ValueError(
                f"grid shape {self.entries.shape} does not match frame (N={cfg.N}, M={cfg.M})"
            )


@dataclass(frozen=True)
class TimeSeries:
    """Baseband sample vector at rate M * delta_f."""

    samples: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "samples", _frozen_complex(self.samples, 1))

    def __len__(self) -> int:
        return self.samples.shape[0]

    @property
    def energy(self) -> float:
        return float(np.sum(np.abs(self.samples) ** 2))


def dft(v, inverse: bool = False) -> np.ndarray:
    """Unitary DFT of a vector: both directions scaled by 1/sqrt(L)."""
    arr = np.asarray(v, dtype=complex)
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError("dft expects a non-empty 1-D vector")
    return np.fft.ifft(arr, norm="ortho") if inverse else np.fft.fft(arr, norm="ortho")


# Gray-coded QPSK: bit pair (b0, b1) -> ((1-2*b1) + 1j*(1-2*b0)) / sqrt(2),
# i.e. 00 -> (1+1j)/sqrt2, 01 -> (-1+1j)/sqrt2, 11 -> (-1-1j)/sqrt2, 10 -> (1-1j)/sqrt2.
def qpsk_map(bits) -> np.ndarray:
    """Map a flat bit vector (even length) onto unit-power Gray QPSK symbols."""
    b = np.asarray(bits).ravel()
    if b.size % 2 != 0:
        raise ValueError(f"bit count must be even, got {b.size}")
    if b.size == 0:
        raise ValueError("empty bit vector")
    if not np.isin(b, (0, 1)).all():
        raise ValueError("bits must be 0 or 1")
    pairs = b.reshape(-1, 2)
    return ((1 - 2 * pairs[:, 1]) + 1j * (1 - 2 * pairs[:, 0])) / np.sqrt(2.0)


def random_qpsk_symbols(cfg: FrameConfig, rng: np.random.Generator) -> np.ndarray:
    """Draw one frame worth of random QPSK symbols, shape (N, M)."""
    bits = rng.integers(0, 2, size=2 * cfg.grid_size)
    return qpsk_map(bits).reshape(cfg.N, cfg.M)


def random_qpsk_grid(cfg: FrameConfig, rng: np.random.Generator) -> DDGrid:
    return DDGrid(random_qpsk_symbols(cfg, rng))


def signed_doppler(k_row: int, N: int) -> int:
    """Map a row index in [0, N) to the signed Doppler index in [ceil(-N/2), ceil(N/2))."""
    half = -(-N // 2)  # ceil(N/2)
    return (int(k_row) + N - half) % N - (N - half)


def doppler_row(k: int, N: int) -> int:
    """Inverse of signed_doppler: signed index back to a row in [0, N)."""
    return int(k) % N


def signed_axis(N: int) -> np.ndarray:
    """Signed Doppler value of every row, in row order (0, 1, ..., -1)."""
    return np.array([signed_doppler(r, N) for r in range(N)], dtype=int)


@dataclass(frozen=True)
class RngStream:
    """Counter-based random stream keyed by (seed, stream_id).

    Identical (seed, stream_id) pairs produce identical draws regardless of
    process, thread, or evaluation order, which is what makes parallel
    Monte Carlo trials reproducible.
    """

    seed: int
    stream_id: int = 0

    def generator(self) -> np.random.Generator:
        key = (int(self.seed) % (1 << 64)) | ((int(self.stream_id) % (1 << 64)) << 64)
        return np.random.Generator(np.random.Philox(key=key))
