"""Independent brute-force references for the transform and channel math.

Everything here is written as the literal defining sum, O(L^2) or worse,
with no shared code paths into the production transforms. They exist so
tests and the self-test suite can check the fast implementations against
a second, independently derived route.
"""

from __future__ import annotations

import numpy as np

from .core import FrameConfig


def direct_dft(v: np.ndarray, inverse: bool = False) -> np.ndarray:
    """Unitary DFT by explicit O(L^2) summation."""
    v = np.asarray(v, dtype=complex)
    L = v.shape[0]
    sign = 1j if inverse else -1j
    q = np.arange(L)
    kernel = np.exp(sign * 2 * np.pi * np.outer(q, q) / L)
    return kernel @ v / np.sqrt(L)


def direct_isfft(x_dd: np.ndarray) -> np.ndarray:
    """X_TF[n,m] = 1/sqrt(NM) sum_{k,l} X_DD[k,l] exp(j2pi(nk/N - ml/M)) by four loops."""
    N, M = x_dd.shape
    out = np.zeros((N, M), dtype=complex)
    for n in range(N):
        for m in range(M):
            acc = 0.0 + 0.0j
            for k in range(N):
                for l in range(M):
                    acc += x_dd[k, l] * np.exp(2j * np.pi * (n * k / N - m * l / M))
            out[n, m] = acc / np.sqrt(N * M)
    return out


def direct_sfft(y_tf: np.ndarray) -> np.ndarray:
    """Y_DD[k,l] = 1/sqrt(NM) sum_{n,m} Y_TF[n,m] exp(-j2pi(nk/N - ml/M)) by four loops."""
    N, M = y_tf.shape
    out = np.zeros((N, M), dtype=complex)
    for k in range(N):
        for l in range(M):
            acc = 0.0 + 0.0j
            for n in range(N):
                for m in range(M):
                    acc += y_tf[n, m] * np.exp(-2j * np.pi * (n * k / N - m * l / M))
            out[k, l] = acc / np.sqrt(N * M)
    return out


def direct_heisenberg_rect(x_tf: np.ndarray) -> np.ndarray:
    """Sample the continuous rectangular-pulse modulator at t = q T / M.

    s(t) = sum_{n,m} X_TF[n,m] g_tx(t - nT) exp(j2pi m df (t - nT)) with
    g_tx a unit-energy rectangle of width T (amplitude 1/sqrt(T)); the
    sample at rate M df carries a 1/sqrt(M df) scale so the discrete
    sequence is unit-energy too.
    """
    N, M = x_tf.shape
    out = np.zeros(N * M, dtype=complex)
    for q in range(N * M):
        t_over_T = q / M  # time in units of T
        acc = 0.0 + 0.0j
        for n in range(N):
            u = t_over_T - n
            if 0.0 <= u < 1.0:  # rectangular pulse support
                for m in range(M):
                    acc += x_tf[n, m] * np.exp(2j * np.pi * m * u)
        out[q] = acc / np.sqrt(M)
    return out


def direct_wigner_rect(r: np.ndarray, M: int) -> np.ndarray:
    """Y_TF[n,m] = 1/sqrt(M) sum_{m'} r[nM+m'] exp(-j2pi m m'/M) by three loops."""
    N = r.shape[0] // M
    out = np.zeros((N, M), dtype=complex)
    for n in range(N):
        for m in range(M):
            acc = 0.0 + 0.0j
            for mp in range(M):
                acc += r[n * M + mp] * np.exp(-2j * np.pi * m * mp / M)
            out[n, m] = acc / np.sqrt(M)
    return out


def direct_dzt(r: np.ndarray, M: int) -> np.ndarray:
    """Y_DD[k,l] = 1/sqrt(N) sum_n r[l + nM] exp(-j2pi nk/N) by three loops."""
    N = r.shape[0] // M
    out = np.zeros((N, M), dtype=complex)
    for k in range(N):
        for l in range(M):
            acc = 0.0 + 0.0j
            for n in range(N):
                acc += r[l + n * M] * np.exp(-2j * np.pi * n * k / N)
            out[k, l] = acc / np.sqrt(N)
    return out


def dd_response_integer_taps(x_dd: np.ndarray, taps) -> np.ndarray:
    """Closed-form DD input/output relation for integer-index targets.

    Y[k,l] = sum_i h_i exp(j2pi (l - l_i) k_i / (MN)) alpha(k - k_i, l - l_i)
             * X[[k - k_i]_N, [l - l_i]_M]
    with alpha(k, l) = 1 for l >= 0 and exp(-j2pi k / N) for l < 0. ``taps``
    is a sequence of (gain, l_int, k_int) with integer indices.
    """
    N, M = x_dd.shape
    k = np.arange(N)[:, None]
    l = np.arange(M)[None, :]
    out = np.zeros((N, M), dtype=complex)
    for gain, l_i, k_i in taps:
        l_i, k_i = int(l_i), int(k_i)
        dk = k - k_i
        dl = l - l_i
        alpha = np.where(dl >= 0, 1.0 + 0.0j, np.exp(-2j * np.pi * dk / N))
        phase = np.exp(2j * np.pi * dl * k_i / (M * N))
        out += gain * phase * alpha * x_dd[np.mod(dk, N), np.mod(dl, M)]
    return out


def quantization_rmse_bins() -> float:
    """RMSE of a uniform fractional offset on [-1/2, 1/2], in bins: 1/sqrt(12)."""
    return 1.0 / np.sqrt(12.0)


def uniform_quantization_rmse_m(cfg: FrameConfig) -> float:
    """Range RMSE floor of an integer-only estimator under uniform fractional delays."""
    return cfg.range_bin_m * quantization_rmse_bins()
