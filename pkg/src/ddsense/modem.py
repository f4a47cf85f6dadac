"""Modulation and demodulation with rectangular pulse shaping.

The delay-Doppler grid is carried to the time domain through the
time-frequency plane (ISFFT followed by a block inverse DFT per time slot)
and recovered either the same way in reverse or in one step with the
discrete Zak transform. All transforms are unitary, so every path
preserves energy, and the one-step and two-step receive paths agree
exactly; the one-step path is also the classical range-Doppler matrix
computation (per-delay-column DFT across the slow-time axis).
"""

from __future__ import annotations

import numpy as np

from .core import DDGrid, FrameConfig, TFGrid, TimeSeries


def isfft(x_dd: DDGrid) -> TFGrid:
    """Inverse symplectic finite Fourier transform, DD -> TF.

    X_TF[n, m] = 1/sqrt(NM) * sum_{k,l} X_DD[k, l] exp(j2pi(nk/N - ml/M))
    """
    x = x_dd.entries
    n_dop, n_del = x.shape
    return TFGrid(np.fft.fft(np.fft.ifft(x, axis=0), axis=1) * np.sqrt(n_dop / n_del))


def sfft(y_tf: TFGrid) -> DDGrid:
    """Symplectic finite Fourier transform, TF -> DD; exact inverse of isfft."""
    y = y_tf.entries
    n_slot, n_sub = y.shape
    return DDGrid(np.fft.ifft(np.fft.fft(y, axis=0), axis=1) * np.sqrt(n_sub / n_slot))


def heisenberg_rect(x_tf: TFGrid) -> TimeSeries:
    """TF grid to waveform with a rectangular transmit pulse.

    Critically sampled at rate M*delta_f: each time-slot row becomes one
    block of M samples via a 1/sqrt(M)-scaled inverse DFT, blocks
    concatenated with no cyclic prefix.
    """
    x = x_tf.entries
    blocks = np.fft.ifft(x, axis=1) * np.sqrt(x.shape[1])
    return TimeSeries(blocks.reshape(-1))


def wigner_rect(r: TimeSeries, cfg: FrameConfig) -> TFGrid:
    """Waveform to TF grid with a rectangular receive filter (inverse of heisenberg_rect)."""
    _check_length(r, cfg)
    blocks = r.samples.reshape(cfg.N, cfg.M)
    return TFGrid(np.fft.fft(blocks, axis=1) / np.sqrt(cfg.M))


def dzt_demod(y_td: TimeSeries, cfg: FrameConfig) -> DDGrid:
    """One-step demodulation via the discrete Zak transform.

    Y_DD[k, l] = 1/sqrt(N) * sum_n y[l + nM] exp(-j2pi nk/N)
    """
    _check_length(y_td, cfg)
    blocks = y_td.samples.reshape(cfg.N, cfg.M)
    return DDGrid(np.fft.fft(blocks, axis=0) / np.sqrt(cfg.N))


def fasttime_slowtime(y_td: TimeSeries, cfg: FrameConfig) -> np.ndarray:
    """Rearrange samples into the M x N fast-time/slow-time matrix, entry (m, n) = y[m + nM]."""
    _check_length(y_td, cfg)
    return y_td.samples.reshape(cfg.N, cfg.M).T.copy()


def modulate(x_dd: DDGrid) -> TimeSeries:
    """Full transmit chain: ISFFT then rectangular-pulse block modulation."""
    return heisenberg_rect(isfft(x_dd))


def demodulate(r: TimeSeries, cfg: FrameConfig) -> DDGrid:
    """Full receive chain; uses the Zak transform shortcut."""
    return dzt_demod(r, cfg)


def _check_length(r: TimeSeries, cfg: FrameConfig):
    if len(r) != cfg.grid_size:
        raise ValueError(f"time series length {len(r)} != M*N = {cfg.grid_size}")
