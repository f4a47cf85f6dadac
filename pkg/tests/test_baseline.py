"""OFDM periodogram baseline: modulation, quotient periodogram, bin parity."""

import numpy as np
import pytest

from ddsense import (
    ChannelSpec,
    FrameConfig,
    TFGrid,
    Target,
    apply_channel,
    correlate2d_fast,
    demodulate,
    estimate_targets_ofdm,
    heisenberg_rect,
    modulate,
    ofdm_demodulate,
    ofdm_modulate,
    ofdm_periodogram,
    pick_peaks,
)
from ddsense.core import DDGrid, RngStream, random_qpsk_symbols

from conftest import complex_noise


def tf_frame(cfg, seed=0):
    gen = RngStream(seed, 0).generator()
    return TFGrid(random_qpsk_symbols(cfg, gen))


class TestOfdmModulate:
    def test_zero_cp_reduces_to_block_modulator(self, rng):
        x = TFGrid(complex_noise(rng, 4, 16))
        a = ofdm_modulate(x, 0).samples
        b = heisenberg_rect(x).samples
        assert np.max(np.abs(a - b)) < 1e-12

    def test_prefix_copies_block_tail(self, rng):
        x = TFGrid(complex_noise(rng, 3, 8))
        cp = 3
        s = ofdm_modulate(x, cp).samples.reshape(3, 8 + cp)
        assert np.allclose(s[:, :cp], s[:, -cp:], atol=1e-14)

    def test_round_trip(self):
        cfg = FrameConfig(M=16, N=4)
        x = tf_frame(cfg, seed=1)
        back = ofdm_demodulate(ofdm_modulate(x, 4), cfg, 4)
        assert np.max(np.abs(back.entries - x.entries)) < 1e-12

    def test_negative_cp_rejected(self, rng):
        x = TFGrid(complex_noise(rng, 2, 4))
        with pytest.raises(ValueError):
            ofdm_modulate(x, -1)


class TestPeriodogram:
    def test_identity_channel_peak_at_origin(self):
        cfg = FrameConfig(M=16, N=8)
        x = tf_frame(cfg, seed=2)
        p = ofdm_periodogram(x, x)
        assert p.shape == (8, 16)
        assert p[0, 0] == pytest.approx(cfg.grid_size, rel=1e-9)
        assert np.unravel_index(np.argmax(p), p.shape) == (0, 0)

    def test_single_integer_target_peak_at_bin(self):
        cfg = FrameConfig(M=32, N=8)
        cp = 8
        x = tf_frame(cfg, seed=3)
        spec = ChannelSpec(targets=(Target(1.0, 5.0, 0.0),), config=cfg)
        y = ofdm_demodulate(apply_channel(ofdm_modulate(x, cp), spec), cfg, cp)
        p = ofdm_periodogram(y, x)
        assert np.unravel_index(np.argmax(p), p.shape) == (0, 5)

    def test_fractional_target_peaks_at_nearest_bin(self):
        cfg = FrameConfig(M=32, N=8)
        cp = 8
        x = tf_frame(cfg, seed=4)
        spec = ChannelSpec(targets=(Target(1.0, 5.3, 0.0),), config=cfg)
        y = ofdm_demodulate(apply_channel(ofdm_modulate(x, cp), spec), cfg, cp)
        p = ofdm_periodogram(y, x)
        assert np.unravel_index(np.argmax(p), p.shape) == (0, 5)

    def test_zero_symbol_rejected(self, rng):
        x = complex_noise(rng, 4, 4)
        x[1, 1] = 0.0
        with pytest.raises(ValueError, match="zero symbols"):
            ofdm_periodogram(TFGrid(np.ones((4, 4), dtype=complex)), TFGrid(x))

    def test_zero_pad_refines_grid(self):
        cfg = FrameConfig(M=16, N=8)
        cp = 4
        x = tf_frame(cfg, seed=5)
        spec = ChannelSpec(targets=(Target(1.0, 3.5, 0.0),), config=cfg)
        y = ofdm_demodulate(apply_channel(ofdm_modulate(x, cp), spec), cfg, cp)
        p = ofdm_periodogram(y, x, zero_pad=4)
        assert p.shape == (32, 64)
        _, col = np.unravel_index(np.argmax(p), p.shape)
        assert col / 4 == pytest.approx(3.5, abs=0.25)


class TestParityWithDelayDopplerEstimator:
    def test_integer_targets_same_bins(self):
        # noiseless integer targets, zero_pad=1: both estimators recover the
        # true (Doppler, delay) bins; targets kept >=2 bins apart per axis
        cfg = FrameConfig(M=64, N=32)
        cp = cfg.M // 4
        gen = RngStream(77, 0).generator()
        for _ in range(5):
            n_targets = int(gen.integers(1, 5))
            delays = gen.choice(np.arange(0, cp, 2), size=n_targets, replace=False)
            dopplers = gen.choice(np.arange(-12, 12, 2), size=n_targets, replace=False)
            gains = np.exp(2j * np.pi * gen.random(n_targets))
            spec = ChannelSpec(
                targets=tuple(
                    Target(g, float(l), float(k)) for g, l, k in zip(gains, delays, dopplers)
                ),
                config=cfg,
            )
            truth = sorted((int(k), int(l)) for l, k in zip(delays, dopplers))
            x_dd = DDGrid(random_qpsk_symbols(cfg, gen))
            y_dd = demodulate(apply_channel(modulate(x_dd), spec), cfg)
            peaks = pick_peaks(correlate2d_fast(y_dd, x_dd), n_targets)
            otfs_bins = sorted((p.k_int, p.l_int) for p in peaks)
            x_tf = TFGrid(random_qpsk_symbols(cfg, gen))
            y_tf = ofdm_demodulate(apply_channel(ofdm_modulate(x_tf, cp), spec), cfg, cp)
            ests = estimate_targets_ofdm(y_tf, x_tf, n_targets, cfg, cp)
            ofdm_bins = sorted((int(e.k_nu_hat), int(e.l_tau_hat)) for e in ests)
            assert otfs_bins == truth
            assert ofdm_bins == truth
