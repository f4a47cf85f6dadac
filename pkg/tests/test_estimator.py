"""Pulse compression, peak picking, and fractional refinement."""

import numpy as np
import pytest

from ddsense import (
    ChannelSpec,
    CorrelationMap,
    DDGrid,
    EstimationError,
    FrameConfig,
    Peak,
    Target,
    apply_channel,
    correlate2d_fast,
    correlate2d_reference,
    demodulate,
    estimate_targets,
    modulate,
    phase_offset,
    pick_peaks,
    refine_fractional,
)
from ddsense.core import signed_doppler

from conftest import complex_noise, probe_frame, qpsk_frame

FIG2_DELAYS = [24.25, 18.07, 11.72, 21.30]
FIG2_DOPPLERS = [2.58, 3.93, 2.04, -3.24]
FIG2_BINS = sorted([(3, 24), (4, 18), (2, 12), (-3, 21)])


def fig2_setup(seed=12):
    from ddsense.core import RngStream, random_qpsk_symbols

    cfg = FrameConfig(M=32, N=32)
    gen = RngStream(seed, 0).generator()
    x = DDGrid(random_qpsk_symbols(cfg, gen))
    phases = gen.uniform(0, 2 * np.pi, size=4)
    spec = ChannelSpec(
        targets=tuple(
            Target(np.exp(1j * p), d, k)
            for p, d, k in zip(phases, FIG2_DELAYS, FIG2_DOPPLERS)
        ),
        config=cfg,
    )
    y = demodulate(apply_channel(modulate(x), spec), cfg)
    return cfg, x, y


def single_target_map(cfg, l_tau, k_nu, frame, gain=1.0):
    spec = ChannelSpec(targets=(Target(gain, l_tau, k_nu),), config=cfg)
    y = demodulate(apply_channel(modulate(frame), spec), cfg)
    return correlate2d_fast(y, frame)


class TestPhaseOffset:
    def test_nonnegative_delay_branch(self):
        assert phase_offset(5, 3, 32) == 1.0

    def test_wrapped_delay_branch(self):
        for k in (-3, 1, 7):
            assert phase_offset(k, -1, 16) == pytest.approx(np.exp(-2j * np.pi * k / 16))

    def test_zero_doppler_lag(self):
        assert phase_offset(0, -4, 16) == pytest.approx(1.0)


class TestReferenceCorrelator:
    def test_identity_channel_peak_is_mn(self):
        cfg = FrameConfig(M=32, N=32)
        x = qpsk_frame(cfg, seed=1)
        v = correlate2d_reference(x, x)
        assert v.values[0, 0] == pytest.approx(cfg.grid_size, rel=1e-12)

    def test_matched_peak_value_and_uniqueness(self):
        cfg = FrameConfig(M=16, N=16)
        h = 0.8 * np.exp(0.3j)
        x = qpsk_frame(cfg, seed=2)
        spec = ChannelSpec(targets=(Target(h, 5.0, -3.0),), config=cfg)
        y = demodulate(apply_channel(modulate(x), spec), cfg)
        v = correlate2d_reference(y, x)
        mag = v.magnitude
        row = -3 % cfg.N
        peak = mag[row, 5]
        assert peak == pytest.approx(cfg.grid_size * abs(h), rel=1e-9)
        others = np.delete(mag.reshape(-1), row * cfg.M + 5)
        assert np.all(others < peak)

    def test_fig2_peaks_at_nearest_integer_bins(self):
        cfg, x, y = fig2_setup()
        v = correlate2d_reference(y, x)
        peaks = pick_peaks(v, 4)
        assert sorted((p.k_int, p.l_int) for p in peaks) == FIG2_BINS

    def test_shape_mismatch_rejected(self, rng):
        a = DDGrid(complex_noise(rng, 4, 4))
        b = DDGrid(complex_noise(rng, 4, 8))
        with pytest.raises(ValueError):
            correlate2d_reference(a, b)


class TestFastCorrelator:
    @pytest.mark.parametrize("shape", [(4, 4), (8, 8), (16, 32)])
    def test_equals_reference_random(self, rng, shape):
        n, m = shape
        y = DDGrid(complex_noise(rng, n, m))
        x = DDGrid(complex_noise(rng, n, m))
        fast = correlate2d_fast(y, x).values
        ref = correlate2d_reference(y, x).values
        assert np.max(np.abs(fast - ref)) < 1e-9

    def test_fig2_same_peaks_as_reference(self):
        cfg, x, y = fig2_setup()
        pf = pick_peaks(correlate2d_fast(y, x), 4)
        pr = pick_peaks(correlate2d_reference(y, x), 4)
        assert [(p.k_int, p.l_int) for p in pf] == [(p.k_int, p.l_int) for p in pr]


class TestPickPeaks:
    def test_single_target_single_dominant_peak(self):
        cfg = FrameConfig(M=16, N=16)
        v = single_target_map(cfg, 5.0, 3.0, qpsk_frame(cfg, seed=3))
        peaks = pick_peaks(v, 1)
        assert (peaks[0].k_int, peaks[0].l_int) == (3, 5)

    def test_constant_matrix_has_no_strict_maxima(self):
        v = CorrelationMap(np.ones((8, 8), dtype=complex))
        with pytest.raises(EstimationError, match="0 local maxima"):
            pick_peaks(v, 1)

    def test_shortfall_reports_count(self):
        vals = np.zeros((8, 8), dtype=complex)
        vals[2, 2] = 1.0
        with pytest.raises(EstimationError, match="found 1 local maxima, need 3"):
            pick_peaks(CorrelationMap(vals), 3)

    def test_ordering_and_signed_rows(self):
        vals = np.zeros((8, 8), dtype=float)
        vals[2, 2] = 10.0
        vals[4, 4] = 3.0
        vals[7, 0] = 2.0
        peaks = pick_peaks(CorrelationMap(vals.astype(complex)), 3)
        assert [(p.k_int, p.l_int) for p in peaks] == [(2, 2), (-4, 4), (-1, 0)]


class TestRefinement:
    def make_map(self, peak_mag, up_mag, down_mag, right_mag, left_mag):
        cfg = FrameConfig(M=16, N=16)
        vals = np.zeros((cfg.N, cfg.M))
        r, c = 4, 7
        vals[r, c] = peak_mag
        vals[r + 1, c] = up_mag
        vals[r - 1, c] = down_mag
        vals[r, c + 1] = right_mag
        vals[r, c - 1] = left_mag
        return CorrelationMap(vals.astype(complex)), Peak(k_int=4, l_int=7, magnitude=peak_mag), cfg

    def test_zero_neighbour_gives_zero_fraction(self):
        v, peak, cfg = self.make_map(8.0, 0.0, 0.0, 0.0, 0.0)
        est = refine_fractional(v, [peak], cfg)[0]
        assert est.k_nu_hat == 4.0 and est.l_tau_hat == 7.0
        assert not est.refinement_failed

    def test_equal_peak_and_neighbour_gives_half(self):
        v, peak, cfg = self.make_map(8.0, 8.0, 1.0, 8.0, 1.0)
        est = refine_fractional(v, [peak], cfg)[0]
        assert est.k_nu_hat == pytest.approx(4.5)
        assert est.l_tau_hat == pytest.approx(7.5)

    def test_physical_fields_consistent(self):
        from ddsense import indices_to_physical

        v, peak, cfg = self.make_map(8.0, 4.0, 1.0, 0.0, 2.0)
        est = refine_fractional(v, [peak], cfg)[0]
        r, vel = indices_to_physical(est.l_tau_hat, est.k_nu_hat, cfg)
        assert est.range_hat_m == pytest.approx(r)
        assert est.velocity_hat_mps == pytest.approx(vel)

    def test_single_target_point_accuracy(self):
        # full random-frame chain at a representative off-grid target
        cfg = FrameConfig(M=32, N=32)
        v = single_target_map(cfg, 10.0 - 0.30, 4.0 + 0.25, qpsk_frame(cfg, seed=2))
        est = refine_fractional(v, pick_peaks(v, 1), cfg)[0]
        assert abs(est.k_nu_hat - 4.25) <= 0.02
        assert abs(est.l_tau_hat - 9.70) <= 0.02

    def test_probe_frame_sweep_tight(self):
        cfg = FrameConfig(M=32, N=32)
        x = probe_frame(cfg)
        for frac in (-0.45, -0.15, 0.25, 0.45):
            v = single_target_map(cfg, 10.0 + frac, 4.0 + frac, x)
            est = refine_fractional(v, pick_peaks(v, 1), cfg)[0]
            assert abs(est.l_tau_hat - (10.0 + frac)) <= 2e-2
            assert abs(est.k_nu_hat - (4.0 + frac)) <= 2e-2


class TestDirichletRatio:
    """Magnitude ratio of the two largest column entries vs the linear prediction."""

    def test_ratio_identity_on_kernel(self):
        cfg = FrameConfig(M=32, N=32)
        x = probe_frame(cfg)
        tol = 10.0 / cfg.grid_size
        for kappa in np.arange(-0.45, 0.46, 0.1):
            v = single_target_map(cfg, 10.0, 4.0 + kappa, x)
            mag = v.magnitude
            peak = pick_peaks(v, 1)[0]
            r = peak.k_int % cfg.N
            second = 1 if mag[(r + 1) % cfg.N, 10] > mag[(r - 1) % cfg.N, 10] else -1
            ratio = mag[r, 10] / mag[(r + second) % cfg.N, 10]
            offset = (4.0 + kappa) - peak.k_int
            predicted = abs(second - offset) / abs(offset)
            assert abs(ratio - predicted) / predicted <= tol

    def test_fraction_estimate_odd_and_monotone(self):
        cfg = FrameConfig(M=32, N=32)
        x = probe_frame(cfg)
        grid = np.arange(-0.45, 0.46, 0.05)
        estimates = []
        for kappa in grid:
            v = single_target_map(cfg, 10.0, 4.0 + kappa, x)
            est = refine_fractional(v, pick_peaks(v, 1), cfg)[0]
            estimates.append(est.k_nu_hat - 4.0)
        estimates = np.array(estimates)
        assert np.max(np.abs(estimates + estimates[::-1])) < 1e-9  # odd in kappa
        assert np.all(np.diff(estimates) > 0)  # monotone increasing


class TestEstimateTargets:
    def test_fig2_full_chain_within_tolerance(self):
        cfg, x, y = fig2_setup()
        ests = estimate_targets(y, x, 4, cfg)
        for e in ests:
            i = int(np.argmin([abs(e.l_tau_hat - d) for d in FIG2_DELAYS]))
            assert abs(e.l_tau_hat - FIG2_DELAYS[i]) <= 0.15
            assert abs(e.k_nu_hat - FIG2_DOPPLERS[i]) <= 0.15

    def test_integer_mode_error_equals_fraction(self):
        cfg = FrameConfig(M=32, N=32)
        x = qpsk_frame(cfg, seed=4)
        spec = ChannelSpec(targets=(Target(1.0, 10.3, 4.0),), config=cfg)
        y = demodulate(apply_channel(modulate(x), spec), cfg)
        est = estimate_targets(y, x, 1, cfg, fractional=False)[0]
        assert est.l_tau_hat == 10.0 and est.k_nu_hat == 4.0

    def test_integer_target_probe_frame_exact(self):
        cfg = FrameConfig(M=32, N=32)
        x = probe_frame(cfg)
        spec = ChannelSpec(targets=(Target(1.0, 10.0, 4.0),), config=cfg)
        y = demodulate(apply_channel(modulate(x), spec), cfg)
        est = estimate_targets(y, x, 1, cfg)[0]
        assert abs(est.l_tau_hat - 10.0) <= 1e-6
        assert abs(est.k_nu_hat - 4.0) <= 1e-6

    def test_estimates_invariant_to_frame_scaling(self):
        cfg = FrameConfig(M=16, N=16)
        x = qpsk_frame(cfg, seed=5)
        spec = ChannelSpec(targets=(Target(0.9, 5.4, -2.3),), config=cfg)
        y = demodulate(apply_channel(modulate(x), spec), cfg)
        scale = 3.0 * np.exp(0.8j)
        xs = DDGrid(scale * x.entries)
        ys = DDGrid(scale * y.entries)
        v = correlate2d_fast(y, x)
        vs = correlate2d_fast(ys, xs)
        assert np.max(np.abs(vs.values - abs(scale) ** 2 * v.values)) < 1e-9 * abs(scale) ** 2
        e1 = estimate_targets(y, x, 1, cfg)[0]
        e2 = estimate_targets(ys, xs, 1, cfg)[0]
        assert e1.l_tau_hat == pytest.approx(e2.l_tau_hat, abs=1e-12)
        assert e1.k_nu_hat == pytest.approx(e2.k_nu_hat, abs=1e-12)
