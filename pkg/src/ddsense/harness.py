"""Monte Carlo harness: trials, truth association, and RMSE-vs-SNR sweeps.

Target truth stays fixed across trials; symbol data, gain phases, and
noise are redrawn per trial from a counter-based stream keyed by
(master_seed, trial index), so any trial can be recomputed in isolation
and parallel execution is bit-identical to sequential execution.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .baseline import estimate_targets_ofdm, ofdm_demodulate, ofdm_modulate
from .channel import ChannelSpec, NoiseSpec, Target, add_awgn, apply_channel
from .core import (
    DDGrid,
    FrameConfig,
    RngStream,
    TFGrid,
    random_qpsk_symbols,
)
from .estimator import (
    CorrelationMap,
    EstimationError,
    TargetEstimate,
    correlate2d_fast,
    estimate_targets,
    integer_estimates,
    pick_peaks,
    refine_fractional,
)
from .modem import demodulate, fasttime_slowtime, modulate

MODE_FRACTIONAL = "fractional"
MODE_INTEGER = "integer"
MODE_OFDM = "ofdm"
MODES = (MODE_FRACTIONAL, MODE_INTEGER, MODE_OFDM)


@dataclass(frozen=True)
class TruthTarget:
    """Scenario-level target: indices fixed, gain drawn per trial unless pinned."""

    l_tau: float
    k_nu: float
    gain_mag: float = 1.0
    gain_phase_rad: Optional[float] = None  # None -> uniform random phase per trial

    def __post_init__(self):
        if self.gain_mag <= 0:
            raise ValueError("gain magnitude must be > 0")


@dataclass(frozen=True)
class ScenarioConfig:
    """Everything one Monte Carlo experiment needs."""

    frame: FrameConfig
    targets: tuple[TruthTarget, ...]
    snr_db_list: tuple[float, ...] = (0.0,)
    trials: int = 1
    master_seed: int = 0
    estimator_mode: str = MODE_FRACTIONAL
    cp_len: Optional[int] = None  # OFDM only; None -> M // 4
    zero_pad: int = 1

    def __post_init__(self):
        object.__setattr__(self, "targets", tuple(self.targets))
        object.__setattr__(self, "snr_db_list", tuple(self.snr_db_list))
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.estimator_mode not in MODES:
            raise ValueError(f"estimator_mode must be one of {MODES}")
        if not self.targets:
            raise ValueError("scenario needs at least one target")
        if self.zero_pad < 1:
            raise ValueError("zero_pad must be >= 1")
        if self.cp_len is not None and self.cp_len < 0:
            raise ValueError("cp_len must be >= 0")
        # validate index ranges / distinct delay bins once, with unit gains
        ChannelSpec(
            targets=tuple(Target(1.0, t.l_tau, t.k_nu) for t in self.targets),
            config=self.frame,
        )

    @property
    def n_targets(self) -> int:
        return len(self.targets)

    @property
    def effective_cp_len(self) -> int:
        return self.frame.M // 4 if self.cp_len is None else self.cp_len


@dataclass
class TrialResult:
    """Signed per-target errors for one frame, or a censoring record."""

    range_errors_m: np.ndarray
    velocity_errors_mps: np.ndarray
    censored: bool = False
    detail: str = ""


@dataclass
class FrameResult:
    """Detailed single-frame output for inspection and matrix dumps."""

    frame: FrameConfig
    estimates: list[TargetEstimate]
    truth: tuple[TruthTarget, ...]
    matched_estimate_idx: list[int]
    range_errors_m: np.ndarray
    velocity_errors_mps: np.ndarray
    censored: bool
    detail: str
    y_dd: Optional[DDGrid] = None
    correlation: Optional[np.ndarray] = None  # complex V values or real periodogram
    fasttime: Optional[np.ndarray] = None


@dataclass
class RmseRow:
    snr_db: float
    estimator_mode: str
    P: int
    rmse_range_m: float
    rmse_velocity_mps: float
    trials: int
    censored_trials: int
    flagged: bool
    resolution_range_m: float
    resolution_velocity_mps: float


@dataclass
class RmseReport:
    rows: list[RmseRow] = field(default_factory=list)


def circular_difference(delta: np.ndarray, period: int) -> np.ndarray:
    """Wrap index differences into [-period/2, period/2)."""
    return np.mod(np.asarray(delta, dtype=float) + period / 2.0, period) - period / 2.0


def associate(
    truth: Sequence[tuple[float, float]],
    estimates: Sequence[tuple[float, float]],
    cfg: FrameConfig,
) -> list[int]:
    """Minimum-cost bijective matching of (l_tau, k_nu) pairs.

    Cost per pair is (dl/M)^2 + (dk/N)^2 with circular differences, so the
    two axes weigh equally. Exhaustive over permutations; P <= 8 keeps
    that trivial. Returns, for each truth index, the matched estimate index.
    """
    if len(truth) != len(estimates):
        raise ValueError(f"length mismatch: {len(truth)} truths vs {len(estimates)} estimates")
    P = len(truth)
    if P > 8:
        raise ValueError("exhaustive association supports at most 8 targets")
    tl = np.array([t[0] for t in truth])
    tk = np.array([t[1] for t in truth])
    el = np.array([e[0] for e in estimates])
    ek = np.array([e[1] for e in estimates])
    best_cost, best_perm = np.inf, tuple(range(P))
    for perm in itertools.permutations(range(P)):
        idx = list(perm)
        dl = circular_difference(el[idx] - tl, cfg.M) / cfg.M
        dk = circular_difference(ek[idx] - tk, cfg.N) / cfg.N
        cost = float(np.sum(dl**2 + dk**2))
        if cost < best_cost:
            best_cost, best_perm = cost, perm
    return list(best_perm)


def _trial_channel(scenario: ScenarioConfig, rng: np.random.Generator) -> ChannelSpec:
    """Draw per-trial gains (phases are consumed from the stream even when pinned)."""
    targets = []
    for t in scenario.targets:
        phase = rng.uniform(0.0, 2.0 * np.pi)
        if t.gain_phase_rad is not None:
            phase = t.gain_phase_rad
        targets.append(Target(t.gain_mag * np.exp(1j * phase), t.l_tau, t.k_nu))
    return ChannelSpec(targets=tuple(targets), config=scenario.frame)


def _matched_errors(
    scenario: ScenarioConfig, estimates: list[TargetEstimate]
) -> tuple[np.ndarray, np.ndarray, list[int]]:
    cfg = scenario.frame
    truth_idx = [(t.l_tau, t.k_nu) for t in scenario.targets]
    est_idx = [(e.l_tau_hat, e.k_nu_hat) for e in estimates]
    perm = associate(truth_idx, est_idx, cfg)
    dl = circular_difference(
        np.array([est_idx[perm[i]][0] - truth_idx[i][0] for i in range(len(perm))]), cfg.M
    )
    dk = circular_difference(
        np.array([est_idx[perm[i]][1] - truth_idx[i][1] for i in range(len(perm))]), cfg.N
    )
    return dl * cfg.range_bin_m, dk * cfg.velocity_bin_mps, perm


def run_frame(
    scenario: ScenarioConfig,
    snr_db: float,
    trial_idx: int,
    keep_matrices: bool = False,
) -> FrameResult:
    """Simulate and estimate one frame; deterministic in (scenario, snr_db, trial_idx)."""
    cfg = scenario.frame
    rng = RngStream(scenario.master_seed, trial_idx).generator()
    symbols = random_qpsk_symbols(cfg, rng)
    chan = _trial_channel(scenario, rng)
    noise = NoiseSpec.from_snr_db(snr_db) if np.isfinite(snr_db) else NoiseSpec(0.0)
    P = scenario.n_targets

    y_dd = None
    corr = None
    ftst = None
    try:
        if scenario.estimator_mode == MODE_OFDM:
            x_tf = TFGrid(symbols)
            tx = ofdm_modulate(x_tf, scenario.effective_cp_len)
            rx = add_awgn(apply_channel(tx, chan), noise, rng)
            y_tf = ofdm_demodulate(rx, cfg, scenario.effective_cp_len)
            estimates = estimate_targets_ofdm(
                y_tf, x_tf, P, cfg, scenario.effective_cp_len, scenario.zero_pad
            )
            if keep_matrices:
                from .baseline import ofdm_periodogram

                corr = ofdm_periodogram(y_tf, x_tf, scenario.zero_pad)
        else:
            x_dd = DDGrid(symbols)
            tx = modulate(x_dd)
            rx = add_awgn(apply_channel(tx, chan), noise, rng)
            y_dd = demodulate(rx, cfg)
            v = correlate2d_fast(y_dd, x_dd)
            peaks = pick_peaks(v, P)
            if scenario.estimator_mode == MODE_FRACTIONAL:
                estimates = refine_fractional(v, peaks, cfg)
            else:
                estimates = integer_estimates(peaks, cfg)
            if keep_matrices:
                corr = v.values
                ftst = fasttime_slowtime(rx, cfg)
    except EstimationError as exc:
        return FrameResult(
            frame=cfg,
            estimates=[],
            truth=scenario.targets,
            matched_estimate_idx=[],
            range_errors_m=np.array([]),
            velocity_errors_mps=np.array([]),
            censored=True,
            detail=str(exc),
            y_dd=y_dd if keep_matrices else None,
        )

    err_r, err_v, perm = _matched_errors(scenario, estimates)
    return FrameResult(
        frame=cfg,
        estimates=estimates,
        truth=scenario.targets,
        matched_estimate_idx=perm,
        range_errors_m=err_r,
        velocity_errors_mps=err_v,
        censored=False,
        detail="",
        y_dd=y_dd if keep_matrices else None,
        correlation=corr,
        fasttime=ftst,
    )


def run_trial(scenario: ScenarioConfig, snr_db: float, trial_idx: int) -> TrialResult:
    """One Monte Carlo trial; estimator failures are censored, never dropped silently."""
    frame = run_frame(scenario, snr_db, trial_idx)
    return TrialResult(
        range_errors_m=frame.range_errors_m,
        velocity_errors_mps=frame.velocity_errors_mps,
        censored=frame.censored,
        detail=frame.detail,
    )


def _run_trial_star(args) -> TrialResult:
    return run_trial(*args)


def rmse_sweep(scenario: ScenarioConfig, parallel: int = 1) -> RmseReport:
    """RMSE over trials x targets for every SNR; optionally process-parallel.

    Aggregation happens in trial order, so the report is identical for any
    worker count. Rows with more than 10% censored trials are flagged.
    """
    cfg = scenario.frame
    report = RmseReport()
    n_workers = max(1, parallel)
    for snr_db in scenario.snr_db_list:
        jobs = [(scenario, snr_db, t) for t in range(scenario.trials)]
        if n_workers > 1 and scenario.trials > 1:
            with ProcessPoolExecutor(max_workers=n_workers) as pool:
                results = list(
                    pool.map(_run_trial_star, jobs, chunksize=max(1, len(jobs) // (4 * n_workers)))
                )
        else:
            results = [_run_trial_star(j) for j in jobs]
        censored = sum(r.censored for r in results)
        err_r = np.concatenate([r.range_errors_m for r in results if not r.censored] or [np.array([])])
        err_v = np.concatenate(
            [r.velocity_errors_mps for r in results if not r.censored] or [np.array([])]
        )
        rmse_r = float(np.sqrt(np.mean(err_r**2))) if err_r.size else float("nan")
        rmse_v = float(np.sqrt(np.mean(err_v**2))) if err_v.size else float("nan")
        report.rows.append(
            RmseRow(
                snr_db=float(snr_db),
                estimator_mode=scenario.estimator_mode,
                P=scenario.n_targets,
                rmse_range_m=rmse_r,
                rmse_velocity_mps=rmse_v,
                trials=scenario.trials,
                censored_trials=censored,
                flagged=censored > 0.1 * scenario.trials,
                resolution_range_m=cfg.range_bin_m,
                resolution_velocity_mps=cfg.velocity_bin_mps,
            )
        )
    return report
