"""HTTP API wrapping the simulation and estimation library.

One scenario document (the same schema the CLI reads from YAML) drives
every endpoint: /simulate runs a single frame and can return matrix
dumps, /sweep runs the Monte Carlo RMSE experiment, /baseline is /sweep
with the estimator forced to the OFDM periodogram, and /selftest runs
the built-in oracle suite.
"""

from __future__ import annotations

from typing import Literal, Optional

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, ConfigDict, Field

from . import __version__, harness, reporting
from .scenario import ScenarioModel
from .selftest import run_selftests

DUMP_KEYS = ("dd", "corr", "fasttime")


class TargetEstimateModel(BaseModel):
    l_tau_hat: float
    k_nu_hat: float
    range_hat_m: float
    velocity_hat_mps: float
    peak_magnitude: float
    refinement_failed: bool


class TruthTargetModel(BaseModel):
    l_tau: float
    k_nu: float
    gain_mag: float


class SimulateRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    scenario: ScenarioModel
    trial: int = Field(default=0, ge=0)
    dump: list[Literal["dd", "corr", "fasttime"]] = Field(default_factory=list)


class SimulateResponse(BaseModel):
    config_hash: str
    snr_db: float
    mode: str
    censored: bool
    detail: str
    truth: list[TruthTargetModel]
    estimates: list[TargetEstimateModel]
    range_errors_m: list[float]
    velocity_errors_mps: list[float]
    estimates_csv: str
    dumps: dict[str, str]


class SweepRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    scenario: ScenarioModel
    parallel: int = Field(default=1, ge=0, description="worker processes; 0 = auto")


class SweepRowModel(BaseModel):
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


class SweepResponse(BaseModel):
    config_hash: str
    rows: list[SweepRowModel]
    csv: str


class CheckResultModel(BaseModel):
    name: str
    passed: bool
    detail: str


class SelftestResponse(BaseModel):
    passed: bool
    checks: list[CheckResultModel]


class HealthResponse(BaseModel):
    status: str
    version: str


app = FastAPI(title="ddsense", version=__version__)


@app.get("/health", response_model=HealthResponse)
def health() -> HealthResponse:
    return HealthResponse(status="ok", version=__version__)


def _runtime(scenario: ScenarioModel) -> harness.ScenarioConfig:
    try:
        return scenario.to_runtime()
    except (ValueError, TypeError) as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from exc


@app.post("/simulate", response_model=SimulateResponse)
def simulate(req: SimulateRequest) -> SimulateResponse:
    runtime = _runtime(req.scenario)
    snr_db = runtime.snr_db_list[0]
    result = harness.run_frame(runtime, snr_db, req.trial, keep_matrices=bool(req.dump))
    meta = {"config_hash": reporting.config_hash(req.scenario), "seed": runtime.master_seed}
    dumps = {}
    for key in req.dump:
        if key == "dd" and result.y_dd is not None:
            dumps[key] = reporting.matrix_to_csv(result.y_dd.entries, "received DD grid", meta)
        elif key == "corr" and result.correlation is not None:
            label = "periodogram" if runtime.estimator_mode == harness.MODE_OFDM else "correlation map"
            dumps[key] = reporting.matrix_to_csv(result.correlation, label, meta)
        elif key == "fasttime" and result.fasttime is not None:
            dumps[key] = reporting.matrix_to_csv(result.fasttime, "fast-time/slow-time matrix", meta)
    return SimulateResponse(
        config_hash=meta["config_hash"],
        snr_db=snr_db,
        mode=runtime.estimator_mode,
        censored=result.censored,
        detail=result.detail,
        truth=[
            TruthTargetModel(l_tau=t.l_tau, k_nu=t.k_nu, gain_mag=t.gain_mag)
            for t in result.truth
        ],
        estimates=[
            TargetEstimateModel(
                l_tau_hat=e.l_tau_hat,
                k_nu_hat=e.k_nu_hat,
                range_hat_m=e.range_hat_m,
                velocity_hat_mps=e.velocity_hat_mps,
                peak_magnitude=e.peak_magnitude,
                refinement_failed=e.refinement_failed,
            )
            for e in result.estimates
        ],
        range_errors_m=list(map(float, result.range_errors_m)),
        velocity_errors_mps=list(map(float, result.velocity_errors_mps)),
        estimates_csv=reporting.estimates_to_csv(result, meta),
        dumps=dumps,
    )


def _sweep(scenario: ScenarioModel, parallel: int) -> SweepResponse:
    import os

    runtime = _runtime(scenario)
    workers = parallel if parallel > 0 else (os.cpu_count() or 1)
    report = harness.rmse_sweep(runtime, parallel=workers)
    meta = {
        "config_hash": reporting.config_hash(scenario),
        "seed": runtime.master_seed,
        "mode": runtime.estimator_mode,
        "snr_definition": "unit symbol energy over per-sample noise variance",
        "censoring": "estimator failures counted in censored_trials; rows >10% censored are flagged",
    }
    return SweepResponse(
        config_hash=meta["config_hash"],
        rows=[SweepRowModel(**vars(row)) for row in report.rows],
        csv=reporting.report_to_csv(report, meta),
    )


@app.post("/sweep", response_model=SweepResponse)
def sweep(req: SweepRequest) -> SweepResponse:
    return _sweep(req.scenario, req.parallel)


@app.post("/baseline", response_model=SweepResponse)
def baseline(req: SweepRequest) -> SweepResponse:
    forced = req.scenario.model_copy(update={"mode": "ofdm"})
    return _sweep(forced, req.parallel)


@app.post("/selftest", response_model=SelftestResponse)
def selftest() -> SelftestResponse:
    checks = run_selftests()
    return SelftestResponse(
        passed=all(c.passed for c in checks),
        checks=[CheckResultModel(name=c.name, passed=c.passed, detail=c.detail) for c in checks],
    )
