"""CSV rendering for sweep reports and matrix dumps.

Reports carry their provenance as leading ``#`` comment lines (config
hash, seed, artifact version); complex matrices are dumped with each
entry as a re,im column pair.
"""

from __future__ import annotations

import hashlib
import io
from pathlib import Path

import numpy as np

from . import __version__
from .harness import RmseReport

REPORT_COLUMNS = (
    "snr_db",
    "estimator_mode",
    "P",
    "rmse_range_m",
    "rmse_velocity_mps",
    "trials",
    "censored_trials",
    "flagged",
    "resolution_range_m",
    "resolution_velocity_mps",
)


def config_hash(model) -> str:
    """Stable short hash of a scenario document (pydantic model)."""
    canonical = model.model_dump_json()
    return hashlib.sha256(canonical.encode()).hexdigest()[:16]


def _metadata_lines(meta: dict) -> list[str]:
    lines = [f"# artifact_version={__version__}"]
    for key, value in meta.items():
        lines.append(f"# {key}={value}")
    return lines


def report_to_csv(report: RmseReport, meta: dict | None = None) -> str:
    """Render a sweep report; header columns match the report row fields."""
    out = io.StringIO()
    for line in _metadata_lines(meta or {}):
        out.write(line + "\n")
    out.write(",".join(REPORT_COLUMNS) + "\n")
    for row in report.rows:
        out.write(
            f"{row.snr_db:.6g},{row.estimator_mode},{row.P},"
            f"{row.rmse_range_m:.10g},{row.rmse_velocity_mps:.10g},"
            f"{row.trials},{row.censored_trials},{int(row.flagged)},"
            f"{row.resolution_range_m:.10g},{row.resolution_velocity_mps:.10g}\n"
        )
    return out.getvalue()


def matrix_to_csv(matrix: np.ndarray, label: str, meta: dict | None = None) -> str:
    """Dump a 2-D matrix; complex entries become two adjacent re,im columns."""
    arr = np.asarray(matrix)
    if arr.ndim != 2:
        raise ValueError("matrix dump expects a 2-D array")
    out = io.StringIO()
    for line in _metadata_lines(meta or {}):
        out.write(line + "\n")
    if np.iscomplexobj(arr):
        out.write(f"# {label}: {arr.shape[0]} rows x {arr.shape[1]} cols, complex as re,im pairs\n")
        for row in arr:
            out.write(",".join(f"{v.real:.10g},{v.imag:.10g}" for v in row) + "\n")
    else:
        out.write(f"# {label}: {arr.shape[0]} rows x {arr.shape[1]} cols, real\n")
        for row in arr:
            out.write(",".join(f"{v:.10g}" for v in row) + "\n")
    return out.getvalue()


def estimates_to_csv(frame_result, meta: dict | None = None) -> str:
    """Per-target table for a single simulated frame."""
    out = io.StringIO()
    for line in _metadata_lines(meta or {}):
        out.write(line + "\n")
    out.write(
        "target,l_tau_true,k_nu_true,l_tau_hat,k_nu_hat,"
        "range_error_m,velocity_error_mps,peak_magnitude,refinement_failed\n"
    )
    if frame_result.censored:
        return out.getvalue()
    for i, t in enumerate(frame_result.truth):
        e = frame_result.estimates[frame_result.matched_estimate_idx[i]]
        out.write(
            f"{i},{t.l_tau:.10g},{t.k_nu:.10g},{e.l_tau_hat:.10g},{e.k_nu_hat:.10g},"
            f"{frame_result.range_errors_m[i]:.10g},{frame_result.velocity_errors_mps[i]:.10g},"
            f"{e.peak_magnitude:.10g},{int(e.refinement_failed)}\n"
        )
    return out.getvalue()


def write_text(path: str | Path, text: str):
    Path(path).write_text(text)
