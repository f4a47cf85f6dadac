"""Versioned scenario document: schema, YAML loading, runtime conversion.

The on-disk format is YAML (any JSON document is also valid YAML), with a
mandatory ``schema_version`` field and strict validation: unknown keys are
rejected. The same models serve as the request bodies of the HTTP API.
See docs/scenario_schema.md for the field-by-field description.
"""

from __future__ import annotations

from pathlib import Path
from typing import Literal, Optional

import yaml
from pydantic import BaseModel, ConfigDict, Field, model_validator

from . import harness
from .channel import physical_to_indices
from .core import FrameConfig

SCHEMA_VERSION = 1


class FrameModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    m: int = Field(ge=2, description="delay bins / subcarriers")
    n: int = Field(ge=2, description="Doppler bins / time slots")
    delta_f_hz: float = Field(default=39e3, gt=0)
    f_c_hz: float = Field(default=24e9, gt=0)
    modulation: Literal["qpsk"] = "qpsk"

    def to_frame(self) -> FrameConfig:
        return FrameConfig(
            M=self.m, N=self.n, delta_f=self.delta_f_hz, f_c=self.f_c_hz, modulation=self.modulation
        )


class TargetModel(BaseModel):
    """One target, given either physically (range/velocity) or as raw grid indices."""

    model_config = ConfigDict(extra="forbid")

    range_m: Optional[float] = None
    velocity_mps: Optional[float] = None
    l_tau: Optional[float] = None
    k_nu: Optional[float] = None
    gain_mag: float = Field(default=1.0, gt=0)
    gain_phase_rad: Optional[float] = None

    @model_validator(mode="after")
    def _one_parameterization(self):
        physical = self.range_m is not None or self.velocity_mps is not None
        raw = self.l_tau is not None or self.k_nu is not None
        if physical and raw:
            raise ValueError("give either range_m/velocity_mps or l_tau/k_nu, not both")
        if physical and (self.range_m is None or self.velocity_mps is None):
            raise ValueError("physical targets need both range_m and velocity_mps")
        if raw and (self.l_tau is None or self.k_nu is None):
            raise ValueError("index targets need both l_tau and k_nu")
        if not physical and not raw:
            raise ValueError("target needs range_m/velocity_mps or l_tau/k_nu")
        return self

    def to_truth(self, frame: FrameConfig) -> harness.TruthTarget:
        if self.l_tau is not None:
            l_tau, k_nu = float(self.l_tau), float(self.k_nu)
        else:
            l_tau, k_nu = physical_to_indices(self.range_m, self.velocity_mps, frame)
        return harness.TruthTarget(
            l_tau=l_tau, k_nu=k_nu, gain_mag=self.gain_mag, gain_phase_rad=self.gain_phase_rad
        )


class ScenarioModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    schema_version: Literal[1] = SCHEMA_VERSION
    frame: FrameModel
    targets: list[TargetModel] = Field(min_length=1)
    snr_db: list[float] = Field(default_factory=lambda: [0.0])
    trials: int = Field(default=1, ge=1)
    seed: int = 0
    mode: Literal["fractional", "integer", "ofdm"] = "fractional"
    cp_len: Optional[int] = Field(default=None, ge=0)
    zero_pad: int = Field(default=1, ge=1)

    def to_runtime(self) -> harness.ScenarioConfig:
        frame = self.frame.to_frame()
        return harness.ScenarioConfig(
            frame=frame,
            targets=tuple(t.to_truth(frame) for t in self.targets),
            snr_db_list=tuple(self.snr_db),
            trials=self.trials,
            master_seed=self.seed,
            estimator_mode=self.mode,
            cp_len=self.cp_len,
            zero_pad=self.zero_pad,
        )


def parse_scenario(text: str) -> ScenarioModel:
    """Validate a YAML/JSON scenario document; unknown keys are errors."""
    data = yaml.safe_load(text)
    if not isinstance(data, dict):
        raise ValueError("scenario document must be a mapping")
    return ScenarioModel.model_validate(data)


def load_scenario(path: str | Path) -> ScenarioModel:
    return parse_scenario(Path(path).read_text())
