"""Validated run configuration for the command-line interface.

A JSON config file supplies any subset of the sections below; command-line
flags override individual values. Unknown keys are errors.
"""

from __future__ import annotations

import json
from pathlib import Path

from pydantic import BaseModel, ConfigDict, Field, field_validator

from fibertaper.errors import ValidationError
from fibertaper.waveguide import ModeId, WaveguideSpec


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", validate_assignment=True)


class SpecConfig(_Strict):
    n_core: float = 1.453
    n_clad: float = 1.0
    wavelength: float = Field(775e-9, gt=0)

    def build(self) -> WaveguideSpec:
        return WaveguideSpec(self.n_core, self.n_clad, self.wavelength)


class ProfileConfig(_Strict):
    r0: float = Field(62.5e-6, gt=0)
    h: float = Field(7e-3, gt=0)
    L: float = Field(0.0, ge=0)


class SimulateConfig(_Strict):
    r0: float = Field(62.5e-6, gt=0)
    h: float = Field(3.05e-3, gt=0)
    L_max: float = Field(36e-3, gt=0)
    dL: float = Field(0.5e-6, gt=0)
    ramp_width: float = Field(0.2e-3, ge=0)
    amplitudes: dict[str, float | tuple[float, float]] = Field(
        default_factory=lambda: {"HE11": 0.875, "HE12": 0.08, "HE21": 0.03, "TE01": 0.015})
    incoherent_loss: float = Field(0.0, ge=0, lt=1)
    noise: float = Field(0.0, ge=0)

    @field_validator("amplitudes")
    @classmethod
    def _modes_parse(cls, value):
        for name in value:
            ModeId.parse(name)
        return value

    def complex_amplitudes(self) -> dict[str, complex]:
        out = {}
        for name, a in self.amplitudes.items():
            out[name] = complex(*a) if isinstance(a, tuple) else complex(a)
        return out


class AnalysisConfig(_Strict):
    window: float = Field(0.25e-3, gt=0)
    ridge_threshold: float = Field(0.05, gt=0, lt=1)
    h_min: float = Field(1e-3, gt=0)
    h_max: float = Field(12e-3, gt=0)
    candidates: list[str] = Field(default_factory=lambda: ["HE12", "HE21", "TE01"])
    envelope_window: float = Field(0.2e-3, gt=0)
    drop: float = Field(0.5, gt=0, lt=1)
    n_components: int = Field(2, ge=1)


class RunConfig(_Strict):
    spec: SpecConfig = Field(default_factory=SpecConfig)
    profile: ProfileConfig = Field(default_factory=ProfileConfig)
    modes: list[str] = Field(default_factory=lambda: ["HE11", "HE12", "HE21", "TE01"])
    simulate: SimulateConfig = Field(default_factory=SimulateConfig)
    analysis: AnalysisConfig = Field(default_factory=AnalysisConfig)
    seed: int | None = None
    output: str | None = None

    @field_validator("modes")
    @classmethod
    def _modes_parse(cls, value):
        for name in value:
            ModeId.parse(name)
        return value


def load_config(path: str | None) -> RunConfig:
    """Read a JSON config file (or return defaults when ``path`` is None)."""
    if path is None:
        return RunConfig()
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ValidationError(f"cannot read config {path}: {exc}") from None
    return RunConfig.model_validate(data)


def apply_overrides(cfg: RunConfig, overrides: dict) -> RunConfig:
    """Return a copy with dotted-key overrides (``{"spec.n_core": 1.45}``) applied.

    ``None`` values are skipped, so unset command-line flags leave the config alone.
    """
    data = cfg.model_dump()
    for key, value in overrides.items():
        if value is None:
            continue
        node = data
        *parents, leaf = key.split(".")
        for p in parents:
            node = node[p]
        node[leaf] = value
    return RunConfig.model_validate(data)
