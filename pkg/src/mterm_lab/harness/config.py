"""Experiment configuration schema.

A config is a JSON document; unknown fields anywhere are rejected and
validation errors carry the dotted path of the offending field.
"""
from __future__ import annotations

import json
from pathlib import Path
from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from ..greedy import POLICIES, WeaknessSequence

KINDS = ("wrga-rate", "recursion-suite", "sigma-bound", "hull-rate", "entropy-curve", "ball-net", "multiscale",
         "verify-all")


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class SpaceParams(_Strict):
    dim: int = Field(40, ge=1)
    p: float = Field(2.0, gt=1.0)


class SystemParams(_Strict):
    kind: Literal["canonical", "random"] = "random"
    n_atoms: int = Field(80, ge=1)
    # optional label mixed into the substream name, never a raw RNG seed
    seed: Optional[int] = None


class TauSpec(_Strict):
    mode: Literal["constant", "explicit", "decaying"] = "constant"
    value: float = Field(1.0, gt=0.0, le=1.0)
    values: list[float] = Field(default_factory=list)
    exponent: float = Field(0.0, ge=0.0)

    def build(self) -> WeaknessSequence:
        if self.mode == "constant":
            return WeaknessSequence.constant(self.value)
        if self.mode == "explicit":
            return WeaknessSequence.explicit(self.values)
        return WeaknessSequence.decaying(self.exponent)

    @model_validator(mode="after")
    def _explicit_has_values(self):
        if self.mode == "explicit" and not self.values:
            raise ValueError("explicit tau needs a non-empty 'values' list")
        if any(not 0.0 < v <= 1.0 for v in self.values):
            raise ValueError("tau values must lie in (0, 1]")
        return self


class MSchedule(_Strict):
    m_max: int = Field(60, ge=1)
    ms: list[int] = Field(default_factory=lambda: [4, 8, 16, 32, 64])
    fit_range: Optional[tuple[int, int]] = None

    @field_validator("ms")
    @classmethod
    def _positive(cls, v):
        if any(m < 1 for m in v):
            raise ValueError("every m must be >= 1")
        return v


class Samples(_Strict):
    n_runs: int = Field(10, ge=1)
    n_samples: int = Field(200, ge=1)


class Tolerances(_Strict):
    recursion: float = Field(1e-8, gt=0.0)
    slack: float = Field(0.15, ge=0.0)


class NetParams(_Strict):
    d: list[int] = Field(default_factory=lambda: [1, 2, 3, 4])
    k_max: int = Field(16, ge=0, le=24)
    n_check: int = Field(100_000, ge=1)


class MultiscaleParams(_Strict):
    l: int = Field(3, ge=1)
    r: float = Field(1.0, gt=0.0)
    l_r: Optional[int] = None
    ambient_dim: int = Field(12, ge=1)
    subspaces_per_scale: int = Field(4, ge=1)
    n_members: int = Field(200, ge=1)
    guard: int = Field(2**20, ge=1)


class OutputParams(_Strict):
    out_dir: str = "out"
    trace_path: Optional[str] = None


class ExperimentConfig(_Strict):
    kind: Literal[KINDS]
    seed: int = Field(42, ge=0)
    space: SpaceParams = SpaceParams()
    system: SystemParams = SystemParams()
    hull_q: float = Field(1.0, gt=0.0, le=1.0)
    tau: TauSpec = TauSpec()
    policy: Literal[POLICIES] = "exact"
    m: MSchedule = MSchedule()
    samples: Samples = Samples()
    tolerances: Tolerances = Tolerances()
    nets: NetParams = NetParams()
    multiscale: MultiscaleParams = MultiscaleParams()
    output: OutputParams = OutputParams()
    jobs: int = Field(1, ge=1)


class ConfigError(ValueError):
    """Schema or JSON problem; ``str()`` lists one ``path: message`` per line."""


def format_errors(exc: ValidationError) -> str:
    lines = []
    for err in exc.errors():
        path = ".".join(str(p) for p in err["loc"]) or "<root>"
        lines.append(f"{path}: {err['msg']}")
    return "\n".join(lines)


def parse_config(doc) -> ExperimentConfig:
    try:
        return ExperimentConfig.model_validate(doc)
    except ValidationError as exc:
        raise ConfigError(format_errors(exc)) from None


def load_config(path) -> ExperimentConfig:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"<json>: {exc}") from None
    return parse_config(doc)
