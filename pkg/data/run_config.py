"""
Run configuration files.

A run configuration is a JSON document validated by the pydantic models
below; unknown keys and non-positive tolerances are rejected before any
computation starts.

    {
      "profile": {"kind": "gaussian-mirage", "symmetry": "cylindrical", "epsilon": 1.0, "width": 2.5},
      "initial": {"x": [4.0, 0.0, 0.0], "v": [0.0, 1.0, 1.0]},
      "integrator": {"t_span": [0.0, 20.0], "rel_tol": 1e-10, "abs_tol": 1e-12},
      "output": {"format": "csv", "path": "run.csv", "every": 0.1}
    }
"""

import json
from typing import Annotated, Literal, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, PositiveFloat, ValidationError, model_validator

from engines import media
from engines.dynamics import IntegratorConfig
from engines.errors import ConfigError
from utils import config

Vector3 = Tuple[float, float, float]
Symmetry = Literal["spherical", "cylindrical"]


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class UniformSpec(_Strict):
    kind: Literal["uniform"]
    n0: float = Field(1.0, ge=1.0)


class MirageSpec(_Strict):
    kind: Literal["gaussian-mirage"]
    epsilon: PositiveFloat
    width: PositiveFloat
    symmetry: Symmetry = "spherical"


class RingSpec(_Strict):
    kind: Literal["gaussian-ring"]
    base: PositiveFloat
    amplitude: float
    center: PositiveFloat
    width: PositiveFloat
    symmetry: Symmetry = "cylindrical"

    @model_validator(mode="after")
    def _positive_peak(self):
        if self.base + self.amplitude <= 0.0:
            raise ValueError("base + amplitude must be positive")
        return self


ProfileSpec = Annotated[Union[UniformSpec, MirageSpec, RingSpec], Field(discriminator="kind")]


class InitialSpec(_Strict):
    x: Vector3
    v: Vector3


class IntegratorSpec(_Strict):
    t_span: Tuple[float, float] = (0.0, 10.0)
    rel_tol: PositiveFloat = config.REL_TOL
    abs_tol: PositiveFloat = config.ABS_TOL
    max_step: PositiveFloat = config.MAX_STEP
    sample_every: PositiveFloat = config.SAMPLE_EVERY
    method: Literal["dopri54", "rk4"] = config.INTEGRATOR_METHOD

    @model_validator(mode="after")
    def _ordered_span(self):
        if self.t_span[1] <= self.t_span[0]:
            raise ValueError("t_span must satisfy t0 < t1")
        return self


class OutputSpec(_Strict):
    format: Literal["csv", "json"] = "csv"
    path: Optional[str] = None
    every: Optional[PositiveFloat] = None


class RunConfig(_Strict):
    profile: ProfileSpec
    initial: Optional[InitialSpec] = None
    integrator: IntegratorSpec = Field(default_factory=IntegratorSpec)
    output: OutputSpec = Field(default_factory=OutputSpec)

    def build_profile(self) -> media.RefractiveProfile:
        return media.profile_from_dict(self.profile.model_dump())

    def integrator_config(self) -> IntegratorConfig:
        spec = self.integrator
        every = self.output.every if self.output.every is not None else spec.sample_every
        return IntegratorConfig(t_span=tuple(spec.t_span), rel_tol=spec.rel_tol, abs_tol=spec.abs_tol,
                                max_step=spec.max_step, sample_every=every, method=spec.method)


def parse_run_config(document: Union[str, dict]) -> RunConfig:
    """Validate a JSON string or an already-decoded dict."""
    try:
        if isinstance(document, str):
            return RunConfig.model_validate_json(document)
        return RunConfig.model_validate(document)
    except ValidationError as e:
        raise ConfigError(f"invalid run configuration: {e}") from e


def load_run_config(path: str) -> RunConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        raise ConfigError(f"cannot read configuration {path}: {e}") from e
    try:
        json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"configuration {path} is not valid JSON: {e}") from e
    return parse_run_config(text)


def dump_run_config(run_config: RunConfig) -> str:
    return run_config.model_dump_json(indent=2)
