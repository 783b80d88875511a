"""Typed failures raised by the engines; `Main.py` maps them to exit codes."""

from typing import Optional

import numpy as np


class GeometryError(Exception):
    """Base class for every failure raised by the engines."""


class ConfigError(GeometryError, ValueError):
    """Invalid profile parameters or run configuration."""


class DomainError(GeometryError, ValueError):
    """A point lies outside the domain where the profile is defined."""


class UnsupportedProfileError(GeometryError, TypeError):
    """The operation needs a symmetry the profile does not have."""


class NumericalError(GeometryError):
    """An integration or root-finding run could not complete."""


class StepUnderflowError(NumericalError):
    def __init__(self, message: str, t: float, step: float):
        super().__init__(message)
        self.t = t
        self.step = step


class DomainExitError(NumericalError):
    """The trajectory left the profile domain; `trajectory` holds the valid prefix."""

    def __init__(self, message: str, trajectory=None, last_state: Optional[np.ndarray] = None,
                 last_time: Optional[float] = None):
        super().__init__(message)
        self.trajectory = trajectory
        self.last_state = last_state
        self.last_time = last_time
