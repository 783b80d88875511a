"""
Refractive-index profiles n(x) and the anisotropy field gamma(x) = sqrt(n^2 - 1).

Every profile is an immutable dataclass. Radial profiles (cylindrical or
spherical symmetry) expose their radial function through `radial_f`, which is
what the closed-form solvers consume.
"""

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np

from engines import finite_diff
from engines.errors import ConfigError, DomainError, UnsupportedProfileError

CYLINDRICAL = "cylindrical"
SPHERICAL = "spherical"
SYMMETRIES = (CYLINDRICAL, SPHERICAL)


class RefractiveProfile(ABC):
    """Common interface of all media."""

    kind: str = "abstract"
    symmetry: Optional[str] = None

    @abstractmethod
    def gamma(self, x: np.ndarray) -> float:
        ...

    @abstractmethod
    def gamma_gradient(self, x: np.ndarray) -> np.ndarray:
        ...

    @abstractmethod
    def refractive_index(self, x: np.ndarray) -> float:
        ...

    @abstractmethod
    def to_dict(self) -> dict:
        ...


@dataclass(frozen=True)
class Uniform(RefractiveProfile):
    n0: float = 1.0

    kind = "uniform"

    def __post_init__(self):
        if not math.isfinite(self.n0) or self.n0 < 1.0:
            raise ConfigError(f"uniform profile needs n0 >= 1, got {self.n0}")

    def gamma(self, x):
        # (n0-1)(n0+1) keeps precision when n0 is close to 1
        return math.sqrt((self.n0 - 1.0) * (self.n0 + 1.0))

    def gamma_gradient(self, x):
        return np.zeros(3)

    def refractive_index(self, x):
        return float(self.n0)

    def to_dict(self):
        return {"kind": self.kind, "n0": self.n0}


class RadialProfile(RefractiveProfile):
    """A profile with gamma = f(s), s the cylindrical or spherical radius."""

    def symmetry_radius(self, x: np.ndarray) -> float:
        if self.symmetry == CYLINDRICAL:
            return float(math.hypot(x[0], x[1]))
        return float(np.linalg.norm(x))

    def radial_unit(self, x: np.ndarray, s: float) -> np.ndarray:
        if self.symmetry == CYLINDRICAL:
            return np.array([x[0] / s, x[1] / s, 0.0])
        return np.asarray(x, dtype=float) / s

    @abstractmethod
    def f(self, s: float) -> Tuple[float, float]:
        """Return (f(s), f'(s))."""

    def gamma(self, x):
        s = self.symmetry_radius(x)
        value, _ = self.f(s)
        if value < 0.0:
            raise DomainError(f"{self.kind}: radial function is negative at s={s:.6g}")
        return value

    def gamma_gradient(self, x):
        s = self.symmetry_radius(x)
        _, slope = self.f(s)
        if s == 0.0:
            if slope == 0.0:
                return np.zeros(3)
            raise DomainError(f"{self.kind}: gradient undefined on the symmetry {self._centre_name()}")
        gradient = slope * self.radial_unit(x, s)
        if self.symmetry == CYLINDRICAL:
            gradient[2] = 0.0
        return gradient

    def refractive_index(self, x):
        return math.sqrt(1.0 + self.gamma(x) ** 2)

    def _centre_name(self) -> str:
        return "axis" if self.symmetry == CYLINDRICAL else "centre"


def _check_symmetry(symmetry: str):
    if symmetry not in SYMMETRIES:
        raise ConfigError(f"symmetry must be one of {SYMMETRIES}, got {symmetry!r}")


def _check_positive(name: str, value: float):
    if not math.isfinite(value) or value <= 0.0:
        raise ConfigError(f"{name} must be a positive number, got {value}")


@dataclass(frozen=True)
class GaussianMirage(RadialProfile):
    """n = 1 + epsilon * exp(-s^2 / width^2)."""

    epsilon: float
    width: float
    symmetry: str = SPHERICAL

    kind = "gaussian-mirage"

    def __post_init__(self):
        _check_positive("epsilon", self.epsilon)
        _check_positive("width", self.width)
        _check_symmetry(self.symmetry)

    def _bump(self, s: float) -> float:
        return self.epsilon * math.exp(-(s * s) / (self.width * self.width))

    def f(self, s):
        eb = self._bump(s)
        value = math.sqrt(eb * (2.0 + eb))
        slope = -(2.0 * s / self.width ** 2) * (1.0 + eb) * math.sqrt(eb / (2.0 + eb))
        return value, slope

    def refractive_index(self, x):
        return 1.0 + self._bump(self.symmetry_radius(x))

    def to_dict(self):
        return {"kind": self.kind, "symmetry": self.symmetry,
                "epsilon": self.epsilon, "width": self.width}


@dataclass(frozen=True)
class GaussianRing(RadialProfile):
    """f(s) = base + amplitude * exp(-(s - center)^2 / width^2)."""

    base: float
    amplitude: float
    center: float
    width: float
    symmetry: str = CYLINDRICAL

    kind = "gaussian-ring"

    def __post_init__(self):
        _check_positive("base", self.base)
        _check_positive("center", self.center)
        _check_positive("width", self.width)
        _check_symmetry(self.symmetry)
        if not math.isfinite(self.amplitude) or self.base + self.amplitude <= 0.0:
            raise ConfigError("gaussian-ring needs base + amplitude > 0")

    def f(self, s):
        d = s - self.center
        bump = self.amplitude * math.exp(-(d * d) / (self.width * self.width))
        return self.base + bump, -2.0 * d / self.width ** 2 * bump

    def to_dict(self):
        return {"kind": self.kind, "symmetry": self.symmetry, "base": self.base,
                "amplitude": self.amplitude, "center": self.center, "width": self.width}


@dataclass(frozen=True)
class UserRadial(RadialProfile):
    """
    A radial profile built from a user function.

    `f_prime` is optional; without it the derivative falls back to central
    differences and downstream tolerances degrade accordingly. The profile is
    undefined at s = 0 unless `limit_at_zero` is given.
    """

    func: Callable[[float], float]
    f_prime: Optional[Callable[[float], float]] = None
    limit_at_zero: Optional[float] = None
    symmetry: str = CYLINDRICAL

    kind = "user-radial"

    def __post_init__(self):
        _check_symmetry(self.symmetry)

    def f(self, s):
        if s <= 0.0:
            if self.limit_at_zero is None:
                raise DomainError(f"user radial function undefined at s={s}")
            return float(self.limit_at_zero), 0.0
        value = float(self.func(s))
        if self.f_prime is not None:
            return value, float(self.f_prime(s))
        return value, finite_diff.derivative(self.func, s, h=min(finite_diff.fd_step(np.array([s])), 0.5 * s))

    def to_dict(self):
        return {"kind": f"{self.symmetry}-radial", "symmetry": self.symmetry}


def CylindricalRadial(f, f_prime=None, limit_at_zero=None) -> UserRadial:
    """gamma = f(rho), rho^2 = x1^2 + x2^2."""
    return UserRadial(f, f_prime, limit_at_zero, CYLINDRICAL)


def SphericalRadial(f, f_prime=None, limit_at_zero=None) -> UserRadial:
    """gamma = f(r), r = |x|."""
    return UserRadial(f, f_prime, limit_at_zero, SPHERICAL)


def _as_point(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (3,) or not np.all(np.isfinite(x)):
        raise DomainError(f"expected a finite 3-vector, got {x!r}")
    return x


def gamma(profile: RefractiveProfile, x) -> float:
    return profile.gamma(_as_point(x))


def gamma_gradient(profile: RefractiveProfile, x) -> np.ndarray:
    """Exact spatial gradient of gamma."""
    return profile.gamma_gradient(_as_point(x))


def gamma_gradient_fd(profile: RefractiveProfile, x, h: Optional[float] = None) -> np.ndarray:
    """Central-difference gradient of `gamma`, one Richardson level."""
    return finite_diff.gradient(lambda p: profile.gamma(p), _as_point(x), h)


def refractive_index(profile: RefractiveProfile, x) -> float:
    return profile.refractive_index(_as_point(x))


def radial_f(profile: RefractiveProfile, s: float) -> Tuple[float, float]:
    """(f(s), f'(s)) of a radial profile."""
    if not isinstance(profile, RadialProfile):
        raise UnsupportedProfileError(f"{profile.kind} profile has no radial function")
    return profile.f(float(s))


def require_radial(profile: RefractiveProfile) -> RadialProfile:
    if not isinstance(profile, RadialProfile):
        raise UnsupportedProfileError(f"operation needs a radial profile, got {profile.kind}")
    return profile


def require_symmetry(profile: RefractiveProfile, symmetry: str) -> RadialProfile:
    if not isinstance(profile, RadialProfile) or profile.symmetry != symmetry:
        raise UnsupportedProfileError(f"operation needs a {symmetry} profile, got {profile.kind}")
    return profile


_BUILDERS = {
    "uniform": (Uniform, {"n0"}),
    "gaussian-mirage": (GaussianMirage, {"epsilon", "width", "symmetry"}),
    "gaussian-ring": (GaussianRing, {"base", "amplitude", "center", "width", "symmetry"}),
}


def profile_from_dict(description: dict) -> RefractiveProfile:
    """Build a profile from its JSON description."""
    if not isinstance(description, dict) or "kind" not in description:
        raise ConfigError("profile description needs a 'kind'")
    params = dict(description)
    kind = params.pop("kind")
    if kind not in _BUILDERS:
        raise ConfigError(f"unknown profile kind {kind!r}")
    builder, allowed = _BUILDERS[kind]
    unknown = set(params) - allowed
    if unknown:
        raise ConfigError(f"unknown parameters for {kind}: {sorted(unknown)}")
    try:
        return builder(**params)
    except TypeError as e:
        raise ConfigError(f"bad parameters for {kind}: {e}") from e
