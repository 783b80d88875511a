"""
Lagrangian, fundamental tensor and energy of the anisotropic optical metric

    L(x, y) = 1/2 |y|^2 + gamma(x)^2 / 2 |y|^4

with the auxiliary scalars sigma = 1/2 + gamma^2 |y|^2 and
tau = 1/2 + 3 gamma^2 |y|^2.
"""

from dataclasses import dataclass, field
from typing import Tuple

import numpy as np

from engines import finite_diff, media
from engines.errors import DomainError
from engines.media import RefractiveProfile


@dataclass(frozen=True)
class PhasePoint:
    """A point (x, y) of the six-dimensional phase space."""

    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float).reshape(-1)
        y = np.asarray(self.y, dtype=float).reshape(-1)
        if x.shape != (3,) or y.shape != (3,):
            raise DomainError("phase point needs two 3-vectors")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
            raise DomainError("phase point has non-finite entries")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @classmethod
    def from_flat(cls, values) -> "PhasePoint":
        values = np.asarray(values, dtype=float)
        if values.shape != (6,):
            raise DomainError(f"expected six numbers x1,x2,x3,y1,y2,y3, got {values.shape}")
        return cls(values[:3], values[3:])

    def with_x(self, x) -> "PhasePoint":
        return PhasePoint(x, self.y)

    def with_y(self, y) -> "PhasePoint":
        return PhasePoint(self.x, y)


@dataclass(frozen=True)
class GeometryBundle:
    """Cached objects at one phase point; built by `connection.geometry_bundle`."""

    point: PhasePoint
    gamma: float
    gamma_grad: np.ndarray
    sigma: float
    tau: float
    g: np.ndarray
    g_inv: np.ndarray
    G: np.ndarray
    N: np.ndarray = field(repr=False)


def _norm2(y: np.ndarray) -> float:
    return float(np.dot(y, y))


def sigma_tau_from(gamma: float, u: float) -> Tuple[float, float]:
    g2u = gamma * gamma * u
    return 0.5 + g2u, 0.5 + 3.0 * g2u


def sigma_tau(profile: RefractiveProfile, p: PhasePoint) -> Tuple[float, float]:
    return sigma_tau_from(media.gamma(profile, p.x), _norm2(p.y))


def lagrangian(profile: RefractiveProfile, p: PhasePoint) -> float:
    u = _norm2(p.y)
    gamma = media.gamma(profile, p.x)
    return 0.5 * u + 0.5 * gamma * gamma * u * u


def fundamental_tensor_from(gamma: float, y: np.ndarray) -> np.ndarray:
    sigma, _ = sigma_tau_from(gamma, _norm2(y))
    return sigma * np.eye(3) + 2.0 * gamma * gamma * np.outer(y, y)


def inverse_fundamental_tensor_from(gamma: float, y: np.ndarray) -> np.ndarray:
    sigma, tau = sigma_tau_from(gamma, _norm2(y))
    return np.eye(3) / sigma - (2.0 * gamma * gamma / (sigma * tau)) * np.outer(y, y)


def fundamental_tensor(profile: RefractiveProfile, p: PhasePoint) -> np.ndarray:
    """g_ij = sigma delta_ij + 2 gamma^2 y_i y_j."""
    return fundamental_tensor_from(media.gamma(profile, p.x), p.y)


def inverse_fundamental_tensor(profile: RefractiveProfile, p: PhasePoint) -> np.ndarray:
    """g^jk = delta^jk / sigma - 2 gamma^2 / (sigma tau) y^j y^k."""
    return inverse_fundamental_tensor_from(media.gamma(profile, p.x), p.y)


def energy_from(gamma: float, y: np.ndarray) -> float:
    u = _norm2(y)
    return 0.5 * u + 1.5 * gamma * gamma * u * u


def energy(profile: RefractiveProfile, p: PhasePoint) -> float:
    """
    Conserved energy y^i dL/dy^i - L = 1/2 |y|^2 + 3/2 gamma^2 |y|^4.

    This is the quantity preserved along solutions of the equations of
    motion. Note that the contraction 1/2 g_ij y^i y^j differs from it
    (1/4 |y|^2 + 3/2 gamma^2 |y|^4) and is not conserved.
    """
    return energy_from(media.gamma(profile, p.x), p.y)


def lagrangian_energy_identity(profile: RefractiveProfile, p: PhasePoint) -> float:
    """Energy as y^i dL/dy^i - L with dL/dy taken by finite differences."""
    momentum = finite_diff.gradient(lambda y: lagrangian(profile, p.with_y(y)), p.y)
    return float(np.dot(momentum, p.y)) - lagrangian(profile, p)


def hessian_oracle(profile: RefractiveProfile, p: PhasePoint) -> np.ndarray:
    """1/2 times the central-difference Hessian of L in y."""
    return 0.5 * finite_diff.hessian(lambda y: lagrangian(profile, p.with_y(y)), p.y)


def signature(profile: RefractiveProfile, p: PhasePoint) -> Tuple[Tuple[float, float, float], Tuple[int, int, int]]:
    """
    Exact spectrum of g and its signature.

    g is a rank-one update of sigma * I, so its eigenvalues are
    (sigma, sigma, tau) with tau = sigma + 2 gamma^2 |y|^2.

    Returns:
        ((sigma, sigma, tau), (negatives, positives, zeros))
    """
    sigma, tau = sigma_tau(profile, p)
    spectrum = (sigma, sigma, tau)
    negatives = sum(1 for value in spectrum if value < 0.0)
    zeros = sum(1 for value in spectrum if value == 0.0)
    return spectrum, (negatives, 3 - negatives - zeros, zeros)
