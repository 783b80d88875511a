"""
Semispray, canonical nonlinear connection and Cartan canonical connection.

Index layout used throughout the package:

    N[i, j]    = N^i_j   (upper index is the row)
    L[i, j, k] = L^i_jk
    C[i, j, k] = C^i_jk

The lowered form N_ij := N_i^r delta_rj equals N[j, i].
"""

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from engines import finite_diff, media, metric
from engines.media import RefractiveProfile
from engines.metric import GeometryBundle, PhasePoint

_I3 = np.eye(3)


@dataclass(frozen=True)
class NonlinearConnection:
    """N^i_j together with the contractions used by the Cartan coefficients."""

    N: np.ndarray
    N_low: np.ndarray    # N_ij = N[j, i]
    N_i0: np.ndarray     # N_ir y^r
    N_0j: np.ndarray     # N_rj y^r
    N_00: float          # N_ij y^i y^j
    N_raised: np.ndarray  # delta^{ir} N_rj


@dataclass(frozen=True)
class CartanCoefficients:
    L: np.ndarray
    C: np.ndarray


def _field_terms(profile: RefractiveProfile, p: PhasePoint):
    gamma = media.gamma(profile, p.x)
    grad = media.gamma_gradient(profile, p.x)
    u = float(np.dot(p.y, p.y))
    sigma, tau = metric.sigma_tau_from(gamma, u)
    return gamma, grad, u, sigma, tau, float(np.dot(grad, p.y))


def semispray(profile: RefractiveProfile, p: PhasePoint) -> np.ndarray:
    """
    G^i = (gamma/sigma) |y|^2 y^i D - gamma/(4 sigma) |y|^4 gamma^i
          - 3 gamma^3 / (2 sigma tau) |y|^4 y^i D,   D = gamma_s y^s.
    """
    gamma, grad, u, sigma, tau, D = _field_terms(profile, p)
    y = p.y
    return ((gamma / sigma) * u * D * y
            - (gamma / (4.0 * sigma)) * u * u * grad
            - (3.0 * gamma ** 3 / (2.0 * sigma * tau)) * u * u * D * y)


def lowered_connection(N: np.ndarray, y: np.ndarray) -> NonlinearConnection:
    """Attach the contractions N_ij, N_i0, N_0j, N_00 and delta^{ir} N_rj."""
    N = np.asarray(N, dtype=float)
    y = np.asarray(y, dtype=float)
    N_low = N.T.copy()
    return NonlinearConnection(
        N=N,
        N_low=N_low,
        N_i0=N_low @ y,
        N_0j=y @ N_low,
        N_00=float(y @ N_low @ y),
        N_raised=_I3 @ N_low,
    )


def nonlinear_connection(profile: RefractiveProfile, p: PhasePoint) -> NonlinearConnection:
    """Closed-form canonical nonlinear connection N^i_j = dG^i/dy^j."""
    gamma, grad, u, sigma, tau, D = _field_terms(profile, p)
    y = p.y
    yy = np.outer(y, y)
    y_grad = np.outer(y, grad)   # y^i gamma_j
    grad_y = np.outer(grad, y)   # gamma^i y_j
    g2 = gamma * gamma

    N = (2.0 * gamma / sigma) * yy * D
    N = N + (gamma * u / sigma) * (
        _I3 * D + y_grad - grad_y
        - (2.0 * g2 / sigma) * yy * D
        - (6.0 * g2 / tau) * yy * D
    )
    N = N + (gamma ** 3 * u * u / (2.0 * sigma)) * (
        grad_y / sigma
        - (3.0 / tau) * y_grad
        - (3.0 / tau) * _I3 * D
        + (6.0 * g2 / (sigma * tau * tau)) * (tau + 3.0 * sigma) * yy * D
    )
    return lowered_connection(N, y)


def nonlinear_connection_fd(profile: RefractiveProfile, p: PhasePoint,
                            h: Optional[float] = None) -> np.ndarray:
    """Central-difference dG^i/dy^j."""
    return finite_diff.gradient(lambda y: semispray(profile, p.with_y(y)), p.y, h)


def delta_gradient(field: Callable[[PhasePoint], np.ndarray], profile: RefractiveProfile,
                   p: PhasePoint, N: Optional[np.ndarray] = None,
                   h: Optional[float] = None) -> np.ndarray:
    """
    All adapted derivatives delta field / delta x^k at once.

    Returns:
        np.ndarray: shape field(p).shape + (3,), the last axis is k
    """
    if N is None:
        N = nonlinear_connection(profile, p).N
    dx = finite_diff.gradient(lambda x: np.asarray(field(p.with_x(x)), dtype=float), p.x, h)
    dy = finite_diff.gradient(lambda y: np.asarray(field(p.with_y(y)), dtype=float), p.y, h)
    # delta/delta x^k = d/dx^k - N^r_k d/dy^r
    return dx - np.tensordot(dy, N, axes=([-1], [0]))


def delta_x(field: Callable[[PhasePoint], np.ndarray], profile: RefractiveProfile,
            p: PhasePoint, k: int, N: Optional[np.ndarray] = None,
            h: Optional[float] = None) -> np.ndarray:
    """delta field / delta x^k = d field/dx^k - N^r_k d field/dy^r."""
    if N is None:
        N = nonlinear_connection(profile, p).N
    dx = finite_diff.partial(lambda x: np.asarray(field(p.with_x(x)), dtype=float), p.x, k, h)
    dy = finite_diff.gradient(lambda y: np.asarray(field(p.with_y(y)), dtype=float), p.y, h)
    return dx - np.tensordot(dy, N[:, k], axes=([-1], [0]))


def adapted_covector(profile: RefractiveProfile, p: PhasePoint, dx, dy) -> np.ndarray:
    """delta y^i = dy^i + N^i_r dx^r evaluated on a tangent displacement (dx, dy)."""
    N = nonlinear_connection(profile, p).N
    return np.asarray(dy, dtype=float) + N @ np.asarray(dx, dtype=float)


def _cartan_C(gamma: float, y: np.ndarray, u: float, sigma: float, tau: float) -> np.ndarray:
    g2 = gamma * gamma
    C = (g2 / sigma) * (np.einsum("ij,k->ijk", _I3, y)
                        + np.einsum("ik,j->ijk", _I3, y)
                        + np.einsum("jk,i->ijk", _I3, y))
    C = C - (2.0 * g2 * g2 / (sigma * tau)) * np.einsum(
        "jk,i->ijk", u * _I3 + 2.0 * np.outer(y, y), y)
    return C


def cartan_closed_form(profile: RefractiveProfile, p: PhasePoint,
                       nlc: Optional[NonlinearConnection] = None) -> CartanCoefficients:
    """Adapted components (L^i_jk, C^i_jk) of the Cartan canonical connection, closed form."""
    gamma, grad, u, sigma, tau, D = _field_terms(profile, p)
    y = p.y
    if nlc is None:
        nlc = nonlinear_connection(profile, p)
    N = nlc.N
    N_k0 = nlc.N_i0
    N_0k = nlc.N_0j
    N_sym = nlc.N_low + nlc.N_low.T   # N_jk + N_kj
    N_r0 = _I3 @ nlc.N_i0             # delta^{ir} N_r0
    skew = N - nlc.N_raised           # N^i_k - delta^{ir} N_rk

    def outer3(a, b, c):
        return np.einsum("i,j,k->ijk", a, b, c)

    first = gamma * (np.einsum("ij,k->ijk", _I3, N_k0)
                     + np.einsum("ik,j->ijk", _I3, N_k0)
                     - np.einsum("jk,i->ijk", _I3, N_r0))
    first += u * (np.einsum("jk,i->ijk", _I3, grad)
                  - np.einsum("ij,k->ijk", _I3, grad)
                  - np.einsum("ik,j->ijk", _I3, grad))
    first += gamma * (np.einsum("jk,i->ijk", N_sym, y)
                      + np.einsum("ik,j->ijk", skew, y)
                      + np.einsum("ij,k->ijk", skew, y))
    first += 2.0 * (outer3(grad, y, y) - outer3(y, y, grad) - outer3(y, grad, y))

    yy = np.outer(y, y)
    second = gamma * (np.outer(y, N_k0) + np.outer(N_k0, y) - _I3 * nlc.N_00)
    second += u * (_I3 * D - np.outer(y, grad) - np.outer(grad, y))
    second += 2.0 * (yy * D - u * np.outer(y, grad) - u * np.outer(grad, y))
    second += gamma * (N_sym * u + np.outer(y, N_k0 - N_0k) + np.outer(N_k0 - N_0k, y))

    L = -(gamma / sigma) * first + (2.0 * gamma ** 3 / (sigma * tau)) * np.einsum("i,jk->ijk", y, second)
    return CartanCoefficients(L=L, C=_cartan_C(gamma, y, u, sigma, tau))


def cartan_general(profile: RefractiveProfile, p: PhasePoint, h: Optional[float] = None) -> CartanCoefficients:
    """
    Cartan coefficients from the general formulas

        L^i_jk = g^ir / 2 (delta g_jr/delta x^k + delta g_kr/delta x^j - delta g_jk/delta x^r)
        C^i_jk = g^ir / 2 dg_jr/dy^k

    with every derivative of g taken by finite differences.
    """
    g_inv = metric.inverse_fundamental_tensor(profile, p)
    N = nonlinear_connection(profile, p).N

    def g_field(q: PhasePoint) -> np.ndarray:
        return metric.fundamental_tensor(profile, q)

    dg = delta_gradient(g_field, profile, p, N=N, h=h)   # dg[j, r, k] = delta_k g_jr
    bracket = (np.einsum("jrk->jkr", dg) + np.einsum("krj->jkr", dg) - dg)
    L = 0.5 * np.einsum("ir,jkr->ijk", g_inv, bracket)

    dgy = finite_diff.gradient(lambda y: g_field(p.with_y(y)), p.y, h)   # dgy[j, r, k] = dg_jr/dy^k
    C = 0.5 * np.einsum("ir,jrk->ijk", g_inv, dgy)
    return CartanCoefficients(L=L, C=C)


def geometry_bundle(profile: RefractiveProfile, p: PhasePoint) -> GeometryBundle:
    gamma, grad, u, sigma, tau, _ = _field_terms(profile, p)
    return GeometryBundle(
        point=p,
        gamma=gamma,
        gamma_grad=grad,
        sigma=sigma,
        tau=tau,
        g=metric.fundamental_tensor_from(gamma, p.y),
        g_inv=metric.inverse_fundamental_tensor_from(gamma, p.y),
        G=semispray(profile, p),
        N=nonlinear_connection(profile, p).N,
    )
