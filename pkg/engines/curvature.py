"""
Torsion and curvature d-tensors of the Cartan canonical connection, plus its
metricity residuals.

Derivatives of N, L and C are central differences of their closed forms,
composed with the adapted derivative delta/delta x from `connection`.
Layout: R[i, j, k] = R^i_jk, R4[i, j, k, l] = R^i_jkl, and likewise for the
other tensors.
"""

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from engines import connection, finite_diff, metric
from engines.media import RefractiveProfile
from engines.metric import PhasePoint


@dataclass(frozen=True)
class TorsionSet:
    R: np.ndarray
    P: np.ndarray
    C: np.ndarray


@dataclass(frozen=True)
class CurvatureSet:
    R4: np.ndarray
    P4: np.ndarray
    S4: np.ndarray


def _N_field(profile):
    return lambda q: connection.nonlinear_connection(profile, q).N


def _L_field(profile):
    return lambda q: connection.cartan_closed_form(profile, q).L


def _C_field(profile):
    return lambda q: connection.cartan_closed_form(profile, q).C


def _y_gradient(field, p: PhasePoint, h: Optional[float]) -> np.ndarray:
    return finite_diff.gradient(lambda y: field(p.with_y(y)), p.y, h)


def torsions(profile: RefractiveProfile, p: PhasePoint, h: Optional[float] = None) -> TorsionSet:
    """
    R^i_jk = delta N^i_j/delta x^k - delta N^i_k/delta x^j
    P^i_jk = dN^i_j/dy^k - L^i_kj
    C^i_jk (the vertical Cartan coefficients)
    """
    nlc = connection.nonlinear_connection(profile, p)
    cartan = connection.cartan_closed_form(profile, p, nlc)
    field = _N_field(profile)

    dN = connection.delta_gradient(field, profile, p, N=nlc.N, h=h)
    R = dN - np.swapaxes(dN, 1, 2)
    P = _y_gradient(field, p, h) - np.swapaxes(cartan.L, 1, 2)
    return TorsionSet(R=R, P=P, C=cartan.C)


def h_covariant_C(profile: RefractiveProfile, p: PhasePoint, h: Optional[float] = None) -> np.ndarray:
    """
    C^i_jl|k = delta C^i_jl/delta x^k + C^r_jl L^i_rk - C^i_rl L^r_jk - C^i_jr L^r_lk

    Returns:
        np.ndarray: shape (3, 3, 3, 3) indexed [i, j, l, k]
    """
    nlc = connection.nonlinear_connection(profile, p)
    cartan = connection.cartan_closed_form(profile, p, nlc)
    L, C = cartan.L, cartan.C
    dC = connection.delta_gradient(_C_field(profile), profile, p, N=nlc.N, h=h)
    return (dC
            + np.einsum("rjl,irk->ijlk", C, L)
            - np.einsum("irl,rjk->ijlk", C, L)
            - np.einsum("ijr,rlk->ijlk", C, L))


def curvatures(profile: RefractiveProfile, p: PhasePoint, h: Optional[float] = None) -> CurvatureSet:
    """
    R^i_jkl = delta L^i_jk/delta x^l - delta L^i_jl/delta x^k
              + L^r_jk L^i_rl - L^r_jl L^i_rk + C^i_jr R^r_kl
    P^i_jkl = dL^i_jk/dy^l - C^i_jl|k + C^i_jr P^r_kl
    S^i_jkl = dC^i_jk/dy^l - dC^i_jl/dy^k + C^r_jk C^i_rl - C^r_jl C^i_rk
    """
    nlc = connection.nonlinear_connection(profile, p)
    cartan = connection.cartan_closed_form(profile, p, nlc)
    L, C = cartan.L, cartan.C
    tors = torsions(profile, p, h)

    dL = connection.delta_gradient(_L_field(profile), profile, p, N=nlc.N, h=h)
    R4 = (dL - np.swapaxes(dL, 2, 3)
          + np.einsum("rjk,irl->ijkl", L, L)
          - np.einsum("rjl,irk->ijkl", L, L)
          + np.einsum("ijr,rkl->ijkl", C, tors.R))

    dLy = _y_gradient(_L_field(profile), p, h)
    C_cov = h_covariant_C(profile, p, h)   # [i, j, l, k]
    P4 = (dLy
          - np.einsum("ijlk->ijkl", C_cov)
          + np.einsum("ijr,rkl->ijkl", C, tors.P))

    dCy = _y_gradient(_C_field(profile), p, h)
    S4 = (dCy - np.swapaxes(dCy, 2, 3)
          + np.einsum("rjk,irl->ijkl", C, C)
          - np.einsum("rjl,irk->ijkl", C, C))
    return CurvatureSet(R4=R4, P4=P4, S4=S4)


def metricity_residuals(profile: RefractiveProfile, p: PhasePoint,
                        h: Optional[float] = None) -> Tuple[np.ndarray, np.ndarray]:
    """
    h_res_ijk = delta g_ij/delta x^k - L^r_ik g_rj - L^r_jk g_ir
    v_res_ijk = dg_ij/dy^k - C^r_ik g_rj - C^r_jk g_ir
    """
    nlc = connection.nonlinear_connection(profile, p)
    cartan = connection.cartan_closed_form(profile, p, nlc)
    g = metric.fundamental_tensor(profile, p)

    def g_field(q: PhasePoint) -> np.ndarray:
        return metric.fundamental_tensor(profile, q)

    dg = connection.delta_gradient(g_field, profile, p, N=nlc.N, h=h)
    h_res = dg - np.einsum("rik,rj->ijk", cartan.L, g) - np.einsum("rjk,ir->ijk", cartan.L, g)

    dgy = _y_gradient(g_field, p, h)
    v_res = dgy - np.einsum("rik,rj->ijk", cartan.C, g) - np.einsum("rjk,ir->ijk", cartan.C, g)
    return h_res, v_res
