"""
Closed-form geodesic families of radially symmetric media.

- circular helices on cylinders of radius rho0 (cylindrical symmetry)
- vertical generator lines where f'(rho0) = 0
- horizontal circles centred on the axis, and their spherical counterparts
  (equatorial and vertical great circles) from 1 + 2 f^2 s^2 + f f' s^3 = 0
- latitude circles on spheres where f'(r0) = 0 (kept for completeness; they
  do not solve the full system, see `sphere_circle_families`)
- segments of the z axis in spherical media (integrated numerically)

Every family carries the residual of its defining scalar equation and can
produce an exact parametric trajectory through `make_trajectory`.
"""

import math
import time
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Tuple

import numpy as np
from scipy import optimize

from engines import dynamics, finite_diff, media
from engines.dynamics import IntegratorConfig, Trajectory
from engines.errors import ConfigError
from engines.media import RadialProfile, RefractiveProfile
from utils import config
from utils.logger import log_info, log_solver, log_warning

HORIZONTAL = "horizontal-on-axis"
EQUATORIAL = "origin-centered-equatorial"
VERTICAL = "vertical-plane-through-origin"
LATITUDE = "latitude"

STRAIGHT_LINE = "uniform-straight-line"
GENERATOR = "cylinder-generator"
AXIS_SEGMENT = "z-axis-segment"


@dataclass(frozen=True)
class HelixFamily:
    """x(t) = (rho0 cos(omega0 t + phi0), rho0 sin(omega0 t + phi0), t)."""

    rho0: float
    omega0: float
    phi0: float
    omega_sign: int
    root_sign: int    # sign in front of sqrt(Delta); 0 for the degenerate linear case
    residual: float
    profile: RefractiveProfile = field(repr=False, compare=False)

    @property
    def speed2(self) -> float:
        return self.rho0 ** 2 * self.omega0 ** 2 + 1.0

    def state(self, t: float) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        phi = self.omega0 * t + self.phi0
        c, s = math.cos(phi), math.sin(phi)
        r, w = self.rho0, self.omega0
        return (np.array([r * c, r * s, t]),
                np.array([-r * w * s, r * w * c, 1.0]),
                np.array([-r * w * w * c, -r * w * w * s, 0.0]))

    def period(self) -> float:
        return 2.0 * math.pi / abs(self.omega0)

    def to_dict(self) -> dict:
        return {"family": "helix", "rho0": self.rho0, "omega0": self.omega0, "phi0": self.phi0,
                "branch": {"omega_sign": self.omega_sign, "root_sign": self.root_sign},
                "speed2": self.speed2, "residual": self.residual}


@dataclass(frozen=True)
class CircleFamily:
    """
    kind / plane_param:
        horizontal-on-axis              zeta0, the height of the plane
        origin-centered-equatorial      theta0 = pi/2
        vertical-plane-through-origin   phi0, the azimuth of the plane
        latitude                        theta0, the polar angle
    """

    kind: str
    radius: float
    plane_param: float
    residual: float
    profile: RefractiveProfile = field(repr=False, compare=False)
    geodesic: bool = True
    system_residual: Optional[float] = None

    def state(self, t: float) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        r = self.radius
        c, s = math.cos(t), math.sin(t)
        if self.kind in (HORIZONTAL, EQUATORIAL):
            height = self.plane_param if self.kind == HORIZONTAL else 0.0
            return (np.array([r * c, r * s, height]),
                    np.array([-r * s, r * c, 0.0]),
                    np.array([-r * c, -r * s, 0.0]))
        if self.kind == VERTICAL:
            cp, sp = math.cos(self.plane_param), math.sin(self.plane_param)
            return (np.array([r * cp * s, r * sp * s, r * c]),
                    np.array([r * cp * c, r * sp * c, -r * s]),
                    np.array([-r * cp * s, -r * sp * s, -r * c]))
        if self.kind == LATITUDE:
            rs = r * math.sin(self.plane_param)
            return (np.array([rs * c, rs * s, r * math.cos(self.plane_param)]),
                    np.array([-rs * s, rs * c, 0.0]),
                    np.array([-rs * c, -rs * s, 0.0]))
        raise ConfigError(f"unknown circle kind {self.kind!r}")

    def period(self) -> float:
        return 2.0 * math.pi

    def to_dict(self) -> dict:
        out = {"family": "circle", "kind": self.kind, "radius": self.radius,
               "plane_param": self.plane_param, "residual": self.residual, "geodesic": self.geodesic}
        if self.system_residual is not None:
            out["system_residual"] = self.system_residual
        return out


@dataclass(frozen=True)
class LineFamily:
    """
    kind / params:
        uniform-straight-line   x0, velocity
        cylinder-generator      rho0, phi0
        z-axis-segment          r0, v0
    """

    kind: str
    params: dict
    residual: float
    profile: RefractiveProfile = field(repr=False, compare=False)

    def state(self, t: float) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        if self.kind == STRAIGHT_LINE:
            x0 = np.asarray(self.params["x0"], dtype=float)
            velocity = np.asarray(self.params["velocity"], dtype=float)
            return x0 + t * velocity, velocity.copy(), np.zeros(3)
        if self.kind == GENERATOR:
            rho0, phi0 = self.params["rho0"], self.params["phi0"]
            return (np.array([rho0 * math.cos(phi0), rho0 * math.sin(phi0), t]),
                    np.array([0.0, 0.0, 1.0]), np.zeros(3))
        raise ConfigError(f"{self.kind} has no closed-form parametrisation")

    def period(self) -> float:
        return 1.0

    def to_dict(self) -> dict:
        params = {k: (list(map(float, v)) if isinstance(v, (list, tuple, np.ndarray)) else v)
                  for k, v in self.params.items()}
        return {"family": "line", "kind": self.kind, "params": params, "residual": self.residual}


# Helices

def helix_equation(profile: RefractiveProfile, rho: float, omega: float) -> float:
    """rho omega^2 + f f' v^4 / (1 + 2 f^2 v^2) with v^2 = rho^2 omega^2 + 1."""
    f, fp = media.radial_f(profile, rho)
    v2 = rho * rho * omega * omega + 1.0
    return rho * omega * omega + f * fp * v2 * v2 / (1.0 + 2.0 * f * f * v2)


def _helix_equation_slope(f: float, fp: float, rho: float, omega: float) -> float:
    w = rho * rho * omega * omega + 1.0
    dpush = (2.0 * w + 2.0 * f * f * w * w) / (1.0 + 2.0 * f * f * w) ** 2
    return 2.0 * rho * omega + f * fp * dpush * 2.0 * rho * rho * omega


def helix_window_diagnostics(profile: RefractiveProfile, rho: float) -> dict:
    """
    Existence windows for helix branches at radius rho.

    `window_item_1` and `window_item_2` are the literal interval conditions on
    k = 2f + rho f'; `exact` is the condition under which the quadratic in
    u = v^2 has a root u > 1 (the literal windows are necessary but not
    sufficient when k < 0).
    """
    f, fp = media.radial_f(profile, rho)
    k = 2.0 * f + rho * fp
    a = f * k
    b = 1.0 - 2.0 * f * f
    delta = b * b + 4.0 * a
    m = 2.0 * f * f - 1.0
    item_1 = m < 0.0 and ((-(m * m) / (4.0 * f) <= k < 0.0) or (0.0 < k < 2.0 * f))
    item_2 = m > 0.0 and 0.0 < k < 2.0 * f
    if a > 0.0:
        exact = fp < 0.0
    elif a < 0.0:
        exact = b > 0.0 and delta >= 0.0 and 1.0 + 2.0 * f * f + 2.0 * rho * f * fp > 0.0
    else:
        exact = b > 0.0
    return {"rho": rho, "f": f, "f_prime": fp, "k": k, "delta": delta, "degenerate": a == 0.0,
            "window_item_1": bool(item_1), "window_item_2": bool(item_2), "exact": bool(exact)}


def _excess_speed_roots(a: float, b_shift: float, c_shift: float) -> List[Tuple[int, float]]:
    """Roots w = v^2 - 1 of a w^2 + b' w + c' = 0, tagged by the sign of sqrt(Delta)."""
    if a == 0.0:
        return [(0, -c_shift / b_shift)] if b_shift != 0.0 else []
    delta = b_shift * b_shift - 4.0 * a * c_shift
    if delta < 0.0:
        return []
    sd = math.sqrt(delta)
    q = -0.5 * (b_shift + math.copysign(sd, b_shift))
    if q == 0.0:
        return []
    first, second = q / a, c_shift / q
    # q/a carries -sqrt(Delta) when b' >= 0 and +sqrt(Delta) otherwise
    tagged = [(-1, first), (1, second)] if b_shift >= 0.0 else [(1, first), (-1, second)]
    if delta == 0.0:
        tagged = tagged[:1]
    return tagged


def _polish_omega(f: float, fp: float, rho: float, omega: float) -> Tuple[float, float]:
    def residual(w):
        v2 = rho * rho * w * w + 1.0
        return rho * w * w + f * fp * v2 * v2 / (1.0 + 2.0 * f * f * v2)

    best, best_res = omega, abs(residual(omega))
    for _ in range(3):
        slope = _helix_equation_slope(f, fp, rho, best)
        if slope == 0.0:
            break
        candidate = best - residual(best) / slope
        cand_res = abs(residual(candidate))
        if cand_res >= best_res:
            break
        best, best_res = candidate, cand_res
    return best, best_res


def helix_omegas(profile: RefractiveProfile, rho: float, phi0: float = 0.0) -> List[HelixFamily]:
    """
    Angular velocities of helices on the cylinder of radius rho.

    With v^2 = rho^2 omega^2 + 1 the helix condition is the quadratic
    f(2f + rho f') u^2 + (1 - 2f^2) u - 1 = 0 in u = v^2. It is solved for
    w = u - 1 directly so that the w = 0 root (omega = 0) is exact when f' = 0.
    Every branch (+-omega, +-sqrt(Delta)) with u > 1 and residual below the
    family tolerance is returned.
    """
    start = time.time()
    radial = media.require_symmetry(profile, media.CYLINDRICAL)
    if not rho > 0.0:
        raise ConfigError(f"helix radius must be positive, got {rho}")
    f, fp = radial.f(rho)
    a = f * (2.0 * f + rho * fp)
    b = 1.0 - 2.0 * f * f
    if a == 0.0:
        log_info(f"Helix quadratic is linear at rho={rho:.6g} (2f + rho f' = 0)")

    families = []
    for root_sign, w in _excess_speed_roots(a, 2.0 * a + b, rho * f * fp):
        if not w > 0.0:
            continue
        omega = math.sqrt(w) / rho
        omega, residual = _polish_omega(f, fp, rho, omega)
        if residual >= config.FAMILY_RESIDUAL_TOL:
            log_warning(f"Helix branch at rho={rho:.6g} dropped, residual {residual:.3e}")
            continue
        for sign in (1, -1):
            families.append(HelixFamily(rho0=rho, omega0=sign * omega, phi0=phi0, omega_sign=sign,
                                        root_sign=root_sign, residual=residual, profile=profile))
    log_solver("helix", len(families), time.time() - start)
    return families


# Scalar root finding on a bracket

def _check_bracket(bracket: Tuple[float, float]) -> Tuple[float, float]:
    lo, hi = float(bracket[0]), float(bracket[1])
    if not (0.0 < lo < hi) or not math.isfinite(hi):
        raise ConfigError(f"bracket must satisfy 0 < lo < hi, got {bracket}")
    return lo, hi


def bracket_roots(func: Callable[[float], float], bracket: Tuple[float, float],
                  points: int = config.ROOT_GRID_POINTS) -> List[float]:
    """
    All roots of `func` located by sign changes on a uniform grid, refined by
    bisection and polished by one Newton step (kept only if it lowers |func|).
    """
    lo, hi = _check_bracket(bracket)
    grid = np.linspace(lo, hi, points)
    values = np.array([func(s) for s in grid])
    roots = []
    for i in range(points - 1):
        left, right = values[i], values[i + 1]
        if left == 0.0:
            roots.append(float(grid[i]))
            continue
        if left * right >= 0.0:
            continue
        root = optimize.bisect(func, grid[i], grid[i + 1], xtol=config.BISECTION_XTOL,
                               maxiter=config.BISECTION_MAXITER)
        slope = finite_diff.derivative(func, root)
        if slope != 0.0:
            candidate = root - func(root) / slope
            if grid[i] <= candidate <= grid[i + 1] and abs(func(candidate)) < abs(func(root)):
                root = candidate
        roots.append(float(root))
    if values[-1] == 0.0:
        roots.append(float(grid[-1]))
    return roots


def circle_equation(profile: RefractiveProfile, s: float) -> float:
    """h(s) = 1 + 2 f^2 s^2 + f f' s^3."""
    f, fp = media.radial_f(profile, s)
    return 1.0 + 2.0 * f * f * s * s + f * fp * s ** 3


def circle_radii(profile: RefractiveProfile, bracket: Tuple[float, float] = config.DEFAULT_BRACKET,
                 kind: Optional[str] = None, plane_param: Optional[float] = None) -> List[CircleFamily]:
    """
    Radii of circular geodesics traversed with unit angular velocity.

    The kind defaults to horizontal circles on the axis for cylindrical
    profiles and equatorial circles for spherical ones.
    """
    start = time.time()
    radial = media.require_radial(profile)
    if kind is None:
        kind = HORIZONTAL if radial.symmetry == media.CYLINDRICAL else EQUATORIAL
    if plane_param is None:
        plane_param = math.pi / 2.0 if kind == EQUATORIAL else 0.0

    families = []
    for root in bracket_roots(lambda s: circle_equation(radial, s), bracket):
        residual = abs(circle_equation(radial, root))
        if residual >= config.FAMILY_RESIDUAL_TOL:
            log_warning(f"Circle root {root:.6g} dropped, residual {residual:.3e}")
            continue
        families.append(CircleFamily(kind=kind, radius=root, plane_param=plane_param,
                                     residual=residual, profile=profile))
    log_solver("circle", len(families), time.time() - start)
    return families


def _slope_roots(radial: RadialProfile, bracket) -> List[Tuple[float, float]]:
    out = []
    for root in bracket_roots(lambda s: radial.f(s)[1], bracket):
        residual = abs(radial.f(root)[1])
        if residual >= config.FAMILY_RESIDUAL_TOL:
            log_warning(f"f' root {root:.6g} dropped, residual {residual:.3e}")
            continue
        out.append((root, residual))
    return out


def generator_radii(profile: RefractiveProfile, bracket: Tuple[float, float] = config.DEFAULT_BRACKET,
                    phi0: float = 0.0) -> List[LineFamily]:
    """Vertical lines on the cylinders rho = rho0 with f'(rho0) = 0."""
    start = time.time()
    radial = media.require_symmetry(profile, media.CYLINDRICAL)
    families = [LineFamily(kind=GENERATOR, params={"rho0": root, "phi0": phi0},
                           residual=residual, profile=profile)
                for root, residual in _slope_roots(radial, bracket)]
    log_solver("generator", len(families), time.time() - start)
    return families


def sphere_circle_families(profile: RefractiveProfile, bracket: Tuple[float, float] = config.DEFAULT_BRACKET,
                           phi0: float = 0.0, theta0: float = math.pi / 4.0) -> List[CircleFamily]:
    """
    Circle families of a spherical profile.

    Equatorial and vertical great circles share their radii with `circle_radii`.
    Latitude circles come from roots of f'; on such a sphere the gradient of
    gamma vanishes, so the equations of motion give zero acceleration while the
    circle needs a centripetal one of size r0 sin(theta0). They are returned
    with geodesic=False and that residual in `system_residual`.
    """
    start = time.time()
    radial = media.require_symmetry(profile, media.SPHERICAL)
    if abs(math.sin(theta0)) < 1e-12 or abs(theta0 - math.pi / 2.0) < 1e-12:
        raise ConfigError("latitude angle must avoid the poles and the equator")

    equatorial = circle_radii(radial, bracket, kind=EQUATORIAL)
    vertical = [CircleFamily(kind=VERTICAL, radius=c.radius, plane_param=phi0, residual=c.residual,
                             profile=profile) for c in equatorial]
    latitude = []
    for root, residual in _slope_roots(radial, bracket):
        family = CircleFamily(kind=LATITUDE, radius=root, plane_param=theta0, residual=residual,
                              profile=profile, geodesic=False)
        mismatch = float(np.linalg.norm(dynamics.el_residual(profile, family.state, 0.0)))
        latitude.append(CircleFamily(kind=LATITUDE, radius=root, plane_param=theta0, residual=residual,
                                     profile=profile, geodesic=False, system_residual=mismatch))
    families = equatorial + vertical + latitude
    log_solver("sphere-circles", len(families), time.time() - start)
    return families


def straight_line(profile: RefractiveProfile, x0, velocity) -> LineFamily:
    """Straight-line family of a uniform medium."""
    if not isinstance(profile, media.Uniform):
        raise ConfigError("straight-line families need a uniform medium")
    return LineFamily(kind=STRAIGHT_LINE,
                      params={"x0": np.asarray(x0, dtype=float), "velocity": np.asarray(velocity, dtype=float)},
                      residual=0.0, profile=profile)


# Incompatible radial motion

def incompatibility_probe(profile: RefractiveProfile, s: float) -> Optional[float]:
    """
    F(s) = sqrt((-4f^2 - s f f' - sqrt(Delta')) / (6 f^3 (2f + s f')) - s^2),
    Delta' = 4f^4 + s^2 f^2 f'^2 + 2 s f^3 f'.

    Returns None outside the window
    2f + s f' in (-(1 + 4 s^2 f^2) / (2 s^2 f (1 + 3 s^2 f^2)), 0)
    or when a radicand is negative.
    """
    if s <= 0.0:
        return None
    f, fp = media.radial_f(profile, s)
    if f <= 0.0:
        return None
    k = 2.0 * f + s * fp
    lower = -(1.0 + 4.0 * s * s * f * f) / (2.0 * s * s * f * (1.0 + 3.0 * s * s * f * f))
    if not lower < k < 0.0:
        return None
    delta = 4.0 * f ** 4 + s * s * f * f * fp * fp + 2.0 * s * f ** 3 * fp
    if delta < 0.0:
        return None
    radicand = (-4.0 * f * f - s * f * fp - math.sqrt(delta)) / (6.0 * f ** 3 * k) - s * s
    if radicand < 0.0:
        return None
    return math.sqrt(radicand)


def incompatibility_curve(profile: RefractiveProfile, s: float,
                          zeta0: float = 0.0) -> Optional[Callable[[float], Tuple[np.ndarray, np.ndarray, np.ndarray]]]:
    """
    Local jet at t = 0 of the planar curve phi = t, zeta = zeta0 whose radius
    obeys d rho/dt = F(rho), started at rho = s.

    rho(t) is expanded to second order (rho' = F, rho'' = F F'), which is exact
    at t = 0 where the returned curve is meant to be evaluated. Returns None
    when F(s) is undefined.
    """
    radial = media.require_radial(profile)
    if radial.symmetry == media.SPHERICAL and zeta0 != 0.0:
        raise ConfigError("for spherical profiles the curve lies in the equatorial plane (zeta0 = 0)")
    F = incompatibility_probe(radial, s)
    if F is None:
        return None

    def probe(r):
        value = incompatibility_probe(radial, r)
        return float("nan") if value is None else value

    h = min(finite_diff.fd_step(np.array([s])), 1e-3 * s)
    F_prime = finite_diff.derivative(probe, s, h=h)
    rho_dd = F * F_prime

    def curve(t: float):
        rho = s + F * t + 0.5 * rho_dd * t * t
        rho_d = F + rho_dd * t
        c, sn = math.cos(t), math.sin(t)
        x = np.array([rho * c, rho * sn, zeta0])
        v = np.array([rho_d * c - rho * sn, rho_d * sn + rho * c, 0.0])
        a = np.array([(rho_dd - rho) * c - 2.0 * rho_d * sn,
                      (rho_dd - rho) * sn + 2.0 * rho_d * c, 0.0])
        return x, v, a

    return curve


# Axis motion in spherical media

def axis_segment(profile: RefractiveProfile, r0: float, v0: float,
                 t_span: Tuple[float, float] = (0.0, 10.0),
                 sample_every: float = config.SAMPLE_EVERY) -> Trajectory:
    """Motion along the z axis of a spherical medium, integrated through the full system."""
    media.require_symmetry(profile, media.SPHERICAL)
    cfg = IntegratorConfig(t_span=tuple(t_span), sample_every=sample_every)
    return dynamics.integrate(profile, np.array([0.0, 0.0, r0]), np.array([0.0, 0.0, v0]), cfg)


def axis_family(profile: RefractiveProfile, r0: float, v0: float) -> LineFamily:
    media.require_symmetry(profile, media.SPHERICAL)
    return LineFamily(kind=AXIS_SEGMENT, params={"r0": r0, "v0": v0}, residual=0.0, profile=profile)


def make_trajectory(family, t_span: Tuple[float, float],
                    sample_every: float = config.SAMPLE_EVERY) -> Trajectory:
    """Exact parametric samples of a family, energy column from `metric.energy`."""
    if isinstance(family, LineFamily) and family.kind == AXIS_SEGMENT:
        return axis_segment(family.profile, family.params["r0"], family.params["v0"], t_span, sample_every)
    times = dynamics.sample_times(tuple(t_span), sample_every)
    states = [family.state(t) for t in times]
    x = np.array([s[0] for s in states])
    v = np.array([s[1] for s in states])
    meta = {"profile": family.profile.to_dict(), "family": family.to_dict()}
    return dynamics.trajectory_from_samples(family.profile, times, x, v, meta)
