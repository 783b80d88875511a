"""
Invariant suite behind `Main.py verify`.

Each suite returns a list of `Check` records (maximum residual against a
tolerance). Points are drawn from numpy's PCG64 generator seeded by the
caller, so a run is reproducible from its seed.
"""

import math
import time
from dataclasses import astuple, dataclass
from typing import Callable, Dict, List, Tuple

import numpy as np
import pandas as pd

from engines import closedform, connection, curvature, dynamics, finite_diff, media, metric
from engines.dynamics import IntegratorConfig
from engines.errors import ConfigError
from engines.media import GaussianMirage, GaussianRing, RefractiveProfile, Uniform
from engines.metric import PhasePoint
from utils import config
from utils.logger import log_check, log_info

SUITES = ("metric", "connection", "curvature", "dynamics", "closedform")


@dataclass(frozen=True)
class Check:
    suite: str
    name: str
    value: float
    tolerance: float
    relation: str = "<"   # "<": value must stay below tolerance; ">": value must exceed it

    @property
    def passed(self) -> bool:
        if not math.isfinite(self.value):
            return False
        return self.value < self.tolerance if self.relation == "<" else self.value > self.tolerance


def profile_families() -> Dict[str, RefractiveProfile]:
    """One representative of every profile family."""
    return {
        "uniform": Uniform(n0=1.3),
        "mirage-spherical": GaussianMirage(epsilon=0.5, width=2.0, symmetry=media.SPHERICAL),
        "mirage-cylindrical": GaussianMirage(epsilon=1.0, width=2.5, symmetry=media.CYLINDRICAL),
        "ring-cylindrical": GaussianRing(base=1.0, amplitude=1.0, center=2.0, width=1.0),
    }


def sample_position(rng: np.random.Generator, profile: RefractiveProfile,
                    half_width: float = 4.0, min_radius: float = 0.2) -> np.ndarray:
    while True:
        x = rng.uniform(-half_width, half_width, 3)
        if isinstance(profile, media.RadialProfile) and profile.symmetry_radius(x) < min_radius:
            continue
        return x


def sample_phase_point(rng: np.random.Generator, profile: RefractiveProfile) -> PhasePoint:
    return PhasePoint(sample_position(rng, profile), rng.uniform(-1.0, 1.0, 3))


def random_orthogonal(rng: np.random.Generator) -> np.ndarray:
    q, r = np.linalg.qr(rng.normal(size=(3, 3)))
    return q * np.sign(np.diag(r))


def step_halving_changes(profile: RefractiveProfile, p: PhasePoint) -> Dict[str, float]:
    """
    Largest change of every finite-difference tensor when its step goes from h to h/2.

    h is `fd_step` of the whole phase point and is used for both the x and y
    differences.
    """
    h = finite_diff.fd_step(np.concatenate([p.x, p.y]))
    builders = {
        "nonlinear_connection_fd": lambda step: (connection.nonlinear_connection_fd(profile, p, step),),
        "cartan_general": lambda step: astuple(connection.cartan_general(profile, p, step)),
        "torsions": lambda step: astuple(curvature.torsions(profile, p, step)),
        "curvatures": lambda step: astuple(curvature.curvatures(profile, p, step)),
        "h_covariant_C": lambda step: (curvature.h_covariant_C(profile, p, step),),
        "metricity": lambda step: curvature.metricity_residuals(profile, p, step),
    }
    changes = {}
    for name, build in builders.items():
        coarse, fine = build(h), build(0.5 * h)
        changes[name] = max(float(np.max(np.abs(a - b))) for a, b in zip(coarse, fine))
    return changes


def _max(values) -> float:
    values = list(values)
    return float(max(values)) if values else 0.0


def _points(rng, count: int):
    """Yield (profile, point) pairs cycling through the profile families."""
    families = list(profile_families().values())
    for i in range(count):
        profile = families[i % len(families)]
        yield profile, sample_phase_point(rng, profile)


# Suites

def metric_suite(rng: np.random.Generator) -> List[Check]:
    inverse, hessian, spectrum, energy = [], [], [], []
    for profile, p in _points(rng, config.VERIFY_INVERSE_POINTS * 4):
        g = metric.fundamental_tensor(profile, p)
        inverse.append(np.max(np.abs(g @ metric.inverse_fundamental_tensor(profile, p) - np.eye(3))))
        (s1, s2, tau), sig = metric.signature(profile, p)
        exact = np.sort([s1, s2, tau])
        spectrum.append(np.max(np.abs(np.linalg.eigvalsh(g) - exact)) / tau if sig == (0, 3, 0) else np.inf)
    for profile, p in _points(rng, config.VERIFY_HESSIAN_POINTS):
        hessian.append(np.max(np.abs(metric.fundamental_tensor(profile, p) - metric.hessian_oracle(profile, p))))
        e = metric.energy(profile, p)
        energy.append(abs(e - metric.lagrangian_energy_identity(profile, p)) / max(1.0, e))

    spherical = profile_families()["mirage-spherical"]
    equivariance = []
    for _ in range(config.VERIFY_ROTATIONS):
        Q = random_orthogonal(rng)
        p = sample_phase_point(rng, spherical)
        rotated = PhasePoint(Q @ p.x, Q @ p.y)
        lhs = metric.fundamental_tensor(spherical, rotated)
        equivariance.append(np.max(np.abs(lhs - Q @ metric.fundamental_tensor(spherical, p) @ Q.T)))

    return [
        Check("metric", "energy_identity", _max(energy), config.SINGLE_FD_TOL),
        Check("metric", "hessian_consistency", _max(hessian), config.SINGLE_FD_TOL),
        Check("metric", "inverse_identity", _max(inverse), config.SYMMETRY_TOL),
        Check("metric", "o3_equivariance", _max(equivariance), config.SYMMETRY_TOL),
        Check("metric", "signature_spectrum", _max(spectrum), config.SYMMETRY_TOL),
    ]


def connection_suite(rng: np.random.Generator) -> List[Check]:
    n_err, l_err, c_err, sym, covector = [], [], [], [], []
    for profile, p in _points(rng, config.VERIFY_CONNECTION_POINTS):
        nlc = connection.nonlinear_connection(profile, p)
        n_err.append(np.max(np.abs(nlc.N - connection.nonlinear_connection_fd(profile, p))))
        closed = connection.cartan_closed_form(profile, p, nlc)
        general = connection.cartan_general(profile, p)
        l_err.append(np.max(np.abs(closed.L - general.L)))
        c_err.append(np.max(np.abs(closed.C - general.C)))
        sym.append(max(np.max(np.abs(closed.L - np.swapaxes(closed.L, 1, 2))),
                       np.max(np.abs(closed.C - np.swapaxes(closed.C, 1, 2)))))
        for k in range(3):
            # delta/delta x^k has components (e_k, -N[:, k])
            covector.append(np.max(np.abs(connection.adapted_covector(profile, p, np.eye(3)[k], -nlc.N[:, k]))))

    uniform = profile_families()["uniform"]
    degenerate = []
    for _ in range(20):
        p = sample_phase_point(rng, uniform)
        nlc = connection.nonlinear_connection(uniform, p)
        degenerate.append(max(np.max(np.abs(connection.semispray(uniform, p))), np.max(np.abs(nlc.N)),
                              np.max(np.abs(connection.cartan_closed_form(uniform, p, nlc).L))))

    spherical = profile_families()["mirage-spherical"]
    equivariance = []
    for _ in range(config.VERIFY_ROTATIONS):
        Q = random_orthogonal(rng)
        p = sample_phase_point(rng, spherical)
        lhs = connection.semispray(spherical, PhasePoint(Q @ p.x, Q @ p.y))
        equivariance.append(np.max(np.abs(lhs - Q @ connection.semispray(spherical, p))))

    return [
        Check("connection", "adapted_covector", _max(covector), config.SYMMETRY_TOL),
        Check("connection", "cartan_C_vs_general", _max(c_err), config.SINGLE_FD_TOL),
        Check("connection", "cartan_L_vs_general", _max(l_err), config.SINGLE_FD_TOL),
        Check("connection", "cartan_symmetry", _max(sym), config.SYMMETRY_TOL),
        Check("connection", "nonlinear_vs_fd", _max(n_err), config.SINGLE_FD_TOL),
        Check("connection", "semispray_o3_equivariance", _max(equivariance), config.SYMMETRY_TOL),
        Check("connection", "uniform_degeneration", _max(degenerate), 1e-14),
    ]


def curvature_suite(rng: np.random.Generator) -> List[Check]:
    h_res, v_res = [], []
    for profile, p in _points(rng, config.VERIFY_METRICITY_POINTS):
        h, v = curvature.metricity_residuals(profile, p)
        h_res.append(np.max(np.abs(h)))
        v_res.append(np.max(np.abs(v)))

    antisym = []
    for profile, p in _points(rng, 12):
        tors = curvature.torsions(profile, p)
        curv = curvature.curvatures(profile, p)
        antisym.append(max(np.max(np.abs(tors.R + np.swapaxes(tors.R, 1, 2))),
                           np.max(np.abs(curv.R4 + np.swapaxes(curv.R4, 2, 3))),
                           np.max(np.abs(curv.S4 + np.swapaxes(curv.S4, 2, 3)))))

    vacuum = Uniform(n0=1.0)
    zero_field = []
    for _ in range(4):
        p = sample_phase_point(rng, vacuum)
        tors = curvature.torsions(vacuum, p)
        curv = curvature.curvatures(vacuum, p)
        zero_field.append(max(np.max(np.abs(t)) for t in (tors.R, tors.P, tors.C, curv.R4, curv.P4, curv.S4)))

    uniform = profile_families()["uniform"]
    flat = []
    for _ in range(4):
        p = sample_phase_point(rng, uniform)
        tors = curvature.torsions(uniform, p)
        curv = curvature.curvatures(uniform, p)
        flat.append(max(np.max(np.abs(t)) for t in (tors.R, tors.P, curv.R4, curv.P4)))
    documented = PhasePoint(np.zeros(3), np.array([1.0, 0.0, 0.0]))
    s4 = float(np.max(np.abs(curvature.curvatures(uniform, documented).S4)))

    halving = [max(step_halving_changes(profile, p).values())
               for profile, p in _points(rng, config.VERIFY_HALVING_POINTS)]

    return [
        Check("curvature", "antisymmetry", _max(antisym), 1e-8),
        Check("curvature", "metricity_h", _max(h_res), config.NESTED_FD_TOL),
        Check("curvature", "metricity_v", _max(v_res), config.NESTED_FD_TOL),
        Check("curvature", "step_halving", _max(halving), config.STEP_HALVING_FACTOR * config.SINGLE_FD_TOL),
        Check("curvature", "uniform_R_P_R4_P4", _max(flat), 1e-8),
        Check("curvature", "uniform_S4_nonzero", s4, 1e-3, relation=">"),
        Check("curvature", "zero_field", _max(zero_field), 1e-10),
    ]


def _initial_condition(rng: np.random.Generator, profile: RefractiveProfile) -> Tuple[np.ndarray, np.ndarray]:
    return sample_position(rng, profile, half_width=3.0, min_radius=0.5), rng.uniform(-1.0, 1.0, 3)


def dynamics_suite(rng: np.random.Generator) -> List[Check]:
    rhs = []
    for profile, p in _points(rng, 1000):
        a = dynamics.motion_rhs(profile, p.x, p.y)
        rhs.append(np.max(np.abs(a + 2.0 * connection.semispray(profile, p))) / max(1.0, np.max(np.abs(a))))

    drift = []
    families = list(profile_families().values())
    cfg = IntegratorConfig(t_span=(0.0, 20.0))
    for profile in families:
        for _ in range(config.VERIFY_DYNAMICS_ICS):
            x0, v0 = _initial_condition(rng, profile)
            drift.append(dynamics.integrate(profile, x0, v0, cfg).energy_drift())

    reversal = []
    short = IntegratorConfig(t_span=(0.0, 5.0))
    for profile in families[1:]:
        x0, v0 = _initial_condition(rng, profile)
        forward = dynamics.integrate(profile, x0, v0, short)
        back = dynamics.integrate(profile, forward.x[-1], -forward.v[-1], short)
        reversal.append(max(np.max(np.abs(back.x[-1] - x0)), np.max(np.abs(back.v[-1] + v0))))

    spherical = profile_families()["mirage-spherical"]
    rotation = []
    span = IntegratorConfig(t_span=(0.0, 2.0))
    for _ in range(config.VERIFY_ROTATIONS):
        Q = random_orthogonal(rng)
        x0, v0 = _initial_condition(rng, spherical)
        base = dynamics.integrate(spherical, x0, v0, span)
        turned = dynamics.integrate(spherical, Q @ x0, Q @ v0, span)
        rotation.append(np.max(np.abs(turned.x - base.x @ Q.T)))

    axis = dynamics.integrate(spherical, np.array([0.0, 0.0, 1.0]), np.array([0.0, 0.0, 0.5]),
                              IntegratorConfig(t_span=(0.0, 10.0)))
    confinement = float(np.max(np.abs(axis.x[:, :2])))

    uniform = profile_families()["uniform"]
    x0, v0 = np.zeros(3), np.array([1.0, 2.0, 3.0])
    line = dynamics.integrate(uniform, x0, v0, IntegratorConfig(t_span=(0.0, 10.0)))
    straight = float(np.max(np.abs(line.x[-1] - (x0 + 10.0 * v0))))

    return [
        Check("dynamics", "axis_confinement", confinement, 1e-10),
        Check("dynamics", "energy_drift", _max(drift), config.TRAJECTORY_RESIDUAL_TOL),
        Check("dynamics", "rhs_vs_semispray", _max(rhs), config.SYMMETRY_TOL),
        Check("dynamics", "rotation_equivariance", _max(rotation), config.TRAJECTORY_RESIDUAL_TOL),
        Check("dynamics", "straight_lines", straight, 1e-9),
        Check("dynamics", "time_reversal", _max(reversal), config.SINGLE_FD_TOL),
    ]


def _family_el_residual(profile: RefractiveProfile, family, span: float) -> float:
    times = np.linspace(0.0, span, 100)
    return _max(np.max(np.abs(dynamics.el_residual(profile, family.state, t))) for t in times)


def _tracking_error(profile: RefractiveProfile, family, span: float) -> float:
    x0, v0, _ = family.state(0.0)
    cfg = IntegratorConfig(t_span=(0.0, span), rel_tol=1e-12, abs_tol=1e-14, sample_every=span / 50.0)
    run = dynamics.integrate(profile, x0, v0, cfg)
    exact = np.array([family.state(t)[0] for t in run.t])
    return float(np.max(np.abs(run.x - exact)))


def closedform_suite(rng: np.random.Generator) -> List[Check]:
    mirage = profile_families()["mirage-cylindrical"]
    helices, agreement = [], []
    for rho in np.linspace(0.5, 8.0, 16):
        found = closedform.helix_omegas(mirage, float(rho))
        window = closedform.helix_window_diagnostics(mirage, float(rho))
        agreement.append(0.0 if bool(found) == window["exact"] else 1.0)
        helices.extend(found)
    helix_residual = _max(h.residual for h in helices) if helices else math.inf
    at_four = [h for h in helices if h.rho0 == 4.0 and h.omega0 > 0]
    helix = max(at_four, key=lambda h: h.omega0) if at_four else None
    helix_track = _tracking_error(mirage, helix, helix.period()) if helix else math.inf

    cyl_roots = [c.radius for c in closedform.circle_radii(mirage, config.DEFAULT_BRACKET)]
    sph = GaussianMirage(epsilon=1.0, width=2.5, symmetry=media.SPHERICAL)
    sph_roots = [c.radius for c in closedform.circle_radii(sph, config.DEFAULT_BRACKET)]
    same_roots = (float(np.max(np.abs(np.array(cyl_roots) - np.array(sph_roots))))
                  if cyl_roots and len(cyl_roots) == len(sph_roots) else math.inf)
    circles = closedform.sphere_circle_families(sph, config.DEFAULT_BRACKET)
    closure = math.inf
    if circles:
        r0 = circles[0].radius
        orbit = dynamics.integrate(sph, np.array([r0, 0.0, 0.0]), np.array([0.0, r0, 0.0]),
                                   IntegratorConfig(t_span=(0.0, 2.0 * math.pi), rel_tol=1e-12, abs_tol=1e-14))
        closure = float(np.max(np.abs(orbit.x[-1] - np.array([r0, 0.0, 0.0]))))

    ring = profile_families()["ring-cylindrical"]
    generators = closedform.generator_radii(ring, config.DEFAULT_BRACKET)
    generator_error = abs(generators[0].params["rho0"] - 2.0) if len(generators) == 1 else math.inf
    mirage_generators = len(closedform.generator_radii(mirage, config.DEFAULT_BRACKET))

    el = [_family_el_residual(mirage, h, h.period()) for h in helices[:4]]
    el += [_family_el_residual(sph, c, 2.0 * math.pi) for c in circles if c.geodesic]
    el += [_family_el_residual(ring, g, 1.0) for g in generators]

    curve = closedform.incompatibility_curve(mirage, 3.5)
    incompatible = float(np.max(np.abs(dynamics.el_residual(mirage, curve, 0.0)))) if curve else 0.0

    return [
        Check("closedform", "circle_closure", closure, config.SINGLE_FD_TOL),
        Check("closedform", "circle_roots_cyl_vs_sph", same_roots, config.SYMMETRY_TOL),
        Check("closedform", "families_el_residual", _max(el) if el else math.inf, config.TRAJECTORY_RESIDUAL_TOL),
        Check("closedform", "generator_radius", generator_error, config.FAMILY_RESIDUAL_TOL),
        Check("closedform", "helix_exact_window_agreement", _max(agreement), 0.5),
        Check("closedform", "helix_residual", helix_residual, config.FAMILY_RESIDUAL_TOL),
        Check("closedform", "helix_tracking", helix_track, config.SINGLE_FD_TOL),
        Check("closedform", "incompatibility_residual", incompatible, 1e-4, relation=">"),
        Check("closedform", "mirage_generators", float(mirage_generators), 0.5),
    ]


_RUNNERS: Dict[str, Callable[[np.random.Generator], List[Check]]] = {
    "metric": metric_suite,
    "connection": connection_suite,
    "curvature": curvature_suite,
    "dynamics": dynamics_suite,
    "closedform": closedform_suite,
}


def run_suite(suite: str = "all", seed: int = config.VERIFY_SEED) -> List[Check]:
    """Run one suite (or all of them) with a generator seeded from `seed`."""
    if suite != "all" and suite not in SUITES:
        raise ConfigError(f"unknown suite {suite!r}; choose from all, {', '.join(SUITES)}")
    names = SUITES if suite == "all" else (suite,)
    checks = []
    for name in names:
        start = time.time()
        # one stream per suite
        rng = np.random.default_rng([seed, SUITES.index(name)])
        results = _RUNNERS[name](rng)
        for check in results:
            log_check(f"{check.suite}.{check.name}", check.value, check.tolerance, check.passed)
        log_info(f"Suite {name} finished in {time.time() - start:.2f}s")
        checks.extend(results)
    return sorted(checks, key=lambda c: (c.suite, c.name))


def report(checks: List[Check]) -> pd.DataFrame:
    return pd.DataFrame([
        {"suite": c.suite, "check": c.name, "value": c.value, "relation": c.relation,
         "tolerance": c.tolerance, "status": "PASS" if c.passed else "FAIL"}
        for c in checks
    ], columns=["suite", "check", "value", "relation", "tolerance", "status"])
