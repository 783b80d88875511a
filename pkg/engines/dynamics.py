"""
Anisotropic equations of motion and their numerical integration.

The acceleration is coded directly from the explicit form of the equations

    dV/dt = -4 gamma v^2 (1 + 3 gamma^2 v^2) / ((1 + 2 gamma^2 v^2)(1 + 6 gamma^2 v^2)) (gamma_s V^s) V
            + gamma v^4 / (1 + 2 gamma^2 v^2) grad gamma

and is independent of the semispray code in `connection` (the two agree as
dV/dt = -2 G). Integration uses the Dormand-Prince 5(4) pair with PI step
control and quintic Hermite dense output; a fixed-step classical RK4 mode is
available as a cross-check.
"""

import math
import time
from dataclasses import dataclass, field
from typing import Callable, Iterator, Optional, Tuple

import numpy as np
import pandas as pd

from engines import media, metric
from engines.errors import ConfigError, DomainError, DomainExitError, NumericalError, StepUnderflowError
from engines.media import RefractiveProfile
from utils import config
from utils.logger import log_integration, log_warning

METHODS = ("dopri54", "rk4")

# Dormand-Prince 5(4) tableau
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_E = np.array([71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40])
_ERROR_EXPONENT = 0.2


@dataclass(frozen=True)
class IntegratorConfig:
    t_span: Tuple[float, float] = (0.0, 10.0)
    rel_tol: float = config.REL_TOL
    abs_tol: float = config.ABS_TOL
    max_step: float = config.MAX_STEP
    sample_every: float = config.SAMPLE_EVERY
    method: str = config.INTEGRATOR_METHOD

    def __post_init__(self):
        t0, t1 = self.t_span
        if not (math.isfinite(t0) and math.isfinite(t1)) or t1 <= t0:
            raise ConfigError(f"t_span must satisfy t0 < t1, got {self.t_span}")
        for name in ("rel_tol", "abs_tol", "max_step", "sample_every"):
            value = getattr(self, name)
            if not math.isfinite(value) or value <= 0.0:
                raise ConfigError(f"{name} must be positive, got {value}")
        if self.method not in METHODS:
            raise ConfigError(f"method must be one of {METHODS}, got {self.method!r}")

    def to_dict(self) -> dict:
        return {"t_span": list(self.t_span), "rel_tol": self.rel_tol, "abs_tol": self.abs_tol,
                "max_step": self.max_step, "sample_every": self.sample_every, "method": self.method}


@dataclass(frozen=True)
class Trajectory:
    """Time-ordered samples of a curve; rows are (t, x, v, energy)."""

    t: np.ndarray
    x: np.ndarray
    v: np.ndarray
    energy: np.ndarray
    meta: dict = field(default_factory=dict)
    accepted: int = 0
    rejected: int = 0
    truncated: bool = False

    def __len__(self) -> int:
        return len(self.t)

    def energy_drift(self) -> float:
        return energy_drift(self)

    def to_frame(self) -> pd.DataFrame:
        data = np.column_stack([self.t, self.x, self.v, self.energy])
        return pd.DataFrame(data, columns=config.TRAJECTORY_COLUMNS)


def energy_drift(trajectory: Trajectory) -> float:
    """max_t |E(t) - E(0)| / max(E(0), 1e-30)."""
    if len(trajectory) == 0:
        return 0.0
    e0 = float(trajectory.energy[0])
    return float(np.max(np.abs(trajectory.energy - e0)) / max(e0, 1e-30))


def _force_factors(gamma: float, v2: float) -> Tuple[float, float]:
    g2v2 = gamma * gamma * v2
    drag = 4.0 * gamma * v2 * (1.0 + 3.0 * g2v2) / ((1.0 + 2.0 * g2v2) * (1.0 + 6.0 * g2v2))
    push = gamma * v2 * v2 / (1.0 + 2.0 * g2v2)
    return drag, push


def motion_rhs(profile: RefractiveProfile, x, v) -> np.ndarray:
    """Acceleration dV/dt of the anisotropic equations of motion."""
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    v2 = float(np.dot(v, v))
    if v2 == 0.0:
        return np.zeros(3)
    gamma = media.gamma(profile, x)
    grad = media.gamma_gradient(profile, x)
    drag, push = _force_factors(gamma, v2)
    return -drag * float(np.dot(grad, v)) * v + push * grad


def el_residual(profile: RefractiveProfile, curve: Callable[[float], Tuple[np.ndarray, np.ndarray, np.ndarray]],
                t: float) -> np.ndarray:
    """
    Euler-Lagrange residual a - motion_rhs(x, v) of a curve at time t.

    Args:
        curve: t -> (x, v, a), velocity and acceleration supplied by the caller
    """
    x, v, a = curve(t)
    return np.asarray(a, dtype=float) - motion_rhs(profile, x, v)


def cylindrical_components(profile: RefractiveProfile, q, q_dot, q_ddot) -> np.ndarray:
    """
    Equations of motion in cylindrical coordinates (rho, phi, zeta).

    Returns the residual in the orthonormal frame (e_rho, e_phi, e_z); it is
    the Cartesian residual rotated into that frame.
    """
    radial = media.require_symmetry(profile, media.CYLINDRICAL)
    rho, _, _ = q
    rho_d, phi_d, zeta_d = q_dot
    rho_dd, phi_dd, zeta_dd = q_ddot
    f, f_prime = radial.f(rho)
    v2 = rho_d ** 2 + (rho * phi_d) ** 2 + zeta_d ** 2
    drag, push = _force_factors(f, v2)
    D = f_prime * rho_d
    accel = np.array([rho_dd - rho * phi_d ** 2, rho * phi_dd + 2.0 * rho_d * phi_d, zeta_dd])
    velocity = np.array([rho_d, rho * phi_d, zeta_d])
    force = -drag * D * velocity + push * np.array([f_prime, 0.0, 0.0])
    return accel - force


def spherical_components(profile: RefractiveProfile, q, q_dot, q_ddot) -> np.ndarray:
    """
    Equations of motion in spherical coordinates (r, theta, phi), theta the
    polar angle. Residual in the frame (e_r, e_theta, e_phi).
    """
    radial = media.require_symmetry(profile, media.SPHERICAL)
    r, theta, _ = q
    r_d, theta_d, phi_d = q_dot
    r_dd, theta_dd, phi_dd = q_ddot
    f, f_prime = radial.f(r)
    s, c = math.sin(theta), math.cos(theta)
    v2 = r_d ** 2 + (r * theta_d) ** 2 + (r * s * phi_d) ** 2
    drag, push = _force_factors(f, v2)
    D = f_prime * r_d
    accel = np.array([
        r_dd - r * theta_d ** 2 - r * s * s * phi_d ** 2,
        r * theta_dd + 2.0 * r_d * theta_d - r * s * c * phi_d ** 2,
        r * s * phi_dd + 2.0 * r_d * phi_d * s + 2.0 * r * theta_d * phi_d * c,
    ])
    velocity = np.array([r_d, r * theta_d, r * s * phi_d])
    force = -drag * D * velocity + push * np.array([f_prime, 0.0, 0.0])
    return accel - force


def _hermite(h: float, x0, v0, a0, x1, v1, a1, theta: float) -> Tuple[np.ndarray, np.ndarray]:
    """Quintic Hermite interpolant on position; velocity is its derivative."""
    t2, t3, t4, t5 = theta ** 2, theta ** 3, theta ** 4, theta ** 5
    h0 = 1.0 - 10.0 * t3 + 15.0 * t4 - 6.0 * t5
    h1 = theta - 6.0 * t3 + 8.0 * t4 - 3.0 * t5
    h2 = 0.5 * t2 - 1.5 * t3 + 1.5 * t4 - 0.5 * t5
    h3 = 0.5 * t3 - t4 + 0.5 * t5
    h4 = -4.0 * t3 + 7.0 * t4 - 3.0 * t5
    h5 = 10.0 * t3 - 15.0 * t4 + 6.0 * t5
    position = h0 * x0 + h1 * h * v0 + h2 * h * h * a0 + h3 * h * h * a1 + h4 * h * v1 + h5 * x1

    d0 = -30.0 * t2 + 60.0 * t3 - 30.0 * t4
    d1 = 1.0 - 18.0 * t2 + 32.0 * t3 - 15.0 * t4
    d2 = theta - 4.5 * t2 + 6.0 * t3 - 2.5 * t4
    d3 = 1.5 * t2 - 4.0 * t3 + 2.5 * t4
    d4 = -12.0 * t2 + 28.0 * t3 - 15.0 * t4
    d5 = 30.0 * t2 - 60.0 * t3 + 30.0 * t4
    velocity = (d0 * x0 + d1 * h * v0 + d2 * h * h * a0 + d3 * h * h * a1 + d4 * h * v1 + d5 * x1) / h
    return position, velocity


class _Stepper:
    """Marches the first-order system (x, v)' = (v, a) and yields step ends."""

    def __init__(self, profile: RefractiveProfile, cfg: IntegratorConfig):
        self.profile = profile
        self.cfg = cfg
        self.accepted = 0
        self.rejected = 0

    def rhs(self, state: np.ndarray) -> np.ndarray:
        return np.concatenate([state[3:], motion_rhs(self.profile, state[:3], state[3:])])

    def _error_norm(self, err: np.ndarray, y0: np.ndarray, y1: np.ndarray) -> float:
        scale = self.cfg.abs_tol + self.cfg.rel_tol * np.maximum(np.abs(y0), np.abs(y1))
        return float(np.sqrt(np.mean((err / scale) ** 2)))

    def _initial_step(self, t0: float, y0: np.ndarray, f0: np.ndarray, span: float) -> float:
        scale = self.cfg.abs_tol + self.cfg.rel_tol * np.abs(y0)
        d0 = float(np.sqrt(np.mean((y0 / scale) ** 2)))
        d1 = float(np.sqrt(np.mean((f0 / scale) ** 2)))
        h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
        h0 = min(h0, span, self.cfg.max_step)
        f1 = self.rhs(y0 + h0 * f0)
        d2 = float(np.sqrt(np.mean(((f1 - f0) / scale) ** 2))) / h0
        if max(d1, d2) <= 1e-15:
            h1 = max(1e-6, h0 * 1e-3)
        else:
            h1 = (0.01 / max(d1, d2)) ** _ERROR_EXPONENT
        return min(100.0 * h0, h1, span, self.cfg.max_step)

    def _dopri_step(self, y: np.ndarray, f0: np.ndarray, h: float):
        k = [f0]
        for stage in range(1, 7):
            increment = sum(a * kj for a, kj in zip(_A[stage], k) if a != 0.0)
            k.append(self.rhs(y + h * increment))
        # stage 7 sits at t + h with the propagated solution, so it doubles as f(y_new)
        y_new = y + h * sum(b * kj for b, kj in zip(_B, k) if b != 0.0)
        err = h * sum(e * kj for e, kj in zip(_E, k) if e != 0.0)
        return y_new, k[6], err

    def steps_dopri(self, t0: float, t1: float, y0: np.ndarray) -> Iterator[Tuple[float, np.ndarray, np.ndarray, float, np.ndarray, np.ndarray]]:
        span = t1 - t0
        t, y = t0, y0
        f = self.rhs(y)
        h = self._initial_step(t0, y, f, span)
        err_prev = 1.0
        beta = config.PI_BETA
        alpha = _ERROR_EXPONENT - 0.75 * beta
        while t < t1:
            h = min(h, self.cfg.max_step, t1 - t)
            if h < config.STEP_UNDERFLOW_FACTOR * span:
                raise StepUnderflowError(f"step size underflow at t={t:.6g} (h={h:.3e})", t, h)
            y_new, f_new, err_vec = self._dopri_step(y, f, h)
            if not np.all(np.isfinite(y_new)):
                raise NumericalError(f"non-finite state at t={t + h:.6g}")
            err = self._error_norm(err_vec, y, y_new)
            if err <= 1.0:
                self.accepted += 1
                if err == 0.0:
                    factor = 10.0
                else:
                    factor = config.SAFETY * err ** (-alpha) * err_prev ** beta
                    factor = min(10.0, max(0.2, factor))
                t_new = t1 if t1 - (t + h) <= 1e-14 * span else t + h
                yield t, y, f, t_new, y_new, f_new
                t, y, f = t_new, y_new, f_new
                err_prev = max(err, 1e-4)
                h = h * factor
            else:
                self.rejected += 1
                h = h * max(0.2, config.SAFETY * err ** (-_ERROR_EXPONENT))

    def steps_rk4(self, t0: float, t1: float, y0: np.ndarray):
        every = self.cfg.sample_every
        substeps = max(1, math.ceil(every / self.cfg.max_step - 1e-12))
        h_nominal = every / substeps
        t, y = t0, y0
        f = self.rhs(y)
        n = 0
        while t < t1:
            n += 1
            t_new = min(t0 + n * h_nominal, t1)
            if t1 - t_new <= 1e-12 * (t1 - t0):
                t_new = t1
            h = t_new - t
            k1 = f
            k2 = self.rhs(y + 0.5 * h * k1)
            k3 = self.rhs(y + 0.5 * h * k2)
            k4 = self.rhs(y + h * k3)
            y_new = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            if not np.all(np.isfinite(y_new)):
                raise NumericalError(f"non-finite state at t={t_new:.6g}")
            f_new = self.rhs(y_new)
            self.accepted += 1
            yield t, y, f, t_new, y_new, f_new
            t, y, f = t_new, y_new, f_new


def sample_times(t_span: Tuple[float, float], every: float) -> np.ndarray:
    t0, t1 = t_span
    count = int(math.floor((t1 - t0) / every + 1e-9))
    times = t0 + every * np.arange(count + 1)
    if t1 - times[-1] > 1e-9 * every:
        times = np.append(times, t1)
    else:
        times[-1] = t1
    return times


def _build(profile: RefractiveProfile, cfg: IntegratorConfig, samples, stepper: _Stepper, truncated: bool) -> Trajectory:
    if samples:
        t = np.array([s[0] for s in samples])
        x = np.array([s[1] for s in samples])
        v = np.array([s[2] for s in samples])
    else:
        t, x, v = np.empty(0), np.empty((0, 3)), np.empty((0, 3))
    gammas = [media.gamma(profile, xi) for xi in x]
    energies = np.array([metric.energy_from(gi, vi) for gi, vi in zip(gammas, v)])
    meta = {"profile": profile.to_dict(), "integrator": cfg.to_dict()}
    return Trajectory(t=t, x=x, v=v, energy=energies, meta=meta,
                      accepted=stepper.accepted, rejected=stepper.rejected, truncated=truncated)


def integrate(profile: RefractiveProfile, x0, v0, cfg: Optional[IntegratorConfig] = None) -> Trajectory:
    """
    Integrate the equations of motion from (x0, v0) over cfg.t_span.

    Samples are taken every cfg.sample_every from the dense output, plus the
    final time. If the state leaves the profile domain a DomainExitError is
    raised carrying the valid prefix of the trajectory.
    """
    cfg = cfg or IntegratorConfig()
    x0 = np.asarray(x0, dtype=float)
    v0 = np.asarray(v0, dtype=float)
    if x0.shape != (3,) or v0.shape != (3,):
        raise ConfigError("initial position and velocity must be 3-vectors")

    start = time.time()
    stepper = _Stepper(profile, cfg)
    times = sample_times(cfg.t_span, cfg.sample_every)
    t0, t1 = cfg.t_span
    samples = [(times[0], x0.copy(), v0.copy())]
    nxt = 1
    state = np.concatenate([x0, v0])
    last_t = t0

    steps = stepper.steps_rk4 if cfg.method == "rk4" else stepper.steps_dopri
    try:
        for ta, ya, fa, tb, yb, fb in steps(t0, t1, state):
            h = tb - ta
            while nxt < len(times) and times[nxt] <= tb:
                if times[nxt] == tb:
                    samples.append((tb, yb[:3].copy(), yb[3:].copy()))
                else:
                    theta = (times[nxt] - ta) / h
                    pos, vel = _hermite(h, ya[:3], ya[3:], fa[3:], yb[:3], yb[3:], fb[3:], theta)
                    samples.append((times[nxt], pos, vel))
                nxt += 1
            state, last_t = yb, tb
    except DomainError as e:
        partial = _build(profile, cfg, samples, stepper, truncated=True)
        log_warning(f"Trajectory left the profile domain near t={last_t:.6g}: {e}")
        raise DomainExitError(f"trajectory left the profile domain near t={last_t:.6g}: {e}",
                              trajectory=partial, last_state=state, last_time=last_t) from e
    except StepUnderflowError as e:
        e.trajectory = _build(profile, cfg, samples, stepper, truncated=True)
        raise

    trajectory = _build(profile, cfg, samples, stepper, truncated=False)
    log_integration(profile.kind, stepper.accepted, stepper.rejected,
                    trajectory.energy_drift(), time.time() - start)
    return trajectory


def trajectory_from_samples(profile: RefractiveProfile, t, x, v, meta: Optional[dict] = None) -> Trajectory:
    """Wrap analytic samples as a Trajectory with the energy column recomputed."""
    t = np.asarray(t, dtype=float)
    x = np.asarray(x, dtype=float).reshape(-1, 3)
    v = np.asarray(v, dtype=float).reshape(-1, 3)
    energies = np.array([metric.energy_from(media.gamma(profile, xi), vi) for xi, vi in zip(x, v)])
    return Trajectory(t=t, x=x, v=v, energy=energies, meta=dict(meta or {}))
