"""Central finite-difference oracles shared by every module.

All derivatives are taken with respect to a 3-vector argument, by central
differences with one Richardson extrapolation level. The Lagrangian is a
quartic polynomial in y, so its extrapolated second differences are exact
up to rounding.
"""

from typing import Callable, Optional

import numpy as np

from utils import config


def fd_step(v: np.ndarray, scale: float = config.FD_STEP_SCALE) -> float:
    """Step h = max(1, |v|_inf) * scale."""
    return scale * max(1.0, float(np.max(np.abs(v))))


def _central(func: Callable[[np.ndarray], np.ndarray], v: np.ndarray, axis: int, h: float) -> np.ndarray:
    e = np.zeros_like(v)
    e[axis] = h
    return (np.asarray(func(v + e)) - np.asarray(func(v - e))) / (2.0 * h)


def partial(func: Callable[[np.ndarray], np.ndarray], v: np.ndarray, axis: int,
            h: Optional[float] = None, richardson: bool = True) -> np.ndarray:
    """Derivative of a tensor-valued `func` along coordinate `axis` at `v`."""
    v = np.asarray(v, dtype=float)
    if h is None:
        h = fd_step(v)
    coarse = _central(func, v, axis, h)
    if not richardson:
        return coarse
    fine = _central(func, v, axis, 0.5 * h)
    return (4.0 * fine - coarse) / 3.0


def gradient(func: Callable[[np.ndarray], np.ndarray], v: np.ndarray,
             h: Optional[float] = None, richardson: bool = True) -> np.ndarray:
    """
    Jacobian of `func` at `v`.

    Args:
        func: tensor-valued function of a 3-vector
        v: evaluation point
        h: base step; defaults to `fd_step(v)`
        richardson: apply one Richardson extrapolation level

    Returns:
        np.ndarray: shape func(v).shape + (3,), last axis is the derivative index
    """
    v = np.asarray(v, dtype=float)
    columns = [partial(func, v, axis, h, richardson) for axis in range(v.shape[0])]
    return np.stack(columns, axis=-1)


def _second_differences(func: Callable[[np.ndarray], float], v: np.ndarray, h: float) -> np.ndarray:
    n = v.shape[0]
    out = np.empty((n, n))
    for i in range(n):
        ei = np.zeros(n)
        ei[i] = h
        for j in range(i, n):
            ej = np.zeros(n)
            ej[j] = h
            value = (func(v + ei + ej) - func(v + ei - ej)
                     - func(v - ei + ej) + func(v - ei - ej)) / (4.0 * h * h)
            out[i, j] = value
            out[j, i] = value
    return out


def hessian(func: Callable[[np.ndarray], float], v: np.ndarray, h: Optional[float] = None) -> np.ndarray:
    """Central-difference Hessian of a scalar function, one Richardson level."""
    v = np.asarray(v, dtype=float)
    if h is None:
        h = fd_step(v, config.HESSIAN_STEP_SCALE)
    coarse = _second_differences(func, v, h)
    fine = _second_differences(func, v, 0.5 * h)
    return (4.0 * fine - coarse) / 3.0


def derivative(func: Callable[[float], float], s: float, h: Optional[float] = None) -> float:
    """Scalar central difference with one Richardson level."""
    if h is None:
        h = config.FD_STEP_SCALE * max(1.0, abs(s))
    coarse = (func(s + h) - func(s - h)) / (2.0 * h)
    fine = (func(s + 0.5 * h) - func(s - 0.5 * h)) / h
    return (4.0 * fine - coarse) / 3.0
