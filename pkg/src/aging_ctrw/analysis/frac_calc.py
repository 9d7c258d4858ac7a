# src/aging_ctrw/analysis/frac_calc.py
"""
Fractional calculus on uniform time grids: Grunwald weights,
Riemann-Liouville and Caputo derivatives and the Levy symbol psi(-k).
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import integrate, signal, special

from ..exceptions import DomainError
from ..simulation.process import LevyFamily

RESIDUAL_SKIP = 50


def _check_alpha(alpha: float):
    if not (0.0 < alpha < 1.0):
        raise DomainError(f"alpha must lie in (0,1), got {alpha}")


@dataclass(frozen=True)
class TimeGridFn:
    """Samples of f on t_k = k dt, k = 0..N; f0 is f(0+)"""
    t_grid: np.ndarray
    values: np.ndarray
    f0: Optional[float] = None

    def __post_init__(self):
        t = np.asarray(self.t_grid, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if t.ndim != 1 or t.size < 2 or t.shape != v.shape:
            raise DomainError("t_grid and values must be 1-D arrays of equal length >= 2")
        if t[0] != 0.0:
            raise DomainError("t_grid must start at 0")
        steps = np.diff(t)
        if np.any(steps <= 0.0) or not np.allclose(steps, steps[0], rtol=1e-9, atol=0.0):
            raise DomainError("t_grid must be uniform and increasing")
        # derivative outputs may be singular at t = 0 only
        if not np.all(np.isfinite(v[1:])):
            raise DomainError("values must be finite away from t = 0")
        object.__setattr__(self, 't_grid', t)
        object.__setattr__(self, 'values', v)
        if self.f0 is None:
            object.__setattr__(self, 'f0', float(v[0]))

    @property
    def dt(self) -> float:
        return float(self.t_grid[1] - self.t_grid[0])

    @classmethod
    def from_function(cls, fn, t_max: float, dt: float, f0: Optional[float] = None) -> "TimeGridFn":
        n = int(round(t_max / dt))
        t = dt * np.arange(n + 1)
        return cls(t, np.asarray(fn(t), dtype=float), f0)


@dataclass(frozen=True)
class GrunwaldWeights:
    """w_0 = 1, w_j = w_{j-1} (j-1-alpha)/j"""
    alpha: float
    w: np.ndarray

    @property
    def partial_sums(self) -> np.ndarray:
        return np.cumsum(self.w)


def grunwald_weights(alpha: float, n: int) -> GrunwaldWeights:
    _check_alpha(alpha)
    if n < 1:
        raise DomainError(f"n must be at least 1, got {n}")
    j = np.arange(1, n + 1, dtype=float)
    w = np.concatenate([[1.0], np.cumprod((j - 1.0 - alpha) / j)])
    w.flags.writeable = False
    return GrunwaldWeights(alpha, w)


def _grunwald_apply(values: np.ndarray, alpha: float, dt: float) -> np.ndarray:
    """dt^-alpha sum_j w_j g(t_{n-j}) for every n"""
    w = grunwald_weights(alpha, values.size - 1).w
    return signal.fftconvolve(w, values)[:values.size] * dt ** (-alpha)


def _l1_apply(values: np.ndarray, alpha: float, dt: float, f0: float) -> np.ndarray:
    """Product integration of (t-r)^-alpha f'(r) with f piecewise linear"""
    increments = np.diff(np.concatenate([[f0], values[1:]]))
    k = np.arange(values.size - 1, dtype=float)
    b = (k + 1.0) ** (1.0 - alpha) - k ** (1.0 - alpha)
    out = np.zeros(values.size)
    out[1:] = signal.fftconvolve(b, increments)[:values.size - 1]
    return out * dt ** (-alpha) / special.gamma(2.0 - alpha)


def fractional_integral(f: TimeGridFn, order: float) -> np.ndarray:
    """
    Product-trapezoid rule for I^order f on the grid.

    Exact when f is piecewise linear between nodes; f(0+) is used at t = 0.
    """
    if not (0.0 < order < 1.0):
        raise DomainError(f"order must lie in (0,1), got {order}")
    n_steps = f.values.size - 1
    b1 = order + 1.0
    m = np.arange(n_steps, dtype=float)
    c = np.empty(n_steps)
    c[0] = 1.0
    c[1:] = (m[1:] + 1.0) ** b1 - 2.0 * m[1:] ** b1 + (m[1:] - 1.0) ** b1
    n = np.arange(1, n_steps + 1, dtype=float)
    a0 = (n - 1.0) ** b1 - (n - 1.0 - order) * n ** order
    out = np.zeros(n_steps + 1)
    out[1:] = a0 * f.f0 + signal.fftconvolve(c, f.values[1:])[:n_steps]
    return out * f.dt ** order / special.gamma(order + 2.0)


def _grid_derivative(values: np.ndarray, dt: float) -> np.ndarray:
    """Fourth-order central differences inside, second-order at the ends; node 0 left unset"""
    out = np.empty(values.size)
    out[1] = (values[2] - values[0]) / (2.0 * dt)
    out[2:-2] = (-values[4:] + 8.0 * values[3:-1] - 8.0 * values[1:-3] + values[:-4]) / (12.0 * dt)
    for n in (values.size - 2, values.size - 1):
        out[n] = (3.0 * values[n] - 4.0 * values[n - 1] + values[n - 2]) / (2.0 * dt)
    return out


def riemann_liouville(f: TimeGridFn, alpha: float) -> TimeGridFn:
    """d/dt of the discrete fractional integral I^(1-alpha) f"""
    _check_alpha(alpha)
    if f.values.size < 5:
        raise DomainError("Riemann-Liouville needs at least 5 grid points")
    out = _grid_derivative(fractional_integral(f, 1.0 - alpha), f.dt)
    out[0] = math.copysign(math.inf, f.f0) if f.f0 != 0.0 else 0.0
    return TimeGridFn(f.t_grid, out, float(out[0]))


def caputo(f: TimeGridFn, alpha: float, method: str = "grunwald") -> TimeGridFn:
    """
    Caputo derivative. "grunwald" applies Grunwald weights to f - f(0+);
    "l1" integrates (t-r)^-alpha against the piecewise-linear derivative.
    """
    _check_alpha(alpha)
    if method == "grunwald":
        shifted = f.values - f.f0
        shifted[0] = 0.0
        out = _grunwald_apply(shifted, alpha, f.dt)
    elif method == "l1":
        out = _l1_apply(f.values, alpha, f.dt, f.f0)
    else:
        raise DomainError(f"Unknown Caputo method: {method}")
    return TimeGridFn(f.t_grid, out, float(out[0]))


def rl_caputo_relation_residual(f: TimeGridFn, alpha: float, skip: int = RESIDUAL_SKIP) -> float:
    """max |Caputo f - (RL f - f(0+) t^-alpha / Gamma(1-alpha))| past the first grid nodes"""
    _check_alpha(alpha)
    left = caputo(f, alpha, method="l1").values
    rl = riemann_liouville(f, alpha).values
    with np.errstate(divide='ignore'):
        right = rl - f.f0 * f.t_grid ** (-alpha) / special.gamma(1.0 - alpha)
    if f.t_grid.size <= skip + 1:
        raise DomainError("grid too short for the residual")
    return float(np.max(np.abs(left[skip:] - right[skip:])))


def observed_order(errors) -> np.ndarray:
    """log2 ratios of successive errors along a dt-halving ladder"""
    errors = np.asarray(errors, dtype=float)
    return np.log2(errors[:-1] / errors[1:])


def levy_symbol(fam: LevyFamily, k):
    """psi(-k), the exponent entering s^(alpha-1) / (s^alpha - psi(-k))"""
    k = np.asarray(k, dtype=float)
    return fam.symbol(-k)


def numeric_laplace(f: TimeGridFn, s: float) -> float:
    """Trapezoid approximation of int_0^T exp(-s t) f(t) dt"""
    if not s > 0:
        raise DomainError(f"s must be positive, got {s}")
    values = f.values.copy()
    if not math.isfinite(values[0]):
        values[0] = 0.0
    return float(integrate.trapezoid(np.exp(-s * f.t_grid) * values, f.t_grid))
