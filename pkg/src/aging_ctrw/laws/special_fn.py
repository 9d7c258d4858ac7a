# src/aging_ctrw/laws/special_fn.py
"""
Special functions used across the package: Mittag-Leffler, regularized
incomplete beta, upper incomplete gamma and the one-sided stable law with
Laplace transform exp(-s^alpha).
"""

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Tuple

import numpy as np
from scipy import integrate, optimize, special

from ..exceptions import DomainError
from ..utils.config import TOLERANCES


@dataclass(frozen=True)
class AlphaScale:
    """Temporal index alpha and subordinator scale c, E[exp(-s D_u)] = exp(-u c s^alpha)"""
    alpha: float
    c: float = 1.0

    def __post_init__(self):
        if not (0.0 < self.alpha < 1.0):
            raise DomainError(f"alpha must lie in (0,1), got {self.alpha}")
        if not (math.isfinite(self.c) and self.c > 0.0):
            raise DomainError(f"c must be a positive real, got {self.c}")

    def to_config(self) -> dict:
        return {'alpha': self.alpha, 'c': self.c}


@dataclass(frozen=True)
class StablePdfEval:
    """Evaluator for the standard one-sided stable density"""
    alpha: float
    method: str = "auto"
    abs_tol: float = 1e-8

    def __post_init__(self):
        _check_stable_alpha(self.alpha)
        if self.method not in ("auto", "series", "integral"):
            raise DomainError(f"Unknown stable pdf method: {self.method}")
        if not self.abs_tol > 0:
            raise DomainError("abs_tol must be positive")

    def __call__(self, x):
        return stable_pdf_onesided(self.alpha, x, method=self.method)


def _check_stable_alpha(alpha: float):
    if not (0.0 < alpha < 1.0):
        raise DomainError(f"alpha must lie in (0,1), got {alpha}")


# MITTAG-LEFFLER

def _ml_series(alpha: float, z: float) -> Tuple[float, float]:
    """Power series; returns (value, sum of absolute terms)"""
    total = 1.0
    abs_sum = 1.0
    log_abs_z = math.log(abs(z))
    negative = z < 0
    for k in range(1, TOLERANCES.ml_series_max_terms):
        log_term = k * log_abs_z - math.lgamma(alpha * k + 1.0)
        if log_term > 709.0:
            return math.inf if not negative else math.nan, math.inf
        magnitude = math.exp(log_term)
        total += -magnitude if (negative and k % 2) else magnitude
        abs_sum += magnitude
        if magnitude < TOLERANCES.ml_series_term_tol * max(1.0, abs(total)):
            break
    return total, abs_sum


def _ml_integral(alpha: float, x: float) -> float:
    """E_alpha(-x) for x > 0 from its completely monotone spectral representation"""
    cos_pa = math.cos(math.pi * alpha)

    def integrand(rho):
        return math.exp(-(x * rho) ** (1.0 / alpha)) / (rho * rho + 2.0 * rho * cos_pa + 1.0)

    peak = -cos_pa
    split = max(2.0, 2.0 * peak)
    points = sorted(p for p in (peak, 1.0 / x) if 0.0 < p < split)
    head, _ = integrate.quad(integrand, 0.0, split, points=points or None,
                             epsabs=TOLERANCES.quad_epsabs, epsrel=TOLERANCES.quad_epsrel,
                             limit=TOLERANCES.quad_limit)
    tail, _ = integrate.quad(integrand, split, np.inf,
                             epsabs=TOLERANCES.quad_epsabs, epsrel=TOLERANCES.quad_epsrel,
                             limit=TOLERANCES.quad_limit)
    return math.sin(math.pi * alpha) / (math.pi * alpha) * (head + tail)


def mittag_leffler(alpha: float, z, method: str = "auto"):
    """
    One-parameter Mittag-Leffler function E_alpha(z) for real z.

    method="auto" uses the power series for |z| below the switch radius as long
    as the absolute-term sum stays small, and the integral representation for
    z <= 0 otherwise. Positive z always uses the series.
    """
    if not (0.0 < alpha <= 1.0):
        raise DomainError(f"alpha must lie in (0,1], got {alpha}")
    if method not in ("auto", "series", "integral"):
        raise DomainError(f"Unknown Mittag-Leffler method: {method}")

    if np.ndim(z) > 0:
        arr = np.asarray(z, dtype=float)
        flat = [mittag_leffler(alpha, float(v), method) for v in arr.ravel()]
        return np.asarray(flat, dtype=float).reshape(arr.shape)

    z = float(z)
    if not math.isfinite(z):
        raise DomainError(f"z must be finite, got {z}")
    if alpha == 1.0:
        return math.exp(z)
    if z == 0.0:
        return 1.0

    if method == "series" or z > 0.0:
        if method == "integral":
            raise DomainError("integral representation only covers z <= 0")
        return _ml_series(alpha, z)[0]
    if method == "integral":
        return _ml_integral(alpha, -z)

    if -z < TOLERANCES.ml_switch_radius:
        value, abs_sum = _ml_series(alpha, z)
        if abs_sum <= TOLERANCES.ml_series_max_abs_sum:
            return value
    return _ml_integral(alpha, -z)


# INCOMPLETE BETA / GAMMA

def reg_incomplete_beta(x, a: float, b: float):
    """Regularized incomplete beta I_x[a,b]"""
    if not (a > 0 and b > 0):
        raise DomainError(f"a and b must be positive, got a={a}, b={b}")
    arr = np.asarray(x, dtype=float)
    if np.any(~np.isfinite(arr)) or np.any(arr < 0.0) or np.any(arr > 1.0):
        raise DomainError("x must lie in [0,1]")
    value = special.betainc(a, b, arr)
    return float(value) if np.ndim(value) == 0 else value


def upper_incomplete_gamma(a: float, x):
    """Gamma(a, x) = int_x^inf t^(a-1) e^(-t) dt"""
    if not a > 0:
        raise DomainError(f"a must be positive, got {a}")
    arr = np.asarray(x, dtype=float)
    if np.any(arr < 0.0):
        raise DomainError("x must be nonnegative")
    value = special.gammaincc(a, arr) * special.gamma(a)
    return float(value) if np.ndim(value) == 0 else value


def _scaled_upper_gamma_scalar(a: float, x: float) -> float:
    if x <= 100.0:
        return math.exp(x) * special.gammaincc(a, x) * special.gamma(a)
    # asymptotic expansion x^(a-1) sum_k (a-1)...(a-k) x^-k
    total = 1.0
    term = 1.0
    for k in range(1, 200):
        nxt = term * (a - k) / x
        if abs(nxt) >= abs(term) or abs(nxt) < 1e-17 * abs(total):
            break
        term = nxt
        total += term
    return x ** (a - 1.0) * total


def scaled_upper_gamma(a: float, x):
    """exp(x) * Gamma(a, x), stable for large x"""
    if not a > 0:
        raise DomainError(f"a must be positive, got {a}")
    arr = np.asarray(x, dtype=float)
    if np.any(arr < 0.0):
        raise DomainError("x must be nonnegative")
    if arr.ndim == 0:
        return _scaled_upper_gamma_scalar(a, float(arr))
    return np.array([_scaled_upper_gamma_scalar(a, float(v)) for v in arr.ravel()]).reshape(arr.shape)


# ONE-SIDED STABLE LAW

def zolotarev_a(alpha: float, u):
    """Kanter's function A(u) on (0, pi); increasing, A(0+) = (1-alpha) alpha^(alpha/(1-alpha))"""
    u = np.asarray(u, dtype=float)
    with np.errstate(divide='ignore', over='ignore', invalid='ignore'):
        return ((np.sin(alpha * u) / np.sin(u)) ** (1.0 / (1.0 - alpha))
                * np.sin((1.0 - alpha) * u) / np.sin(alpha * u))


def _stable_pdf_series(alpha: float, x: float) -> Tuple[float, float]:
    """Convergent series in x^-alpha; returns (value, largest |term| / pi)"""
    log_x = math.log(x)
    total = 0.0
    largest = 0.0
    for k in range(1, TOLERANCES.stable_series_max_terms):
        log_mag = math.lgamma(alpha * k + 1.0) - math.lgamma(k + 1.0) - (alpha * k + 1.0) * log_x
        magnitude = math.exp(log_mag)
        term = magnitude * math.sin(math.pi * alpha * k)
        total += term if k % 2 else -term
        largest = max(largest, abs(term))
        if k > 3 and magnitude < TOLERANCES.ml_series_term_tol * abs(total):
            break
    else:
        # not converged: force the caller onto the integral route
        largest = math.inf
    return total / math.pi, largest / math.pi


def _stable_pdf_integral(alpha: float, x: float) -> float:
    y = x ** (-alpha / (1.0 - alpha))
    a0 = (1.0 - alpha) * alpha ** (alpha / (1.0 - alpha))
    if a0 * y > 745.0:
        return 0.0

    def integrand(u):
        a = float(zolotarev_a(alpha, u))
        z = a * y
        if not math.isfinite(z) or z > 745.0:
            return 0.0
        return a * math.exp(-z)

    value, _ = integrate.quad(integrand, 0.0, math.pi, epsabs=0.0, epsrel=1e-11,
                              limit=TOLERANCES.quad_limit)
    return alpha / (1.0 - alpha) * x ** (-1.0 / (1.0 - alpha)) * value / math.pi


def _stable_pdf_scalar(alpha: float, x: float, method: str) -> float:
    if not (math.isfinite(x) and x > 0.0):
        raise DomainError(f"x must be a positive real, got {x}")
    if method == "series":
        return _stable_pdf_series(alpha, x)[0]
    if method == "integral":
        return _stable_pdf_integral(alpha, x)
    if x >= TOLERANCES.stable_series_min_x:
        value, largest = _stable_pdf_series(alpha, x)
        if value > 0.0 and largest / value < TOLERANCES.stable_series_cancellation:
            return value
    return _stable_pdf_integral(alpha, x)


def stable_pdf_onesided(alpha: float, x, method: str = "auto"):
    """Density of the standard positive alpha-stable law, E[exp(-sS)] = exp(-s^alpha)"""
    _check_stable_alpha(alpha)
    if method not in ("auto", "series", "integral"):
        raise DomainError(f"Unknown stable pdf method: {method}")
    if np.ndim(x) > 0:
        arr = np.asarray(x, dtype=float)
        flat = [_stable_pdf_scalar(alpha, float(v), method) for v in arr.ravel()]
        return np.asarray(flat).reshape(arr.shape)
    return _stable_pdf_scalar(alpha, float(x), method)


def stable_cdf_onesided(alpha: float, x: float) -> float:
    """P(S <= x) = (1/pi) int_0^pi exp(-A(u) x^(-alpha/(1-alpha))) du"""
    _check_stable_alpha(alpha)
    if x <= 0.0:
        return 0.0
    return _stable_cdf_log(alpha, math.log(x))


def _stable_cdf_log(alpha: float, log_x: float) -> float:
    log_y = -alpha / (1.0 - alpha) * log_x
    if log_y > 700.0:
        return 0.0
    if log_y < -700.0:
        return 1.0
    y = math.exp(log_y)

    def integrand(u):
        z = float(zolotarev_a(alpha, u)) * y
        if not math.isfinite(z) or z > 745.0:
            return 0.0
        return math.exp(-z)

    value, _ = integrate.quad(integrand, 0.0, math.pi, epsabs=1e-300, epsrel=1e-11,
                              limit=TOLERANCES.quad_limit)
    return min(1.0, value / math.pi)


def stable_quantile_onesided(alpha: float, q: float) -> float:
    """Inverse of stable_cdf_onesided by root finding in log x"""
    _check_stable_alpha(alpha)
    if not (0.0 < q < 1.0):
        raise DomainError(f"q must lie in (0,1), got {q}")
    bound = 700.0 * (1.0 - alpha) / alpha
    root = optimize.brentq(lambda s: _stable_cdf_log(alpha, s) - q, -bound, bound,
                           xtol=1e-12, rtol=1e-12, maxiter=500)
    return math.exp(root)


def inverse_subordinator_pdf(params: AlphaScale, x, t: float):
    """
    Density h(x,t) of the inverse subordinator E_t:
    h(x,t) = (t/alpha) c^(-1/alpha) x^(-1-1/alpha) g(t (c x)^(-1/alpha)).
    """
    if not t > 0:
        raise DomainError(f"t must be positive, got {t}")
    arr = np.asarray(x, dtype=float)
    if np.any(~(arr > 0.0)):
        raise DomainError("x must be positive")
    alpha, c = params.alpha, params.c
    arg = t * (c * arr) ** (-1.0 / alpha)
    value = (t / alpha) * c ** (-1.0 / alpha) * arr ** (-1.0 - 1.0 / alpha) * stable_pdf_onesided(alpha, arg)
    return float(value) if np.ndim(value) == 0 else value


# QUADRATURE RULES

@lru_cache(maxsize=32)
def gauss_legendre(n: int) -> Tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights on (0, 1)"""
    nodes, weights = np.polynomial.legendre.leggauss(n)
    nodes = 0.5 * (nodes + 1.0)
    weights = 0.5 * weights
    nodes.flags.writeable = False
    weights.flags.writeable = False
    return nodes, weights


@lru_cache(maxsize=64)
def subordination_rule(alpha: float) -> Tuple[np.ndarray, np.ndarray]:
    """
    Nodes y_i and weights W_i with E[phi(E_1)] = sum_i W_i phi(y_i) for the
    standard inverse subordinator (c=1). E_s then equals s^alpha E_1 / c in law.
    Composite Gauss-Legendre over [0, y_max], y_max the 1 - tail quantile of E_1.
    """
    _check_stable_alpha(alpha)
    # P(E_1 > y) = P(S < y^(-1/alpha))
    y_max = stable_quantile_onesided(alpha, TOLERANCES.subordination_tail) ** (-alpha)
    panels = TOLERANCES.subordination_panels
    base_nodes, base_weights = gauss_legendre(TOLERANCES.subordination_panel_nodes)
    edges = np.linspace(0.0, y_max, panels + 1)
    width = np.diff(edges)
    nodes = (edges[:-1, None] + width[:, None] * base_nodes[None, :]).ravel()
    weights = (width[:, None] * base_weights[None, :]).ravel()
    weights = weights * inverse_subordinator_pdf(AlphaScale(alpha), nodes, 1.0)
    weights = weights / weights.sum()
    nodes.flags.writeable = False
    weights.flags.writeable = False
    return nodes, weights
