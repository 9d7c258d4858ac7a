# src/aging_ctrw/laws/dist.py
"""
Analytic laws of the regeneration structure: the GB2 aging kernel, remaining
lifetime, age, overshoot/undershoot and Mittag-Leffler waiting times,
with samplers and transforms.
"""

import math
from dataclasses import dataclass
from typing import Dict, Optional

import numpy as np
from scipy import integrate, special

from ..exceptions import DomainError
from .special_fn import (
    mittag_leffler,
    reg_incomplete_beta,
    scaled_upper_gamma,
)


def _check_alpha(alpha: float):
    if not (0.0 < alpha < 1.0):
        raise DomainError(f"alpha must lie in (0,1), got {alpha}")


def _check_positive(name: str, value: float):
    if not (math.isfinite(value) and value > 0.0):
        raise DomainError(f"{name} must be a positive real, got {value}")


def _as_output(value):
    return float(value) if np.ndim(value) == 0 else value


@dataclass(frozen=True)
class GB2Params:
    """Generalized beta prime law B'(mu, nu) with scale h"""
    mu: float
    nu: float
    h: float = 1.0

    def __post_init__(self):
        for name in ("mu", "nu", "h"):
            _check_positive(name, getattr(self, name))

    def to_config(self) -> Dict:
        return {'name': 'gb2', 'mu': self.mu, 'nu': self.nu, 'h': self.h}


def gb2_pdf(p: GB2Params, x):
    """f(x) = (x/h)^(mu-1) (1+x/h)^(-mu-nu) / (h B[mu,nu])"""
    arr = np.asarray(x, dtype=float)
    if np.any(~(arr > 0.0)):
        raise DomainError("x must be positive")
    z = arr / p.h
    log_f = ((p.mu - 1.0) * np.log(z) - (p.mu + p.nu) * np.log1p(z)
             - math.log(p.h) - special.betaln(p.mu, p.nu))
    return _as_output(np.exp(log_f))


def gb2_cdf(p: GB2Params, x):
    arr = np.asarray(x, dtype=float)
    if np.any(arr < 0.0):
        raise DomainError("x must be nonnegative")
    with np.errstate(invalid='ignore'):
        u = np.where(np.isinf(arr), 1.0, arr / (p.h + arr))
    return reg_incomplete_beta(u, p.mu, p.nu)


def gb2_truncated_mean(p: GB2Params, upper: float) -> float:
    """int_0^upper x f(x) dx; diverges as upper grows when nu <= 1"""
    _check_positive("upper", upper)
    value, _ = integrate.quad(lambda x: x * gb2_pdf(p, x), 0.0, upper,
                              points=[p.h] if p.h < upper else None, limit=400)
    return value


@dataclass(frozen=True)
class AgingKernel:
    """Law p_t0 of the remaining lifetime R_t0: GB2(1-alpha, alpha, t0)"""
    alpha: float
    t0: float

    def __post_init__(self):
        _check_alpha(self.alpha)
        _check_positive("t0", self.t0)

    @property
    def params(self) -> GB2Params:
        return GB2Params(1.0 - self.alpha, self.alpha, self.t0)

    def pdf(self, x):
        return gb2_pdf(self.params, x)

    def cdf(self, x):
        return aging_kernel_cdf(self, x)

    def survival(self, x):
        """int_x^inf p_t0(r) dr, computed as I_{t0/(t0+x)}[alpha, 1-alpha]"""
        arr = np.asarray(x, dtype=float)
        if np.any(arr < 0.0):
            raise DomainError("x must be nonnegative")
        with np.errstate(divide='ignore', invalid='ignore'):
            u = np.where(np.isinf(arr), 0.0, self.t0 / (self.t0 + arr))
        return reg_incomplete_beta(u, self.alpha, 1.0 - self.alpha)

    def sample(self, rng: np.random.Generator, size=None):
        return aging_kernel_sample(self, rng, size)

    def laplace(self, s):
        return aging_kernel_laplace(self, s)

    def to_config(self) -> Dict:
        return {'name': 'aging_kernel', 'alpha': self.alpha, 't0': self.t0}


def aging_kernel_cdf(k: AgingKernel, x):
    """I_{x/(t0+x)}[1-alpha, alpha]"""
    return gb2_cdf(k.params, x)


def aging_kernel_sample(k: AgingKernel, rng: np.random.Generator, size=None):
    """t0 B/(1-B) with B ~ Beta(1-alpha, alpha)"""
    b = rng.beta(1.0 - k.alpha, k.alpha, size=size)
    b = np.minimum(b, np.nextafter(1.0, 0.0))
    return _as_output(k.t0 * b / (1.0 - b))


def aging_kernel_laplace(k: AgingKernel, s):
    """E[exp(-s R_t0)] = exp(s t0) Gamma(alpha, s t0) / Gamma(alpha)"""
    arr = np.asarray(s, dtype=float)
    if np.any(arr < 0.0):
        raise DomainError("s must be nonnegative")
    value = scaled_upper_gamma(k.alpha, arr * k.t0) / special.gamma(k.alpha)
    return _as_output(value)


def kernel_laplace_at(alpha: float, t0: float, s):
    """p_t0 Laplace transform for alpha in (0, 1]; alpha = 1 is the point mass at 0"""
    if not (0.0 < alpha <= 1.0):
        raise DomainError(f"alpha must lie in (0,1], got {alpha}")
    _check_positive("t0", t0)
    if alpha == 1.0:
        arr = np.asarray(s, dtype=float)
        if np.any(arr < 0.0):
            raise DomainError("s must be nonnegative")
        return _as_output(np.ones_like(arr))
    return aging_kernel_laplace(AgingKernel(alpha, t0), s)


# REGENERATION LAWS

def remaining_life_pdf(alpha: float, t: float, r):
    """Density of R_t = D_{E_t} - t"""
    _check_alpha(alpha)
    _check_positive("t", t)
    return gb2_pdf(GB2Params(1.0 - alpha, alpha, t), r)


def remaining_life_cdf(alpha: float, t: float, r):
    _check_alpha(alpha)
    _check_positive("t", t)
    return gb2_cdf(GB2Params(1.0 - alpha, alpha, t), r)


def age_pdf_gb1(alpha: float, t: float, v):
    """Density of the age V_t = t - D_{E_t-} on (0, t)"""
    _check_alpha(alpha)
    _check_positive("t", t)
    arr = np.asarray(v, dtype=float)
    if np.any(~((arr > 0.0) & (arr < t))):
        raise DomainError("v must lie in (0, t)")
    z = arr / t
    log_f = (-alpha * np.log(z) + (alpha - 1.0) * np.log1p(-z)
             - math.log(t) - special.betaln(alpha, 1.0 - alpha))
    return _as_output(np.exp(log_f))


def age_cdf_gb1(alpha: float, t: float, v):
    _check_alpha(alpha)
    _check_positive("t", t)
    arr = np.clip(np.asarray(v, dtype=float), 0.0, t)
    return reg_incomplete_beta(arr / t, 1.0 - alpha, alpha)


def overshoot_pdf(alpha: float, t: float, r):
    """Density of D_{E_t} on (t, inf): r^-1 (t/(r-t))^alpha / B[alpha, 1-alpha]"""
    _check_alpha(alpha)
    _check_positive("t", t)
    arr = np.asarray(r, dtype=float)
    if np.any(~(arr > t)):
        raise DomainError("r must exceed t")
    log_f = (alpha * (math.log(t) - np.log(arr - t)) - np.log(arr)
             - special.betaln(alpha, 1.0 - alpha))
    return _as_output(np.exp(log_f))


def overshoot_cdf(alpha: float, t: float, r):
    arr = np.maximum(np.asarray(r, dtype=float) - t, 0.0)
    return remaining_life_cdf(alpha, t, arr)


def undershoot_pdf(alpha: float, t: float, v):
    """Density of D_{E_t-} on (0, t): v^(alpha-1) (t-v)^-alpha / B[alpha, 1-alpha]"""
    _check_alpha(alpha)
    _check_positive("t", t)
    arr = np.asarray(v, dtype=float)
    if np.any(~((arr > 0.0) & (arr < t))):
        raise DomainError("v must lie in (0, t)")
    log_f = ((alpha - 1.0) * np.log(arr) - alpha * np.log(t - arr)
             - special.betaln(alpha, 1.0 - alpha))
    return _as_output(np.exp(log_f))


def undershoot_cdf(alpha: float, t: float, v):
    _check_alpha(alpha)
    _check_positive("t", t)
    arr = np.clip(np.asarray(v, dtype=float), 0.0, t)
    return reg_incomplete_beta(arr / t, alpha, 1.0 - alpha)


# SAMPLERS

def onesided_stable_sample(alpha: float, rng: np.random.Generator, size=None):
    """
    Standard positive stable draws with E[exp(-sS)] = exp(-s^alpha) by the
    Chambers-Mallows-Stuck transform at total skewness (Kanter's form).
    """
    _check_alpha(alpha)
    u = rng.uniform(0.0, math.pi, size=size)
    w = rng.standard_exponential(size=size)
    s = (np.sin(alpha * u) / np.sin(u) ** (1.0 / alpha)
         * (np.sin((1.0 - alpha) * u) / w) ** ((1.0 - alpha) / alpha))
    return _as_output(s)


def ml_waiting_sample(alpha: float, lam: float, rng: np.random.Generator, size=None):
    """Waiting times with P(W > t) = E_alpha(-lam t^alpha): lam^(-1/alpha) X^(1/alpha) S"""
    if not (0.0 < alpha <= 1.0):
        raise DomainError(f"alpha must lie in (0,1], got {alpha}")
    _check_positive("lambda", lam)
    x = rng.standard_exponential(size=size)
    if alpha == 1.0:
        return _as_output(x / lam)
    s = onesided_stable_sample(alpha, rng, size)
    return _as_output(lam ** (-1.0 / alpha) * x ** (1.0 / alpha) * s)


def ml_waiting_survival(alpha: float, lam: float, t):
    _check_positive("lambda", lam)
    arr = np.asarray(t, dtype=float)
    if np.any(arr < 0.0):
        raise DomainError("t must be nonnegative")
    return mittag_leffler(alpha, -lam * arr ** alpha)


# CONFIG BLOCKS

def law_from_config(block: Dict):
    """Rebuild a law from its key-value block"""
    name = str(block.get('name', '')).lower()
    try:
        if name == 'gb2':
            return GB2Params(float(block['mu']), float(block['nu']), float(block.get('h', 1.0)))
        if name == 'aging_kernel':
            return AgingKernel(float(block['alpha']), float(block['t0']))
    except KeyError as e:
        raise DomainError(f"Law block '{name}' is missing parameter {e}") from e
    raise DomainError(f"Unknown law name: {name!r}")


def law_summary(law, probabilities: Optional[tuple] = (0.25, 0.5, 0.75, 0.9, 0.99)) -> Dict:
    """Quantile summary of a GB2-type law; the mean is infinite for nu <= 1"""
    p = law.params if isinstance(law, AgingKernel) else law
    quantiles = {}
    for q in probabilities:
        b = special.betaincinv(p.mu, p.nu, q)
        quantiles[f"q{int(round(100 * q))}"] = p.h * b / (1.0 - b)
    return {
        'law': law.to_config(),
        'quantiles': quantiles,
        'mean_finite': p.nu > 1.0,
    }
