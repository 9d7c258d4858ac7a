# src/aging_ctrw/analysis/aging.py
"""
Aging of the limit process Y_t = A_{E_t}.

The one-dimensional law of the aged increment Y^t0_t = Y_{t0+t} - Y_t0 off
the origin is the convolution of the un-aged marginal with the GB2 kernel
p_t0 of the remaining lifetime, plus an atom at 0. This module evaluates
that convolution by quadrature, the zero atom, the large-t0 asymptotics,
the fractional Poisson mean and the scaling and alpha -> 1 checks, each
next to a Monte Carlo counterpart.
"""

import math
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy import integrate, special

from ..exceptions import DomainError, HorizonError, UnsupportedFamilyError, VacuousAsymptoticsError
from ..laws.dist import AgingKernel, kernel_laplace_at
from ..laws.special_fn import AlphaScale, gauss_legendre, mittag_leffler, subordination_rule
from ..simulation.mc_stats import (
    EmpiricalDist,
    binomial_sigma,
    bonferroni_level,
    ks_two_sample,
    run_replicates,
    stream,
    two_proportion_test,
)
from ..simulation.process import (
    LevyFamily,
    aging_increment_renewal_sample,
    aging_increment_sample,
    ctrwl_sample,
    horizon_for,
    inverse_marginal_sample,
    levy_sample,
    subordinator_path,
)
from ..utils.config import TOLERANCES
from ..utils.logger import app_logger
from ..utils.schemas import CheckReport

_INTERVAL_RE = re.compile(r'^\s*([(\[])\s*([^,]+?)\s*,\s*([^)\]]+?)\s*([)\]])\s*$')


# SETS

@dataclass(frozen=True)
class Interval:
    """Interval with closure flags, (lo, hi] by default"""
    lo: float
    hi: float
    closed_lo: bool = False
    closed_hi: bool = True

    def __post_init__(self):
        lo, hi = float(self.lo), float(self.hi)
        if math.isnan(lo) or math.isnan(hi) or not lo < hi:
            raise DomainError(f"interval needs lo < hi, got ({lo}, {hi})")
        object.__setattr__(self, 'lo', lo)
        object.__setattr__(self, 'hi', hi)
        if math.isinf(lo):
            object.__setattr__(self, 'closed_lo', False)
        if math.isinf(hi):
            object.__setattr__(self, 'closed_hi', False)

    def contains(self, x):
        x = np.asarray(x, dtype=float)
        lower = x >= self.lo if self.closed_lo else x > self.lo
        upper = x <= self.hi if self.closed_hi else x < self.hi
        return lower & upper

    def integer_bounds(self) -> Tuple[float, float]:
        """(k_hi, k_lo) with P(N in I) = F(k_hi) - F(k_lo) for integer-valued N"""
        if math.isinf(self.hi):
            k_hi = math.inf
        else:
            k_hi = math.floor(self.hi) if self.closed_hi else math.ceil(self.hi) - 1
        if math.isinf(self.lo):
            k_lo = -math.inf
        else:
            k_lo = math.ceil(self.lo) - 1 if self.closed_lo else math.floor(self.lo)
        return float(k_hi), float(k_lo)

    @classmethod
    def parse(cls, text: str) -> "Interval":
        match = _INTERVAL_RE.match(text)
        if not match:
            raise DomainError(f"cannot parse interval {text!r}; expected e.g. (0.2,0.7]")
        left, lo, hi, right = match.groups()
        try:
            return cls(float(lo), float(hi), left == '[', right == ']')
        except ValueError as e:
            raise DomainError(f"bad interval endpoint in {text!r}") from e

    def __str__(self) -> str:
        return f"{'[' if self.closed_lo else '('}{self.lo:g},{self.hi:g}{']' if self.closed_hi else ')'}"


@dataclass(frozen=True)
class BorelSet:
    """Finite union of disjoint intervals, kept sorted"""
    intervals: Tuple[Interval, ...]

    def __post_init__(self):
        ordered = tuple(sorted(self.intervals, key=lambda iv: (iv.lo, iv.hi)))
        if not ordered:
            raise DomainError("a set needs at least one interval")
        for prev, cur in zip(ordered, ordered[1:]):
            touching = prev.hi == cur.lo and prev.closed_hi and cur.closed_lo
            if prev.hi > cur.lo or touching:
                raise DomainError(f"intervals {prev} and {cur} overlap")
        object.__setattr__(self, 'intervals', ordered)

    @classmethod
    def of(cls, *intervals: Interval) -> "BorelSet":
        return cls(tuple(intervals))

    @classmethod
    def interval(cls, lo: float, hi: float, closed_lo: bool = False, closed_hi: bool = True) -> "BorelSet":
        return cls((Interval(lo, hi, closed_lo, closed_hi),))

    @classmethod
    def nonzero(cls) -> "BorelSet":
        return cls((Interval(-math.inf, 0.0, False, False), Interval(0.0, math.inf, False, False)))

    @classmethod
    def parse(cls, text: str) -> "BorelSet":
        """Union of intervals separated by 'U' or '|', e.g. (-inf,-1] U (1,inf)"""
        parts = [p for p in re.split(r'\s*(?:\bU\b|\|)\s*', text.strip()) if p]
        return cls(tuple(Interval.parse(p) for p in parts))

    @property
    def contains_zero(self) -> bool:
        return self.contains(0.0)

    def contains(self, x):
        x = np.asarray(x, dtype=float)
        hit = np.zeros(x.shape, dtype=bool)
        for iv in self.intervals:
            hit |= iv.contains(x)
        return bool(hit) if hit.ndim == 0 else hit

    def __str__(self) -> str:
        return ' U '.join(str(iv) for iv in self.intervals)


# MARGINAL LAW

@lru_cache(maxsize=16)
def _unit_clock_draws(alpha: float, n: int, seed: int) -> np.ndarray:
    draws = np.asarray(inverse_marginal_sample(AlphaScale(alpha), 1.0, stream(seed, 0), n))
    draws.flags.writeable = False
    return draws


@dataclass(frozen=True)
class MarginalLaw:
    """
    t -> P(Y_t in B). The subordination route mixes P(A_u in B) over the
    law of E_t; the monte_carlo route tabulates one seeded ensemble
    scaled by E_t = t^alpha E_1 / c.
    """
    family: LevyFamily
    params: AlphaScale
    route: str = "subordination"
    n_mc: int = 200_000
    seed: int = 0

    def __post_init__(self):
        if self.route not in ("subordination", "monte_carlo"):
            raise DomainError(f"Unknown marginal route: {self.route}")

    def eval(self, borel_set: BorelSet, t):
        t_arr = np.atleast_1d(np.asarray(t, dtype=float))
        if np.any(t_arr < 0.0) or np.any(~np.isfinite(t_arr)):
            raise DomainError("t must be finite and nonnegative")
        alpha, c = self.params.alpha, self.params.c
        if self.route == "subordination":
            nodes, weights = subordination_rule(alpha)
            u = np.outer(t_arr ** alpha, nodes) / c
            probs = self.family.prob_in(borel_set, u.ravel()).reshape(u.shape)
            values = np.clip(probs @ weights, 0.0, 1.0)
        else:
            unit = _unit_clock_draws(alpha, self.n_mc, self.seed)
            values = np.empty(t_arr.size)
            for i, ti in enumerate(t_arr):
                y = levy_sample(self.family, ti ** alpha * unit / c, stream(self.seed, 1))
                values[i] = np.mean(borel_set.contains(y))
        return float(values[0]) if np.ndim(t) == 0 else values.reshape(np.shape(t))

    def continuity_gap(self, borel_set: BorelSet, t_grid, h: float = 1e-6) -> float:
        """max |P(Y_{t+h} in B) - P(Y_t in B)| over the grid"""
        t_grid = np.asarray(t_grid, dtype=float)
        return float(np.max(np.abs(self.eval(borel_set, t_grid + h) - self.eval(borel_set, t_grid))))


# KERNEL QUADRATURE

def _graded_edges(v_star: Optional[float]) -> np.ndarray:
    edges = {0.0, 1.0}
    for j in range(1, 9):
        edges.add(1.0 - 4.0 ** -j)
    if v_star is not None and 0.0 < v_star < 1.0:
        for j in range(-8, 9):
            v = v_star * 4.0 ** j
            if 0.0 < v < 1.0:
                edges.add(v)
    return np.array(sorted(edges))


@lru_cache(maxsize=512)
def kernel_rule(alpha: float, t: float, t0: Optional[float],
                n: Optional[int] = None) -> Tuple[np.ndarray, np.ndarray]:
    """
    Nodes s_i = t - r_i and weights w_i with
    int_0^t phi(t - r) p_t0(r) dr = sum_i w_i phi(s_i).
    With t0=None the weights carry (sin(pi alpha)/pi) r^-alpha instead of p_t0.
    Substituting r = t v^(1/(1-alpha)) removes the r^-alpha endpoint singularity.
    """
    if not (0.0 < alpha < 1.0):
        raise DomainError(f"alpha must lie in (0,1), got {alpha}")
    if not t > 0:
        raise DomainError(f"t must be positive, got {t}")
    n = n or TOLERANCES.aging_panel_nodes
    v_star = None if t0 is None else (t0 / t) ** (1.0 - alpha)
    edges = _graded_edges(v_star)
    base_nodes, base_weights = gauss_legendre(n)
    width = np.diff(edges)
    v = (edges[:-1, None] + width[:, None] * base_nodes[None, :]).ravel()
    gw = (width[:, None] * base_weights[None, :]).ravel()
    r = t * v ** (1.0 / (1.0 - alpha))
    weights = math.sin(math.pi * alpha) / math.pi * t ** (1.0 - alpha) / (1.0 - alpha) * gw
    if t0 is not None:
        weights = weights * t0 ** (alpha - 1.0) / (1.0 + r / t0)
    s = np.maximum(t - r, 0.0)
    s.flags.writeable = False
    weights.flags.writeable = False
    return s, weights


def _check_times(t: float, t0: float):
    if not (t > 0 and t0 > 0):
        raise DomainError(f"need t > 0 and t0 > 0, got t={t}, t0={t0}")


def aging_prob(law: MarginalLaw, borel_set: BorelSet, t: float, t0: float,
               nodes: Optional[int] = None, return_error: bool = False):
    """P(Y^t0_t in B) for 0 not in B, with the refinement difference as error estimate"""
    _check_times(t, t0)
    if borel_set.contains_zero:
        raise DomainError(f"the set {borel_set} contains 0; the convolution formula needs 0 outside B")
    n = nodes or TOLERANCES.aging_panel_nodes
    values = []
    for order in (n, 2 * n):
        s, w = kernel_rule(law.params.alpha, float(t), float(t0), order)
        values.append(float(w @ law.eval(borel_set, s)))
    error = abs(values[1] - values[0])
    app_logger.debug(f"aging_prob B={borel_set} t={t} t0={t0}: {values[1]:.10f} (+/- {error:.1e})",
                     "QUADRATURE")
    value = float(np.clip(values[1], 0.0, 1.0))
    return (value, error) if return_error else value


def zero_atom(family: LevyFamily, alpha: float, t: float, t0: float, c: float = 1.0) -> float:
    """
    P(Y^t0_t = 0). Families without an atom at 0 only stay put when no
    regeneration happens before t; lattice families can also return to 0
    through the Mittag-Leffler no-jump probability.
    """
    _check_times(t, t0)
    mass = float(AgingKernel(alpha, t0).survival(t))
    if family.kind in ("poisson", "compound_poisson"):
        s, w = kernel_rule(alpha, float(t), float(t0))
        mass += float(w @ mittag_leffler(alpha, -family.lam * s ** alpha / c))
    elif family.kind not in ("brownian", "symmetric_stable"):
        raise UnsupportedFamilyError(f"zero atom not available for {family.kind}")
    return mass


def aging_prob_mc(law: MarginalLaw, borel_set: BorelSet, t: float, t0: float, n: int, seed: int,
                  route: str = "path", batch_size: Optional[int] = None, threads: int = 1,
                  stream_offset: int = 0) -> Tuple[float, float]:
    """Monte Carlo frequency of Y^t0_t in B and its binomial sigma"""
    fam, params = law.family, law.params
    if route == "path":
        def draw(rng, size):
            return aging_increment_sample(fam, params, t0, [t], rng, n=size)[:, 0]
    elif route == "renewal":
        def draw(rng, size):
            return aging_increment_renewal_sample(fam, params, t0, t, rng, size)
    else:
        raise DomainError(f"Unknown Monte Carlo route: {route}")
    values = run_replicates(draw, n, seed, batch_size, threads, stream_offset)
    p = float(np.mean(borel_set.contains(values)))
    return p, binomial_sigma(p, n)


# JOINT PROBABILITIES

def _first_exceed(d: np.ndarray, levels: np.ndarray) -> np.ndarray:
    """Per row, the first column with d > level, for every level"""
    rows, width = d.shape
    cap = float(levels.max()) + 1.0
    clipped = np.minimum(d, cap)
    offsets = (cap + 1.0) * np.arange(rows)[:, None]
    flat = (clipped + offsets).ravel()
    targets = (levels[None, :] + offsets).ravel()
    pos = np.searchsorted(flat, targets, side='right').reshape(rows, levels.size)
    return pos - width * np.arange(rows)[:, None]


def aging_joint_prob(law: MarginalLaw, sets: Sequence[BorelSet], times, t0: float,
                     n_mc: int = 20_000, seed: int = 0, nodes: int = 8,
                     du_fraction: Optional[float] = None, return_error: bool = False):
    """
    int_0^{t_1} P(Y_{t_1-r} in B_1, ..., Y_{t_k-r} in B_k) p_t0(r) dr. The
    un-aged joint probabilities come from one ensemble of (D, A) grid paths
    shared by every quadrature node.
    """
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or times.size != len(sets) or times.size == 0:
        raise DomainError("need one set per time")
    if np.any(times <= 0.0) or np.any(np.diff(times) <= 0.0):
        raise DomainError("times must be positive and strictly increasing")
    _check_times(float(times[0]), t0)
    if sets[0].contains_zero:
        raise DomainError("the first set must exclude 0")

    params, fam = law.params, law.family
    s_nodes, weights = kernel_rule(params.alpha, float(times[0]), float(t0), nodes)
    levels = (s_nodes[:, None] + (times - times[0])[None, :]).ravel()
    u_max = horizon_for(params, float(times[-1]), tail=1e-10)
    du = (du_fraction or TOLERANCES.du_fraction) * u_max
    q, k = s_nodes.size, times.size

    def ensemble(rng, size):
        path = subordinator_path(params, du, u_max, rng, n_paths=size)
        if np.any(path.horizon <= levels.max()):
            raise HorizonError("subordinator horizon too short for the joint probability grid")
        idx = _first_exceed(path.d_values, levels)
        steps = levy_sample(fam, np.full((size, path.u_grid.size - 1), du), rng)
        a_path = np.concatenate([np.zeros((size, 1)), np.cumsum(steps, axis=1)], axis=1)
        y = np.take_along_axis(a_path, idx, axis=1).reshape(size, q, k)
        inside = np.ones((size, q), dtype=bool)
        for j, borel_set in enumerate(sets):
            inside &= borel_set.contains(y[:, :, j])
        return inside.astype(float) @ weights

    rows = run_replicates(ensemble, n_mc, seed, batch_size=2000)
    value = float(np.clip(rows.mean(), 0.0, 1.0))
    error = float(rows.std(ddof=1) / math.sqrt(rows.size))
    return (value, error) if return_error else value


# ASYMPTOTICS

def asymptotic_constant(law: MarginalLaw, borel_set: BorelSet, t: float,
                        nodes: Optional[int] = None) -> float:
    """C = (sin(pi alpha)/pi) int_0^t P(Y_{t-r} in B) r^-alpha dr"""
    if not t > 0:
        raise DomainError(f"t must be positive, got {t}")
    if borel_set.contains_zero:
        raise DomainError(f"the set {borel_set} contains 0")
    s, w = kernel_rule(law.params.alpha, float(t), None, nodes)
    value = float(w @ law.eval(borel_set, s))
    if value == 0.0:
        app_logger.warning(f"asymptotic constant vanishes for B={borel_set}", "QUADRATURE")
    return value


def asymptotic_prob(law: MarginalLaw, borel_set: BorelSet, t: float, t0: float) -> float:
    """C t0^(alpha-1), the large-t0 equivalent of aging_prob"""
    _check_times(t, t0)
    const = asymptotic_constant(law, borel_set, t)
    if const == 0.0:
        raise VacuousAsymptoticsError(f"P(Y_s in {borel_set}) vanishes on (0, t); no power law to report")
    return const * t0 ** (law.params.alpha - 1.0)


def fit_loglog_slope(x, y) -> float:
    """Least-squares slope of log y against log x"""
    x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    if x.size < 2 or np.any(x <= 0) or np.any(y <= 0):
        raise DomainError("slope fit needs at least two positive points")
    slope, _ = np.polyfit(np.log(x), np.log(y), 1)
    return float(slope)


def asymptotic_ratio_table(law: MarginalLaw, borel_set: BorelSet, t: float, t0_grid) -> pd.DataFrame:
    const = asymptotic_constant(law, borel_set, t)
    if const == 0.0:
        raise VacuousAsymptoticsError(f"P(Y_s in {borel_set}) vanishes on (0, t)")
    rows = []
    for t0 in t0_grid:
        prob = aging_prob(law, borel_set, t, float(t0))
        approx = const * float(t0) ** (law.params.alpha - 1.0)
        rows.append({'t0': float(t0), 'prob': prob, 'asymptotic': approx, 'ratio': prob / approx})
    return pd.DataFrame(rows, columns=['t0', 'prob', 'asymptotic', 'ratio'])


def monotone_aging_check(law: MarginalLaw, borel_set: BorelSet, t: float, t0_grid,
                         tol: float = 1e-9) -> CheckReport:
    """Reports every increase of aging_prob along an increasing t0 grid"""
    t0_grid = np.sort(np.asarray(t0_grid, dtype=float))
    values = [aging_prob(law, borel_set, t, float(t0)) for t0 in t0_grid]
    violations = [
        {'t0_from': float(a), 't0_to': float(b), 'increase': vb - va}
        for a, b, va, vb in zip(t0_grid, t0_grid[1:], values, values[1:]) if vb - va > tol
    ]
    if violations:
        app_logger.warning(f"aging probability increases in t0 at {len(violations)} grid steps", "QUADRATURE")
    return CheckReport(
        name="monotone_aging",
        passed=not violations,
        statistics={'values': values, 'violations': violations},
        tolerances={'increase': tol},
        inputs={'set': str(borel_set), 't': t, 't0_grid': t0_grid.tolist()},
    )


def kernel_decay_check(alpha: float, s: float = 1.0, t0_grid: Sequence[float] = (1.0, 10.0, 100.0, 1000.0),
                       rel: float = 0.10) -> CheckReport:
    """
    p_t0(s) must decrease along t0 and p_t0(s) / (s t0)^(alpha-1) must settle:
    the last two grid points may differ by at most rel.
    """
    if not s > 0:
        raise DomainError(f"s must be positive, got {s}")
    t0_grid = np.sort(np.asarray(t0_grid, dtype=float))
    if t0_grid.size < 2:
        raise DomainError("the t0 grid needs at least two points")
    values = np.array([kernel_laplace_at(alpha, float(t0), s) for t0 in t0_grid])
    ratios = values / (s * t0_grid) ** (alpha - 1.0)
    decreasing = bool(np.all(np.diff(values) < 0.0))
    drift = float(abs(ratios[-1] / ratios[-2] - 1.0))
    if not decreasing:
        app_logger.warning(f"kernel transform at s={s:g} is not decreasing in t0 for alpha={alpha:g}",
                           "QUADRATURE")
    return CheckReport(
        name="kernel_decay",
        passed=decreasing and drift <= rel,
        statistics={'laplace': values.tolist(), 'scaled': ratios.tolist(), 'last_decade_drift': drift},
        tolerances={'rel': rel},
        inputs={'alpha': alpha, 's': s, 't0_grid': t0_grid.tolist()},
    )


def kernel_alpha_limit_check(t0: float = 1.0, s: float = 1.0, exponents: Sequence[int] = tuple(range(2, 11)),
                             tol: float = 1e-10) -> CheckReport:
    """
    p_t0(s) at alpha = 1 - 10^-n approaches 1 monotonically and at rate O(1 - alpha);
    alpha = 1 itself must give 1 within tol.
    """
    gaps = np.array([1.0 - kernel_laplace_at(1.0 - 10.0 ** (-n), t0, s) for n in exponents])
    steps = 10.0 ** (-np.asarray(exponents, dtype=float))
    at_one = abs(1.0 - kernel_laplace_at(1.0, t0, s))
    shrinking = bool(np.all(np.diff(np.abs(gaps)) < 0.0))
    # |d p_t0(s) / d alpha| at alpha = 1 is E[log(s t0 + X)] + Euler's gamma, X ~ Exp(1)
    slope = float(np.max(np.abs(gaps) / steps))
    bound = math.log(s * t0 + 1.0) + 1.0
    return CheckReport(
        name="kernel_alpha_limit",
        passed=at_one <= tol and shrinking and slope <= bound,
        statistics={'gaps': gaps.tolist(), 'value_at_one': 1.0 - at_one, 'max_gap_over_step': slope},
        tolerances={'abs': tol, 'slope': bound},
        inputs={'t0': t0, 's': s, 'alphas': (1.0 - steps).tolist()},
    )


# FRACTIONAL POISSON MEAN

def fpp_aging_mean(alpha: float, lam: float, t: float, t0: float) -> float:
    """Large-t0 equivalent t0^(alpha-1) (sin(pi alpha)/pi) lam t Gamma(1-alpha)"""
    _check_times(t, t0)
    if not (0.0 < alpha < 1.0 and lam > 0):
        raise DomainError(f"need alpha in (0,1) and lam > 0, got alpha={alpha}, lam={lam}")
    return t0 ** (alpha - 1.0) * math.sin(math.pi * alpha) / math.pi * lam * t * special.gamma(1.0 - alpha)


def fpp_aging_mean_exact(alpha: float, lam: float, t: float, t0: float, c: float = 1.0) -> float:
    """lam E[E_{t0+t} - E_t0] = lam ((t0+t)^alpha - t0^alpha) / (c Gamma(1+alpha))"""
    if not (t > 0 and t0 >= 0 and lam > 0):
        raise DomainError("need t > 0, t0 >= 0 and lam > 0")
    return lam * ((t0 + t) ** alpha - t0 ** alpha) / (c * special.gamma(1.0 + alpha))


def fpp_aging_mean_mc(alpha: float, lam: float, t: float, t0: float, n: int, rng: np.random.Generator,
                      c: float = 1.0, return_error: bool = False):
    counts = aging_increment_renewal_sample(LevyFamily.poisson(lam), AlphaScale(alpha, c), t0, t, rng, n)
    counts = np.asarray(counts, dtype=float)
    mean = math.fsum(counts) / counts.size
    if return_error:
        return mean, float(counts.std(ddof=1) / math.sqrt(counts.size))
    return mean


def caputo_power_identity(alpha: float, t: float) -> Tuple[float, float]:
    """(quadrature, closed form) for int_0^t (t-r)^alpha r^-alpha dr = Gamma(1-alpha) Gamma(1+alpha) t"""
    if not (0.0 < alpha < 1.0 and t > 0):
        raise DomainError("need alpha in (0,1) and t > 0")
    value, _ = integrate.quad(lambda r: 1.0, 0.0, t, weight='alg', wvar=(-alpha, alpha),
                              epsabs=TOLERANCES.quad_epsabs, epsrel=TOLERANCES.quad_epsrel)
    return value, special.gamma(1.0 - alpha) * special.gamma(1.0 + alpha) * t


# SCALING AND STATIONARITY CHECKS

def self_similarity_check(fam: LevyFamily, params: AlphaScale, t0: float, a: float, times,
                          n: int, seed: int, level: Optional[float] = None,
                          batch_size: Optional[int] = None, threads: int = 1) -> CheckReport:
    """
    (Y^t0_{a t_1}, ..., Y^t0_{a t_k}) against a^(alpha/beta) (Y^{t0/a}_{t_1}, ...)
    for strictly beta-stable A. Coordinates are compared by two-sample KS,
    the coordinate sum by a projection KS and the exact-zero frequencies by
    a two-proportion test, all Bonferroni-corrected.
    """
    beta = fam.stability_index
    if beta is None:
        raise UnsupportedFamilyError(f"{fam.kind} is not strictly stable; scaling identity does not apply")
    if not (a > 0 and t0 >= 0):
        raise DomainError(f"need a > 0 and t0 >= 0, got a={a}, t0={t0}")
    times = np.asarray(times, dtype=float)
    level = TOLERANCES.ks_level if level is None else level
    factor = a ** (params.alpha / beta)

    left = run_replicates(lambda rng, size: aging_increment_sample(fam, params, t0, a * times, rng, n=size),
                          n, seed, batch_size, threads, stream_offset=0)
    right = factor * run_replicates(lambda rng, size: aging_increment_sample(fam, params, t0 / a, times, rng, n=size),
                                    n, seed, batch_size, threads, stream_offset=1_000_000)

    tests = []
    for j in range(times.size):
        stat, p = ks_two_sample(EmpiricalDist.from_samples(left[:, j], separate_zeros=False),
                                EmpiricalDist.from_samples(right[:, j], separate_zeros=False))
        tests.append({'test': f"ks_coordinate_{j}", 'statistic': stat, 'p_value': p})
        zl, zr = int(np.count_nonzero(left[:, j] == 0.0)), int(np.count_nonzero(right[:, j] == 0.0))
        z, p = two_proportion_test(zl, n, zr, n)
        tests.append({'test': f"zero_frequency_{j}", 'statistic': z, 'p_value': p,
                      'zeros_left': zl, 'zeros_right': zr})
    stat, p = ks_two_sample(EmpiricalDist.from_samples(left.sum(axis=1), separate_zeros=False),
                            EmpiricalDist.from_samples(right.sum(axis=1), separate_zeros=False))
    tests.append({'test': "ks_projection_sum", 'statistic': stat, 'p_value': p})

    corrected = bonferroni_level(level, len(tests))
    passed = all(test['p_value'] > corrected for test in tests)
    app_logger.info(f"self-similarity a={a}: {'pass' if passed else 'FAIL'}", "STATS")
    return CheckReport(
        name="self_similarity",
        passed=passed,
        statistics={'tests': tests, 'scale_factor': factor},
        tolerances={'level': level, 'corrected_level': corrected},
        inputs={'family': fam.to_config(), **params.to_config(), 't0': t0, 'a': a,
                'times': times.tolist(), 'n': n},
        seeds={'master_seed': seed, 'left_stream_offset': 0, 'right_stream_offset': 1_000_000},
    )


def stationarity_limit_check(fam: LevyFamily, t: float, t0: float, alphas: Sequence[float],
                             n: int, seed: int, c: float = 1.0, threshold: float = 0.02,
                             kernel_mass_floor: float = 0.9, batch_size: Optional[int] = None,
                             threads: int = 1) -> CheckReport:
    """KS distance between Y^t0_t and Y_t along an alpha grid approaching 1"""
    if not (t > 0 and t0 > 0):
        raise DomainError(f"need t > 0 and t0 > 0, got t={t}, t0={t0}")
    alphas = [float(x) for x in alphas]
    noise = 1.63 * math.sqrt(2.0 / n)
    distances: List[float] = []
    kernel_mass = []
    for i, alpha in enumerate(alphas):
        params = AlphaScale(alpha, c)
        aged = run_replicates(lambda rng, size: aging_increment_renewal_sample(fam, params, t0, t, rng, size),
                              n, seed, batch_size, threads, stream_offset=2_000_000 * i)
        fresh = run_replicates(lambda rng, size: ctrwl_sample(fam, params, t, rng, size),
                               n, seed, batch_size, threads, stream_offset=2_000_000 * i + 1_000_000)
        stat, _ = ks_two_sample(EmpiricalDist.from_samples(aged, separate_zeros=False),
                                EmpiricalDist.from_samples(fresh, separate_zeros=False))
        distances.append(stat)
        kernel_mass.append(float(AgingKernel(alpha, t0).cdf(0.05 * t)))
    increases = [b - a for a, b in zip(distances, distances[1:]) if b - a > noise]
    concentrated = kernel_mass[-1] >= kernel_mass_floor
    passed = not increases and distances[-1] < threshold and concentrated
    if not concentrated:
        app_logger.warning(f"aging kernel at alpha={alphas[-1]:g} keeps only {kernel_mass[-1]:.3f} of its mass "
                           f"below 0.05 t", "STATS")
    app_logger.info(f"stationarity limit distances {['%.4f' % d for d in distances]}", "STATS")
    return CheckReport(
        name="stationarity_limit",
        passed=passed,
        statistics={'alphas': alphas, 'ks_distance': distances, 'kernel_cdf_at_5pct_t': kernel_mass},
        tolerances={'final_distance': threshold, 'noise_band': noise, 'kernel_mass_floor': kernel_mass_floor},
        inputs={'family': fam.to_config(), 't': t, 't0': t0, 'c': c, 'n': n},
        seeds={'master_seed': seed},
    )
