# src/aging_ctrw/simulation/process.py
"""
Samplers for the subordinator D_u, its inverse E_t, the outer Levy process
A_u, the limit process Y_t = A_{E_t}, aging increments and the fractional
Poisson process.
"""

import math
from dataclasses import dataclass, field
from functools import lru_cache
from types import MappingProxyType
from typing import Dict, Mapping, NamedTuple, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy import special, stats

from ..exceptions import DomainError, HorizonError, UnsupportedFamilyError
from ..laws.dist import AgingKernel, aging_kernel_sample, ml_waiting_sample, onesided_stable_sample
from ..laws.special_fn import AlphaScale, stable_quantile_onesided
from ..utils.config import TOLERANCES
from ..utils.logger import app_logger

KINDS = ("brownian", "symmetric_stable", "poisson", "compound_poisson")
JUMP_LAWS = ("normal", "exponential")


# OUTER LEVY PROCESS

@dataclass(frozen=True)
class LevyFamily:
    """
    Parametric outer process A_u. Only the fields of the chosen kind are used:
    brownian(mu, A), symmetric_stable(beta, scale), poisson(lam),
    compound_poisson(lam, jump_law, jump_params).
    """
    kind: str
    mu: float = 0.0
    A: float = 1.0
    beta: float = 2.0
    scale: float = 1.0
    lam: float = 1.0
    jump_law: str = "normal"
    jump_params: Tuple[float, ...] = (0.0, 1.0)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise UnsupportedFamilyError(f"Unknown family kind: {self.kind!r}")
        if self.kind == "brownian" and not (self.A > 0 and math.isfinite(self.mu)):
            raise DomainError(f"brownian needs A > 0 and finite drift, got A={self.A}, mu={self.mu}")
        if self.kind == "symmetric_stable":
            if not (0.0 < self.beta <= 2.0):
                raise DomainError(f"beta must lie in (0,2], got {self.beta}")
            if not self.scale > 0:
                raise DomainError(f"scale must be positive, got {self.scale}")
        if self.kind in ("poisson", "compound_poisson") and not self.lam > 0:
            raise DomainError(f"lambda must be positive, got {self.lam}")
        if self.kind == "compound_poisson":
            if self.jump_law not in JUMP_LAWS:
                raise UnsupportedFamilyError(f"Unknown jump law: {self.jump_law!r}")
            if self.jump_law == "normal" and not (len(self.jump_params) == 2 and self.jump_params[1] > 0):
                raise DomainError("normal jumps need (mean, sd > 0)")
            if self.jump_law == "exponential" and not (len(self.jump_params) == 1 and self.jump_params[0] > 0):
                raise DomainError("exponential jumps need (rate > 0,)")

    @classmethod
    def brownian(cls, mu: float = 0.0, A: float = 1.0) -> "LevyFamily":
        return cls("brownian", mu=float(mu), A=float(A))

    @classmethod
    def symmetric_stable(cls, beta: float, scale: float = 1.0) -> "LevyFamily":
        return cls("symmetric_stable", beta=float(beta), scale=float(scale))

    @classmethod
    def poisson(cls, lam: float) -> "LevyFamily":
        return cls("poisson", lam=float(lam))

    @classmethod
    def compound_poisson(cls, lam: float, jump_law: str = "normal",
                         jump_params: Sequence[float] = (0.0, 1.0)) -> "LevyFamily":
        return cls("compound_poisson", lam=float(lam), jump_law=jump_law,
                   jump_params=tuple(float(p) for p in jump_params))

    @property
    def has_density(self) -> bool:
        return self.kind in ("brownian", "symmetric_stable")

    @property
    def stability_index(self) -> Optional[float]:
        """beta for strictly stable families, None otherwise"""
        if self.kind == "brownian":
            return 2.0 if self.mu == 0.0 else None
        if self.kind == "symmetric_stable":
            return self.beta
        return None

    def symbol(self, k):
        """psi(k) with E[exp(ik A_u)] = exp(u psi(k))"""
        k = np.asarray(k, dtype=float)
        if self.kind == "brownian":
            value = 1j * self.mu * k - 0.5 * self.A * k * k
        elif self.kind == "symmetric_stable":
            value = -self.scale * np.abs(k) ** self.beta + 0j
        elif self.kind == "poisson":
            value = self.lam * (np.exp(1j * k) - 1.0)
        elif self.jump_law == "normal":
            m, s = self.jump_params
            value = self.lam * (np.exp(1j * m * k - 0.5 * s * s * k * k) - 1.0)
        else:
            rate = self.jump_params[0]
            value = self.lam * (rate / (rate - 1j * k) - 1.0)
        return complex(value) if value.ndim == 0 else value

    def zero_mass(self, u):
        """P(A_u = 0)"""
        u = np.asarray(u, dtype=float)
        if self.kind in ("poisson", "compound_poisson"):
            value = np.exp(-self.lam * u)
        else:
            value = (u == 0.0).astype(float)
        return float(value) if value.ndim == 0 else value

    def cdf(self, x, u: float):
        """P(A_u <= x) for families with a density, u > 0 (x and u broadcast)"""
        if not self.has_density:
            raise UnsupportedFamilyError(f"{self.kind} has no density; use prob_in")
        x = np.asarray(x, dtype=float)
        if self.kind == "brownian":
            return special.ndtr((x - self.mu * u) / np.sqrt(self.A * u))
        width = (self.scale * u) ** (1.0 / self.beta)
        return standard_symmetric_stable_cdf(self.beta, x / width)

    def prob_in(self, borel_set, u):
        """P(A_u in B) for a set exposing .intervals, vectorized over u"""
        u = np.atleast_1d(np.asarray(u, dtype=float))
        if np.any(u < 0.0):
            raise DomainError("u must be nonnegative")
        at_zero = float(borel_set.contains(0.0))
        positive = u > 0.0
        up = np.where(positive, u, 1.0)
        total = np.zeros_like(u)

        if self.kind == "brownian":
            sd = np.sqrt(self.A * up)
            for iv in borel_set.intervals:
                total += (special.ndtr((iv.hi - self.mu * up) / sd)
                          - special.ndtr((iv.lo - self.mu * up) / sd))
        elif self.kind == "symmetric_stable":
            width = (self.scale * up) ** (1.0 / self.beta)
            for iv in borel_set.intervals:
                total += (standard_symmetric_stable_cdf(self.beta, iv.hi / width)
                          - standard_symmetric_stable_cdf(self.beta, iv.lo / width))
        elif self.kind == "poisson":
            for iv in borel_set.intervals:
                k_hi, k_lo = iv.integer_bounds()
                total += stats.poisson.cdf(k_hi, self.lam * up) - stats.poisson.cdf(k_lo, self.lam * up)
        else:
            total = self._compound_prob_in(borel_set, up, at_zero)

        total = np.where(positive, np.clip(total, 0.0, 1.0), at_zero)
        return total

    def _compound_prob_in(self, borel_set, u, at_zero):
        means = self.lam * u
        k_max = int(stats.poisson.ppf(1.0 - 1e-15, means.max())) + 2
        j = np.arange(1, k_max + 1)
        weights = stats.poisson.pmf(j[None, :], means[:, None])
        inside = np.zeros(j.size)
        for iv in borel_set.intervals:
            if self.jump_law == "normal":
                m, s = self.jump_params
                sd = s * np.sqrt(j)
                inside += special.ndtr((iv.hi - m * j) / sd) - special.ndtr((iv.lo - m * j) / sd)
            else:
                rate = self.jump_params[0]
                inside += (stats.gamma.cdf(max(iv.hi, 0.0), j, scale=1.0 / rate)
                           - stats.gamma.cdf(max(iv.lo, 0.0), j, scale=1.0 / rate))
        return np.exp(-means) * at_zero + weights @ inside

    def to_config(self) -> Dict:
        if self.kind == "brownian":
            return {'family': 'brownian', 'mu': self.mu, 'A': self.A}
        if self.kind == "symmetric_stable":
            return {'family': 'symmetric_stable', 'beta': self.beta, 'scale': self.scale}
        if self.kind == "poisson":
            return {'family': 'poisson', 'lambda': self.lam}
        return {'family': 'compound_poisson', 'lambda': self.lam,
                'jump_law': self.jump_law, 'jump_params': list(self.jump_params)}

    @classmethod
    def from_config(cls, block: Mapping) -> "LevyFamily":
        kind = str(block.get('family', '')).lower()
        if kind == "brownian":
            return cls.brownian(block.get('mu', 0.0), block.get('A', 1.0))
        if kind == "symmetric_stable":
            return cls.symmetric_stable(block['beta'], block.get('scale', 1.0))
        if kind == "poisson":
            return cls.poisson(block.get('lambda', 1.0))
        if kind == "compound_poisson":
            return cls.compound_poisson(block.get('lambda', 1.0), block.get('jump_law', 'normal'),
                                        block.get('jump_params', (0.0, 1.0)))
        raise UnsupportedFamilyError(f"Unknown family: {kind!r}")


@lru_cache(maxsize=16)
def _stable_cdf_table(beta: float) -> Tuple[np.ndarray, np.ndarray]:
    app_logger.debug(f"Tabulating symmetric stable cdf for beta={beta}", "SAMPLER")
    grid = np.sinh(np.linspace(-math.asinh(1e3), math.asinh(1e3), 1201))
    values = stats.levy_stable.cdf(grid, beta, 0.0)
    values = np.maximum.accumulate(np.clip(values, 0.0, 1.0))
    grid.flags.writeable = False
    values.flags.writeable = False
    return grid, values


def standard_symmetric_stable_cdf(beta: float, z):
    """cdf of the symmetric stable law with characteristic function exp(-|k|^beta)"""
    z = np.asarray(z, dtype=float)
    if beta == 2.0:
        return special.ndtr(z / math.sqrt(2.0))
    if beta == 1.0:
        return 0.5 + np.arctan(z) / math.pi
    grid, values = _stable_cdf_table(beta)
    inner = np.interp(z, grid, values)
    # power tails beyond the table: P(Z > z) ~ Gamma(beta) sin(pi beta / 2) / pi * z^-beta
    tail_const = special.gamma(beta) * math.sin(math.pi * beta / 2.0) / math.pi
    with np.errstate(divide='ignore', invalid='ignore'):
        tail = tail_const * np.abs(z) ** (-beta)
    return np.where(z > grid[-1], 1.0 - tail, np.where(z < grid[0], tail, inner))


def standard_symmetric_stable_sample(beta: float, rng: np.random.Generator, size=None):
    """Chambers-Mallows-Stuck draws with characteristic function exp(-|k|^beta)"""
    if not (0.0 < beta <= 2.0):
        raise DomainError(f"beta must lie in (0,2], got {beta}")
    phi = rng.uniform(-math.pi / 2.0, math.pi / 2.0, size=size)
    w = rng.standard_exponential(size=size)
    return (np.sin(beta * phi) / np.cos(phi) ** (1.0 / beta)
            * (np.cos((1.0 - beta) * phi) / w) ** ((1.0 - beta) / beta))


def levy_sample(fam: LevyFamily, u, rng: np.random.Generator, size=None):
    """Exact draws of A_u; u may be an array (one draw per entry), u = 0 gives exactly 0"""
    u = np.asarray(u, dtype=float)
    if np.any(u < 0.0) or np.any(~np.isfinite(u)):
        raise DomainError("u must be finite and nonnegative")
    shape = u.shape if size is None else size
    ub = np.broadcast_to(u, shape)

    if fam.kind == "brownian":
        draw = fam.mu * ub + np.sqrt(fam.A * ub) * rng.standard_normal(shape)
    elif fam.kind == "symmetric_stable":
        draw = (fam.scale * ub) ** (1.0 / fam.beta) * standard_symmetric_stable_sample(fam.beta, rng, shape)
    elif fam.kind == "poisson":
        draw = rng.poisson(fam.lam * ub).astype(float)
    elif fam.kind == "compound_poisson":
        jumps = rng.poisson(fam.lam * ub)
        if fam.jump_law == "normal":
            m, s = fam.jump_params
            draw = m * jumps + s * np.sqrt(jumps) * rng.standard_normal(shape)
        else:
            rate = fam.jump_params[0]
            draw = np.where(jumps > 0, rng.gamma(np.maximum(jumps, 1), 1.0 / rate), 0.0)
    else:
        raise UnsupportedFamilyError(f"Unsupported family: {fam.kind!r}")

    out = np.where(ub > 0.0, draw, 0.0)
    return float(out) if out.ndim == 0 else out


def levy_path(fam: LevyFamily, u_grid, rng: np.random.Generator) -> np.ndarray:
    """A on an increasing grid via independent stationary increments"""
    u_grid = np.asarray(u_grid, dtype=float)
    if u_grid.ndim != 1 or np.any(np.diff(u_grid) < 0.0) or (u_grid.size and u_grid[0] < 0.0):
        raise DomainError("u_grid must be a nondecreasing grid of nonnegative reals")
    steps = np.diff(u_grid, prepend=0.0)
    return np.cumsum(levy_sample(fam, steps, rng))


# SUBORDINATOR AND ITS INVERSE

class InversePoint(NamedTuple):
    e_t: object
    r_t: object
    v_t: object
    d_at_e: object


@dataclass(frozen=True)
class SubordinatorPath:
    """D on the grid u_k = k du; d_values has one row per replicate when batched"""
    u_grid: np.ndarray
    d_values: np.ndarray
    params: AlphaScale
    seed: Optional[int] = None

    @property
    def du(self) -> float:
        return float(self.u_grid[1] - self.u_grid[0])

    @property
    def horizon(self):
        return self.d_values[..., -1]

    def inverse_at(self, t: float) -> InversePoint:
        """Right-continuous inversion: first grid u with D_u > t"""
        if not (t >= 0.0):
            raise DomainError(f"t must be nonnegative, got {t}")
        d = np.atleast_2d(self.d_values)
        if np.any(d[:, -1] <= t):
            raise HorizonError(f"path horizon {d[:, -1].min():.6g} does not exceed t={t}; extend u_max")
        idx = np.argmax(d > t, axis=1)
        rows = np.arange(d.shape[0])
        e_t = self.u_grid[idx]
        d_at = d[rows, idx]
        before = d[rows, idx - 1]
        point = InversePoint(e_t, d_at - t, t - before, d_at)
        if self.d_values.ndim == 1:
            return InversePoint(*(float(v[0]) for v in point))
        return point


def horizon_for(params: AlphaScale, t_total: float, tail: Optional[float] = None) -> float:
    """u_max with P(D_{u_max} < t_total) = tail"""
    tail = TOLERANCES.horizon_tail if tail is None else tail
    if not t_total > 0:
        raise DomainError(f"t_total must be positive, got {t_total}")
    q = stable_quantile_onesided(params.alpha, tail)
    return (t_total / q) ** params.alpha / params.c


def subordinator_path(params: AlphaScale, du: float, u_max: float, rng: np.random.Generator,
                      n_paths: Optional[int] = None, seed: Optional[int] = None) -> SubordinatorPath:
    """Increments (c du)^(1/alpha) S, D_0 = 0"""
    if not du > 0 or not u_max >= du:
        raise DomainError(f"need du > 0 and u_max >= du, got du={du}, u_max={u_max}")
    m = int(math.ceil(u_max / du - 1e-9))
    u_grid = du * np.arange(m + 1)
    shape = (m,) if n_paths is None else (n_paths, m)
    increments = (params.c * du) ** (1.0 / params.alpha) * onesided_stable_sample(params.alpha, rng, shape)
    zeros = np.zeros(shape[:-1] + (1,))
    d_values = np.concatenate([zeros, np.cumsum(increments, axis=-1)], axis=-1)
    return SubordinatorPath(u_grid, d_values, params, seed)


class FirstPassage(NamedTuple):
    e: np.ndarray
    d_at: np.ndarray
    d_before: np.ndarray


def first_passage(params: AlphaScale, levels, du: float, rng: np.random.Generator,
                  n: int, block: Optional[int] = None) -> FirstPassage:
    """
    Grid passage data for n independent paths across each level, simulated
    block by block so memory stays O(n * block). The path keeps growing
    from the same stream until every level is crossed.
    """
    levels = np.asarray(levels, dtype=float)
    if levels.ndim == 1:
        levels = np.broadcast_to(levels, (n, levels.size))
    if levels.shape[0] != n or np.any(levels < 0.0):
        raise DomainError("levels must be nonnegative with one row per path")
    n_levels = levels.shape[1]
    block = block or int(max(16, min(256, 4_000_000 // max(n, 1))))
    scale = (params.c * du) ** (1.0 / params.alpha)
    max_steps = 100 * int(math.ceil(horizon_for(params, float(levels.max()) or du) / du)) + block

    e = np.full((n, n_levels), np.nan)
    d_at = np.full((n, n_levels), np.nan)
    d_before = np.full((n, n_levels), np.nan)
    done = np.zeros((n, n_levels), dtype=bool)
    current = np.zeros(n)
    step = 0
    while not done.all():
        if step > max_steps:
            raise HorizonError(f"paths failed to pass level {levels.max():.6g} within {step} steps")
        inc = scale * onesided_stable_sample(params.alpha, rng, (n, block))
        path = current[:, None] + np.cumsum(inc, axis=1)
        prev = np.concatenate([current[:, None], path[:, :-1]], axis=1)
        for j in range(n_levels):
            hit = ~done[:, j] & (path[:, -1] > levels[:, j])
            if not hit.any():
                continue
            rows = np.nonzero(hit)[0]
            idx = np.argmax(path[rows] > levels[rows, j, None], axis=1)
            e[rows, j] = (step + idx + 1) * du
            d_at[rows, j] = path[rows, idx]
            d_before[rows, j] = prev[rows, idx]
            done[rows, j] = True
        current = path[:, -1]
        step += block
    return FirstPassage(e, d_at, d_before)


def inverse_marginal_sample(params: AlphaScale, t, rng: np.random.Generator, size=None):
    """Exact single-time draws E_t = (t/S)^alpha / c"""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0.0) or np.any(~np.isfinite(t)):
        raise DomainError("t must be finite and nonnegative")
    shape = t.shape if size is None else size
    s = onesided_stable_sample(params.alpha, rng, shape)
    out = (np.broadcast_to(t, shape) / s) ** params.alpha / params.c
    return float(out) if np.ndim(out) == 0 else out


# LIMIT PROCESS AND AGING INCREMENTS

def ctrwl_sample(fam: LevyFamily, params: AlphaScale, t: float, rng: np.random.Generator, size=None):
    """Y_t = A_{E_t}: E_t exactly, then A at that time by independence"""
    if not t > 0:
        raise DomainError(f"t must be positive, got {t}")
    u = inverse_marginal_sample(params, t, rng, size)
    return levy_sample(fam, u, rng)


def aging_increment_sample(fam: LevyFamily, params: AlphaScale, t0: float, times,
                           rng: np.random.Generator, n: Optional[int] = None,
                           du: Optional[float] = None) -> np.ndarray:
    """
    Joint draws of (Y^t0_{t_1}, ..., Y^t0_{t_k}) from one subordinator path
    per replicate. A-increments are drawn exactly over the E-increments.
    Returns shape (k,) for a single replicate, (n, k) otherwise.
    """
    times = np.atleast_1d(np.asarray(times, dtype=float))
    if times.size == 0 or np.any(times <= 0.0) or np.any(np.diff(times) <= 0.0):
        raise DomainError("times must be nonempty, positive and strictly increasing")
    if not t0 >= 0.0:
        raise DomainError(f"t0 must be nonnegative, got {t0}")
    rows = 1 if n is None else int(n)
    total = t0 + times[-1]
    du = du or TOLERANCES.du_fraction * horizon_for(params, total)

    levels = t0 + times if t0 == 0.0 else np.concatenate([[t0], t0 + times])
    passage = first_passage(params, levels, du, rng, rows)
    if t0 == 0.0:
        clock = np.column_stack([np.zeros(rows), passage.e])
    else:
        clock = passage.e
    increments = levy_sample(fam, np.diff(clock, axis=1), rng)
    values = np.cumsum(increments, axis=1)
    return values[0] if n is None else values


def aging_increment_renewal_sample(fam: LevyFamily, params: AlphaScale, t0: float, t: float,
                                   rng: np.random.Generator, size=None):
    """
    Exact one-time aging increments from the regeneration at D_{E_t0}:
    zero when R_t0 >= t, otherwise a fresh un-aged Y over the remaining time t - R_t0.
    """
    if not (t > 0 and t0 >= 0):
        raise DomainError(f"need t > 0 and t0 >= 0, got t={t}, t0={t0}")
    shape = () if size is None else size
    if t0 > 0.0:
        r = np.asarray(aging_kernel_sample(AgingKernel(params.alpha, t0), rng, shape))
    else:
        r = np.zeros(shape)
    remaining = np.maximum(t - r, 0.0)
    clock = inverse_marginal_sample(params, remaining, rng, shape)
    y = np.where(r < t, levy_sample(fam, clock, rng), 0.0)
    return float(y) if np.ndim(y) == 0 else y


def fpp_renewal_sample(alpha: float, lam: float, t: float, rng: np.random.Generator, size=None):
    """Fractional Poisson counts N_t from Mittag-Leffler interarrival times"""
    if not t > 0:
        raise DomainError(f"t must be positive, got {t}")
    n = 1 if size is None else int(np.prod(size))
    counts = np.zeros(n, dtype=np.int64)
    clock = np.zeros(n)
    active = np.ones(n, dtype=bool)
    while active.any():
        waits = ml_waiting_sample(alpha, lam, rng, n)
        clock = np.where(active, clock + waits, clock)
        arrived = active & (clock <= t)
        counts += arrived
        active = arrived
    if size is None:
        return int(counts[0])
    return counts.reshape(size)


# SAMPLE SETS

META_KEYS = ("process", "alpha", "c", "t0", "t", "seed")


@dataclass(frozen=True)
class SampleSet:
    """i.i.d. draws with their provenance"""
    values: np.ndarray
    meta: Mapping[str, object] = field(default_factory=dict)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float).ravel().copy()
        values.flags.writeable = False
        meta = dict(self.meta)
        meta['n'] = int(values.size)
        object.__setattr__(self, 'values', values)
        object.__setattr__(self, 'meta', MappingProxyType(meta))

    @classmethod
    def create(cls, values, process: str, alpha: float, c: float, t0: float, t: float,
               seed: int, **extra) -> "SampleSet":
        meta = {'process': process, 'alpha': alpha, 'c': c, 't0': t0, 't': t, 'seed': seed}
        meta.update(extra)
        return cls(values, meta)

    @property
    def n(self) -> int:
        return int(self.values.size)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({'value': self.values})

    def to_csv(self, path) -> None:
        """Two comment lines (meta keys, meta values), then a 'value' column; LF endings"""
        keys = list(META_KEYS) + sorted(k for k in self.meta if k not in META_KEYS)
        with open(path, 'w', newline='\n', encoding='utf-8') as handle:
            handle.write('# ' + ','.join(keys) + '\n')
            handle.write('# ' + ','.join(_format_meta(self.meta.get(k, '')) for k in keys) + '\n')
            self.to_frame().to_csv(handle, index=False, lineterminator='\n', float_format='%.17g')

    @classmethod
    def from_csv(cls, path) -> "SampleSet":
        with open(path, 'r', encoding='utf-8') as handle:
            keys = handle.readline()[2:].strip().split(',')
            raw = handle.readline()[2:].strip().split(',')
        meta = {k: _parse_meta(v) for k, v in zip(keys, raw)}
        frame = pd.read_csv(path, comment='#')
        return cls(frame['value'].to_numpy(dtype=float), meta)


def _format_meta(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _parse_meta(raw: str):
    for cast in (int, float):
        try:
            return cast(raw)
        except ValueError:
            continue
    return raw
