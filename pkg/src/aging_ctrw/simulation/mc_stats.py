# src/aging_ctrw/simulation/mc_stats.py
"""
Statistical machinery for the verification routes: seeded streams,
empirical distributions with atom bookkeeping, KS and chi-square tests,
binomial intervals and replicate batching.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, Optional, Sequence, Tuple

import numpy as np
from scipy import stats

from ..exceptions import AtomContaminationError, DomainError
from ..utils.config import TOLERANCES


@dataclass(frozen=True)
class StreamSpec:
    """(master_seed, stream_id) -> independent Philox stream"""
    master_seed: int
    stream_id: int = 0

    def __post_init__(self):
        if not (0 <= int(self.master_seed) < 2 ** 64):
            raise DomainError(f"master_seed must be a 64-bit unsigned integer, got {self.master_seed}")
        if int(self.stream_id) < 0:
            raise DomainError(f"stream_id must be nonnegative, got {self.stream_id}")

    def seed_sequence(self) -> np.random.SeedSequence:
        return np.random.SeedSequence(entropy=int(self.master_seed), spawn_key=(int(self.stream_id),))

    def generator(self) -> np.random.Generator:
        return np.random.Generator(np.random.Philox(self.seed_sequence()))


def stream(master_seed: int, stream_id: int = 0) -> np.random.Generator:
    return StreamSpec(master_seed, stream_id).generator()


@dataclass(frozen=True)
class EmpiricalDist:
    """Sorted sample with exact zeros counted separately"""
    values: np.ndarray
    zero_count: int = 0
    separate_zeros: bool = field(default=True)

    @classmethod
    def from_samples(cls, samples, separate_zeros: bool = True) -> "EmpiricalDist":
        arr = np.asarray(samples, dtype=float).ravel()
        if np.any(~np.isfinite(arr)):
            raise DomainError("samples must be finite")
        if separate_zeros:
            zeros = int(np.count_nonzero(arr == 0.0))
            arr = arr[arr != 0.0]
        else:
            zeros = 0
        values = np.sort(arr)
        values.flags.writeable = False
        return cls(values=values, zero_count=zeros, separate_zeros=separate_zeros)

    @property
    def n(self) -> int:
        return int(self.values.size) + self.zero_count

    @property
    def all_values(self) -> np.ndarray:
        if not self.zero_count:
            return self.values
        return np.sort(np.concatenate([self.values, np.zeros(self.zero_count)]))

    @property
    def zero_fraction(self) -> float:
        return self.zero_count / self.n if self.n else 0.0

    def ecdf(self, x):
        """Empirical cdf of the full sample, zeros included"""
        full = self.all_values
        return np.searchsorted(full, np.asarray(x, dtype=float), side='right') / max(full.size, 1)


def _vectorized(cdf: Callable) -> Callable:
    def wrapped(x):
        try:
            return np.asarray(cdf(x), dtype=float)
        except (TypeError, ValueError):
            return np.asarray([cdf(float(v)) for v in np.ravel(x)], dtype=float)
    return wrapped


def ks_one_sample(e: EmpiricalDist, cdf: Callable) -> Tuple[float, float]:
    """Sup-distance and asymptotic Kolmogorov p-value against a continuous cdf"""
    if e.zero_count > 0:
        raise AtomContaminationError(
            f"{e.zero_count} exact zeros in a sample tested against a continuous cdf; "
            "split the atom off before testing")
    if e.n < TOLERANCES.ks_min_n:
        raise DomainError(f"KS test needs at least {TOLERANCES.ks_min_n} values, got {e.n}")
    result = stats.kstest(e.values, _vectorized(cdf), method='asymp')
    return float(result.statistic), float(result.pvalue)


def ks_two_sample(a: EmpiricalDist, b: EmpiricalDist) -> Tuple[float, float]:
    """
    Two-sample KS on the full samples (zeros included). Ties are handled by
    evaluating both empirical cdfs on the pooled sample, so tied values move
    both cdfs together.
    """
    if a.n == 0 or b.n == 0:
        raise DomainError("two-sample KS needs nonempty samples")
    result = stats.ks_2samp(a.all_values, b.all_values, method='asymp')
    return float(result.statistic), float(result.pvalue)


def binomial_ci(k: int, n: int, level: float = 0.95) -> Tuple[float, float]:
    """Wilson score interval"""
    if n <= 0 or not (0 <= k <= n):
        raise DomainError(f"need 0 <= k <= n and n > 0, got k={k}, n={n}")
    if not (0.0 < level < 1.0):
        raise DomainError(f"level must lie in (0,1), got {level}")
    z = stats.norm.ppf(0.5 + level / 2.0)
    p = k / n
    denom = 1.0 + z * z / n
    center = (p + z * z / (2.0 * n)) / denom
    half = z * math.sqrt(p * (1.0 - p) / n + z * z / (4.0 * n * n)) / denom
    return max(0.0, center - half), min(1.0, center + half)


def binomial_sigma(p: float, n: int) -> float:
    return math.sqrt(max(p * (1.0 - p), 0.0) / n)


def _merge_sparse(observed: np.ndarray, expected: np.ndarray, minimum: float):
    obs_out, exp_out = [], []
    acc_o, acc_e = 0.0, 0.0
    for o, e in zip(observed, expected):
        acc_o += o
        acc_e += e
        if acc_e >= minimum:
            obs_out.append(acc_o)
            exp_out.append(acc_e)
            acc_o, acc_e = 0.0, 0.0
    if acc_e > 0.0 or acc_o > 0.0:
        if exp_out:
            obs_out[-1] += acc_o
            exp_out[-1] += acc_e
        else:
            obs_out.append(acc_o)
            exp_out.append(acc_e)
    return np.asarray(obs_out), np.asarray(exp_out)


def chi_square_counts(observed: Sequence[float], expected: Sequence[float]) -> Tuple[float, float]:
    """Pearson goodness of fit; expected rescaled to the observed total, sparse bins merged"""
    obs = np.asarray(observed, dtype=float)
    exp = np.asarray(expected, dtype=float)
    if obs.size == 0 or obs.shape != exp.shape:
        raise DomainError("observed and expected must be nonempty and of equal length")
    if exp.sum() <= 0.0:
        raise DomainError("expected counts must have positive total")
    exp = exp * obs.sum() / exp.sum()
    obs, exp = _merge_sparse(obs, exp, TOLERANCES.chi_square_min_expected)
    if obs.size < 2:
        return 0.0, 1.0
    result = stats.chisquare(obs, exp)
    return float(result.statistic), float(result.pvalue)


def chi_square_two_sample(a: Sequence[int], b: Sequence[int]) -> Tuple[float, float]:
    """Homogeneity test for two samples of counts (2 x K contingency table)"""
    a = np.asarray(a, dtype=np.int64).ravel()
    b = np.asarray(b, dtype=np.int64).ravel()
    if a.size == 0 or b.size == 0:
        raise DomainError("chi-square needs nonempty samples")
    support = np.union1d(a, b)
    count_a = np.array([np.count_nonzero(a == v) for v in support], dtype=float)
    count_b = np.array([np.count_nonzero(b == v) for v in support], dtype=float)
    rows_a, rows_b, acc_a, acc_b = [], [], 0.0, 0.0
    for ca, cb in zip(count_a, count_b):
        acc_a += ca
        acc_b += cb
        if acc_a + acc_b >= 2.0 * TOLERANCES.chi_square_min_expected:
            rows_a.append(acc_a)
            rows_b.append(acc_b)
            acc_a, acc_b = 0.0, 0.0
    if acc_a or acc_b:
        if rows_a:
            rows_a[-1] += acc_a
            rows_b[-1] += acc_b
        else:
            rows_a.append(acc_a)
            rows_b.append(acc_b)
    if len(rows_a) < 2:
        return 0.0, 1.0
    stat, p_value, _, _ = stats.chi2_contingency(np.array([rows_a, rows_b]), correction=False)
    return float(stat), float(p_value)


def two_proportion_test(k1: int, n1: int, k2: int, n2: int) -> Tuple[float, float]:
    """Pooled z-test for equal proportions; returns (z, two-sided p)"""
    if n1 <= 0 or n2 <= 0:
        raise DomainError("sample sizes must be positive")
    pooled = (k1 + k2) / (n1 + n2)
    se = math.sqrt(pooled * (1.0 - pooled) * (1.0 / n1 + 1.0 / n2))
    if se == 0.0:
        return 0.0, 1.0
    z = (k1 / n1 - k2 / n2) / se
    return float(z), float(2.0 * stats.norm.sf(abs(z)))


def bonferroni_level(level: float, m: int) -> float:
    if m < 1:
        raise DomainError("number of tests must be positive")
    return level / m


def summarize_heavy_tailed(values, trim: float = 0.01) -> Dict:
    """Quantiles and a trimmed mean; raw means are never reported for heavy-tailed samples"""
    arr = np.asarray(values, dtype=float).ravel()
    if arr.size == 0:
        raise DomainError("cannot summarize an empty sample")
    qs = np.quantile(arr, [0.01, 0.1, 0.25, 0.5, 0.75, 0.9, 0.99])
    hi = np.quantile(arr, 1.0 - trim)
    lo = np.quantile(arr, trim)
    kept = arr[(arr >= lo) & (arr <= hi)]
    return {
        'n': int(arr.size),
        'zero_fraction': float(np.count_nonzero(arr == 0.0) / arr.size),
        'quantiles': {f"q{p:g}": float(v) for p, v in zip((1, 10, 25, 50, 75, 90, 99), qs)},
        'trimmed_mean': math.fsum(kept) / kept.size if kept.size else float('nan'),
        'trim': trim,
    }


def run_replicates(fn: Callable[[np.random.Generator, int], np.ndarray], n: int, master_seed: int,
                   batch_size: Optional[int] = None, threads: int = 1, stream_offset: int = 0) -> np.ndarray:
    """
    Run fn(rng, size) over n replicates in batches. Batch j draws from stream
    stream_offset + j and results are concatenated in batch order, so the
    output does not depend on the thread count.
    """
    if n <= 0:
        raise DomainError(f"n must be positive, got {n}")
    batch_size = batch_size or n
    sizes = [min(batch_size, n - start) for start in range(0, n, batch_size)]

    def work(job):
        j, size = job
        return np.asarray(fn(StreamSpec(master_seed, stream_offset + j).generator(), size))

    jobs = list(enumerate(sizes))
    if threads <= 1 or len(jobs) == 1:
        parts = [work(job) for job in jobs]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(work, jobs))
    return np.concatenate(parts, axis=0)
