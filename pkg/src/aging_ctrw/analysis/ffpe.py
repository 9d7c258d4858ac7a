# src/aging_ctrw/analysis/ffpe.py
"""
Aged fractional Fokker-Planck equation.

The density C(x, t) of X_0 + Y^t0_t solves
    Caputo_t^alpha C = L (C - p(x) P(R_t0 > t)),   C(x, 0) = p(x).
With u = C - p this reads D^alpha u = L u + F_t0(t) L p, F_t0 the kernel cdf,
which is stepped explicitly with Grunwald memory in time and a dense
generator matrix in space. Reference routes: the subordination mixture for
the un-aged density, the kernel convolution for the aged one, a Monte Carlo
histogram, and the Fourier-Laplace transform of the gridded densities
against its closed form.
"""

import math
import struct
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional, Tuple

import numpy as np
import pandas as pd
from scipy import integrate, linalg, signal, special

from ..exceptions import DomainError, InstabilityError, UnsupportedFamilyError
from ..laws.dist import AgingKernel, aging_kernel_laplace
from ..laws.special_fn import AlphaScale, gauss_legendre, subordination_rule
from ..simulation.mc_stats import run_replicates
from ..simulation.process import LevyFamily, aging_increment_renewal_sample, ctrwl_sample
from ..utils.config import TOLERANCES
from ..utils.logger import app_logger
from .aging import kernel_rule, zero_atom
from .frac_calc import grunwald_weights, levy_symbol

BINARY_MAGIC = b'AGDN'
BINARY_VERSION = 1
BINARY_DTYPE = b'f8le'


def make_x_grid(dx: float = 0.2, x_max: float = 8.0) -> np.ndarray:
    """Symmetric grid of odd length centred on 0"""
    if not (dx > 0 and x_max > dx):
        raise DomainError(f"need 0 < dx < x_max, got dx={dx}, x_max={x_max}")
    m = int(round(x_max / dx))
    return dx * np.arange(-m, m + 1)


def _check_x_grid(x_grid: np.ndarray) -> float:
    x_grid = np.asarray(x_grid, dtype=float)
    if x_grid.ndim != 1 or x_grid.size < 3 or x_grid.size % 2 == 0:
        raise DomainError("x_grid must be 1-D of odd length")
    dx = float(x_grid[1] - x_grid[0])
    if not np.allclose(np.diff(x_grid), dx, rtol=1e-9, atol=0.0) or abs(x_grid[x_grid.size // 2]) > 1e-9 * dx:
        raise DomainError("x_grid must be uniform and centred on 0")
    return dx


# GRID DENSITIES

@dataclass(frozen=True)
class GridDensity:
    """
    Cell averages values[i, j] over [x_j - dx/2, x_j + dx/2] at time t_grid[i],
    plus an explicit atom at x = 0.
    """
    x_grid: np.ndarray
    t_grid: np.ndarray
    values: np.ndarray
    atom_mass: Optional[np.ndarray] = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        x = np.asarray(self.x_grid, dtype=float)
        t = np.atleast_1d(np.asarray(self.t_grid, dtype=float))
        v = np.atleast_2d(np.asarray(self.values, dtype=float))
        if v.shape != (t.size, x.size):
            raise DomainError(f"values shape {v.shape} does not match ({t.size}, {x.size})")
        atom = np.zeros(t.size) if self.atom_mass is None else np.atleast_1d(np.asarray(self.atom_mass, dtype=float))
        if atom.shape != t.shape:
            raise DomainError("atom_mass needs one entry per time")
        object.__setattr__(self, 'x_grid', x)
        object.__setattr__(self, 't_grid', t)
        object.__setattr__(self, 'values', v)
        object.__setattr__(self, 'atom_mass', atom)

    @property
    def dx(self) -> float:
        return float(self.x_grid[1] - self.x_grid[0])

    @property
    def edges(self) -> np.ndarray:
        return np.append(self.x_grid - 0.5 * self.dx, self.x_grid[-1] + 0.5 * self.dx)

    def mass(self) -> np.ndarray:
        return self.values.sum(axis=1) * self.dx + self.atom_mass

    def min_value(self) -> float:
        return float(self.values.min())

    def at(self, t: float) -> "GridDensity":
        i = int(np.argmin(np.abs(self.t_grid - t)))
        return GridDensity(self.x_grid, self.t_grid[i:i + 1], self.values[i:i + 1],
                           self.atom_mass[i:i + 1], dict(self.meta))

    def l1_distance(self, other: "GridDensity", index: int = -1, other_index: int = -1) -> float:
        """sum |a - b| dx over the cells plus the atom difference"""
        if self.x_grid.size != other.x_grid.size or not np.allclose(self.x_grid, other.x_grid):
            raise DomainError("L1 distance needs a common x grid")
        diff = np.abs(self.values[index] - other.values[other_index]).sum() * self.dx
        return float(diff + abs(self.atom_mass[index] - other.atom_mass[other_index]))

    def convolve(self, initial: "InitialDensity") -> "GridDensity":
        """Law of X_0 + Y with X_0 ~ initial; the atom is spread by the initial density"""
        if initial.x_grid.size != self.x_grid.size:
            raise DomainError("convolution needs a common x grid")
        rows = [signal.fftconvolve(row, initial.p, mode='same') * self.dx + atom * initial.p
                for row, atom in zip(self.values, self.atom_mass)]
        return GridDensity(self.x_grid, self.t_grid, np.array(rows), np.zeros_like(self.atom_mass),
                           dict(self.meta))

    # I/O

    def to_frame(self) -> pd.DataFrame:
        xs = np.tile(self.x_grid, self.t_grid.size)
        ts = np.repeat(self.t_grid, self.x_grid.size)
        body = pd.DataFrame({'x': ['%.17g' % x for x in xs], 't': ts, 'value': self.values.ravel()})
        atoms = pd.DataFrame({'x': 'atom', 't': self.t_grid, 'value': self.atom_mass})
        return pd.concat([body, atoms], ignore_index=True)

    def to_csv(self, path, header_comment: Optional[str] = None) -> None:
        """Columns x, t, value; atom rows carry x = atom"""
        with open(path, 'w', newline='\n', encoding='utf-8') as handle:
            if header_comment:
                handle.write(f"# {header_comment}\n")
            self.to_frame().to_csv(handle, index=False, lineterminator='\n', float_format='%.17g')

    @classmethod
    def from_csv(cls, path) -> "GridDensity":
        frame = pd.read_csv(path, comment='#', dtype={'x': str})
        atoms = frame[frame['x'] == 'atom']
        body = frame[frame['x'] != 'atom']
        t_grid = np.unique(body['t'].to_numpy(dtype=float))
        x_grid = np.unique(body['x'].astype(float).to_numpy())
        values = body['value'].to_numpy(dtype=float).reshape(t_grid.size, x_grid.size)
        atom = atoms.set_index('t')['value'].reindex(t_grid).to_numpy(dtype=float)
        return cls(x_grid, t_grid, values, np.nan_to_num(atom))

    def to_binary(self, path) -> None:
        """magic 'AGDN', u32 version, u32 nt, u32 nx, 4-byte dtype tag, then x, t, atom, values row-major"""
        nt, nx = self.values.shape
        with open(path, 'wb') as handle:
            handle.write(BINARY_MAGIC)
            handle.write(struct.pack('<III', BINARY_VERSION, nt, nx))
            handle.write(BINARY_DTYPE)
            for block in (self.x_grid, self.t_grid, self.atom_mass, self.values):
                handle.write(np.ascontiguousarray(block, dtype='<f8').tobytes())

    @classmethod
    def from_binary(cls, path) -> "GridDensity":
        with open(path, 'rb') as handle:
            raw = handle.read()
        if raw[:4] != BINARY_MAGIC:
            raise DomainError(f"{path} is not a grid density file")
        version, nt, nx = struct.unpack('<III', raw[4:16])
        if version != BINARY_VERSION or raw[16:20] != BINARY_DTYPE:
            raise DomainError(f"unsupported grid density version {version} / dtype {raw[16:20]!r}")
        payload = np.frombuffer(raw, dtype='<f8', offset=20)
        if payload.size != nx + 2 * nt + nt * nx:
            raise DomainError("truncated grid density payload")
        x_grid = payload[:nx]
        t_grid = payload[nx:nx + nt]
        atom = payload[nx + nt:nx + 2 * nt]
        values = payload[nx + 2 * nt:].reshape(nt, nx)
        return cls(x_grid.copy(), t_grid.copy(), values.copy(), atom.copy())


@dataclass(frozen=True)
class InitialDensity:
    """Cell averages p on the x grid, nonnegative with unit mass"""
    x_grid: np.ndarray
    p: np.ndarray

    def __post_init__(self):
        dx = _check_x_grid(self.x_grid)
        p = np.asarray(self.p, dtype=float)
        if p.shape != np.shape(self.x_grid):
            raise DomainError("p must live on the x grid")
        if np.any(p < 0.0):
            raise DomainError("initial density must be nonnegative")
        if abs(p.sum() * dx - 1.0) > 1e-6:
            raise DomainError(f"initial density has mass {p.sum() * dx:.8f}, expected 1")
        object.__setattr__(self, 'x_grid', np.asarray(self.x_grid, dtype=float))
        object.__setattr__(self, 'p', p)

    @property
    def dx(self) -> float:
        return float(self.x_grid[1] - self.x_grid[0])

    @classmethod
    def narrow_gaussian(cls, x_grid, sigma: float = 0.05, center: float = 0.0) -> "InitialDensity":
        """Cell averages of N(center, sigma^2), renormalized on the grid"""
        if not sigma > 0:
            raise DomainError(f"sigma must be positive, got {sigma}")
        x_grid = np.asarray(x_grid, dtype=float)
        dx = _check_x_grid(x_grid)
        edges = np.append(x_grid - 0.5 * dx, x_grid[-1] + 0.5 * dx)
        cells = np.diff(special.ndtr((edges - center) / sigma))
        return cls(x_grid, cells / (cells.sum() * dx))

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        """Draws from the piecewise-constant density"""
        cell = rng.choice(self.x_grid.size, size=size, p=self.p / self.p.sum())
        return self.x_grid[cell] + self.dx * (rng.uniform(size=size) - 0.5)


# REFERENCE ROUTES

def _require_density(fam: LevyFamily):
    if not fam.has_density:
        raise UnsupportedFamilyError(f"{fam.kind} is a lattice or atomic law; use the probability routes")


def _mixture_cdf(fam: LevyFamily, params: AlphaScale, s: float, edges: np.ndarray) -> np.ndarray:
    """P(Y_s <= edge) for every edge, by the subordination rule"""
    nodes, weights = subordination_rule(params.alpha)
    u = (s ** params.alpha * nodes / params.c)[:, None]
    return weights @ fam.cdf(edges[None, :], u)


def _cell_averages(fam: LevyFamily, params: AlphaScale, s: float, edges: np.ndarray) -> np.ndarray:
    dx = edges[1] - edges[0]
    return np.diff(_mixture_cdf(fam, params, s, edges)) / dx


def reference_density(fam: LevyFamily, params: AlphaScale, t: float,
                      x_grid: Optional[np.ndarray] = None) -> GridDensity:
    """Cell-averaged density of Y_t = A_{E_t}"""
    _require_density(fam)
    if not t > 0:
        raise DomainError(f"t must be positive, got {t}")
    x_grid = make_x_grid() if x_grid is None else np.asarray(x_grid, dtype=float)
    _check_x_grid(x_grid)
    edges = np.append(x_grid - 0.5 * (x_grid[1] - x_grid[0]), x_grid[-1] + 0.5 * (x_grid[1] - x_grid[0]))
    values = _cell_averages(fam, params, t, edges)
    return GridDensity(x_grid, [t], values[None, :], meta={'route': 'reference', 't0': 0.0})


def aged_density(fam: LevyFamily, params: AlphaScale, t0: float, t: float,
                 x_grid: Optional[np.ndarray] = None, nodes: Optional[int] = None) -> GridDensity:
    """Density part nu(x, t) = int_0^t p0(x, t-r) p_t0(r) dr and the atom P(Y^t0_t = 0)"""
    _require_density(fam)
    if t0 == 0.0:
        return reference_density(fam, params, t, x_grid)
    if not (t > 0 and t0 > 0):
        raise DomainError(f"need t > 0 and t0 >= 0, got t={t}, t0={t0}")
    x_grid = make_x_grid() if x_grid is None else np.asarray(x_grid, dtype=float)
    _check_x_grid(x_grid)
    dx = float(x_grid[1] - x_grid[0])
    edges = np.append(x_grid - 0.5 * dx, x_grid[-1] + 0.5 * dx)
    s_nodes, weights = kernel_rule(params.alpha, float(t), float(t0), nodes)
    values = np.zeros(x_grid.size)
    for s, w in zip(s_nodes, weights):
        if s > 0.0:
            values += w * _cell_averages(fam, params, float(s), edges)
    atom = zero_atom(fam, params.alpha, t, t0, params.c)
    return GridDensity(x_grid, [t], values[None, :], [atom], meta={'route': 'convolution', 't0': t0})


def convolution_route(fam: LevyFamily, params: AlphaScale, t0: float, initial: InitialDensity,
                      t: float) -> GridDensity:
    """Law of X_0 + Y^t0_t as f * (nu + atom delta_0)"""
    return aged_density(fam, params, t0, t, initial.x_grid).convolve(initial)


def mc_histogram_route(fam: LevyFamily, params: AlphaScale, t0: float, initial: InitialDensity,
                       t: float, n: int, seed: int, batch_size: Optional[int] = None,
                       threads: int = 1) -> GridDensity:
    """Histogram of X_0 + Y^t0_t from exact renewal draws"""
    def draw(rng, size):
        x0 = initial.sample(rng, size)
        if t0 > 0.0:
            return x0 + aging_increment_renewal_sample(fam, params, t0, t, rng, size)
        return x0 + ctrwl_sample(fam, params, t, rng, size)

    values = run_replicates(draw, n, seed, batch_size, threads)
    dx = initial.dx
    edges = np.append(initial.x_grid - 0.5 * dx, initial.x_grid[-1] + 0.5 * dx)
    counts, _ = np.histogram(values, bins=edges)
    return GridDensity(initial.x_grid, [t], (counts / (n * dx))[None, :], meta={'route': 'monte_carlo', 'n': n})


# SOLVER

def generator_matrix(fam: LevyFamily, x_grid) -> np.ndarray:
    """
    Dense forward generator on the grid with absorbing truncation:
    brownian -mu d/dx + (A/2) d2/dx2 by central differences; symmetric
    stable -sigma (-Laplacian)^(beta/2) by the symmetric Grunwald
    combination, shifted for beta in (1,2] and unshifted for beta < 1.
    """
    x_grid = np.asarray(x_grid, dtype=float)
    dx = _check_x_grid(x_grid)
    nx = x_grid.size
    if fam.kind == "brownian":
        diffusion = 0.5 * fam.A / dx ** 2
        drift = fam.mu / (2.0 * dx)
        col = np.zeros(nx)
        row = np.zeros(nx)
        col[0] = row[0] = -2.0 * diffusion
        col[1] = diffusion + drift
        row[1] = diffusion - drift
        return linalg.toeplitz(col, row)
    if fam.kind == "symmetric_stable":
        beta = fam.beta
        if beta == 1.0:
            raise UnsupportedFamilyError("beta = 1 has no Grunwald discretization of this form")
        g = _grunwald_coefficients(beta, nx + 1)
        col = np.zeros(nx)
        row = np.zeros(nx)
        if beta > 1.0:
            col[:] = g[1:nx + 1]
            row[0] = g[1]
            row[1] = g[0]
        else:
            col[:] = g[:nx]
            row[0] = g[0]
        forward = linalg.toeplitz(col, row)
        coef = -fam.scale / (2.0 * math.cos(math.pi * beta / 2.0)) * dx ** (-beta)
        return coef * (forward + forward.T)
    raise UnsupportedFamilyError(f"no spatial generator for {fam.kind}")


def _grunwald_coefficients(order: float, n: int) -> np.ndarray:
    j = np.arange(1, n, dtype=float)
    return np.concatenate([[1.0], np.cumprod((j - 1.0 - order) / j)])


def spectral_bound(matrix: np.ndarray) -> float:
    """Gershgorin bound on the generator spectrum"""
    return float(np.max(np.abs(matrix).sum(axis=1)))


def stable_time_step(fam: LevyFamily, params: AlphaScale, x_grid, safety: Optional[float] = None) -> float:
    """Largest h with h^alpha lambda_max <= 2^alpha * safety"""
    safety = TOLERANCES.ffpe_safety if safety is None else safety
    bound = spectral_bound(generator_matrix(fam, x_grid))
    return (2.0 ** params.alpha * safety / bound) ** (1.0 / params.alpha)


def source_tail(alpha: float, t0: float, t) -> np.ndarray:
    """P(R_t0 > t), the weight of the initial-value source term; 0 for t0 = 0"""
    t = np.asarray(t, dtype=float)
    if t0 == 0.0:
        return np.zeros_like(t)
    return np.asarray(AgingKernel(alpha, t0).survival(t))


def solve_ffpe(fam: LevyFamily, params: AlphaScale, t0: float, initial: InitialDensity,
               t_final: float, dt: Optional[float] = None, store_every: int = 1) -> GridDensity:
    """
    Explicit Grunwald scheme
        u_n = -sum_{j>=1} w_j u_{n-j} + h^alpha (L u_{n-1} + F_t0(t_n) L p),
    C_n = p + u_n. Raises InstabilityError when the solution norm grows by
    more than the guard factor.
    """
    _require_density(fam)
    if not (t_final > 0 and t0 >= 0):
        raise DomainError(f"need t_final > 0 and t0 >= 0, got t_final={t_final}, t0={t0}")
    alpha = params.alpha
    x_grid = initial.x_grid
    dx = initial.dx
    gen = generator_matrix(fam, x_grid) / params.c
    h_max = (2.0 ** alpha * TOLERANCES.ffpe_safety / spectral_bound(gen)) ** (1.0 / alpha)
    if dt is None:
        n_steps = int(math.ceil(t_final / h_max))
    else:
        n_steps = int(math.ceil(t_final / dt - 1e-9))
    h = t_final / n_steps
    app_logger.info(f"FFPE solve: alpha={alpha} t0={t0} nx={x_grid.size} steps={n_steps} h={h:.3e}", "FFPE")

    w = grunwald_weights(alpha, n_steps).w
    p = initial.p
    lp = gen @ p
    t_grid = h * np.arange(n_steps + 1)
    forcing = 1.0 - source_tail(alpha, t0, t_grid) if t0 > 0 else np.ones(n_steps + 1)
    u = np.zeros((n_steps + 1, x_grid.size))
    scale = h ** alpha
    base_norm = np.abs(p).sum() * dx
    for n in range(1, n_steps + 1):
        memory = w[1:n + 1] @ u[n - 1::-1]
        u[n] = -memory + scale * (gen @ u[n - 1] + forcing[n] * lp)
        norm = np.abs(u[n] + p).sum() * dx
        if not math.isfinite(norm) or norm > TOLERANCES.ffpe_growth_guard * base_norm:
            raise InstabilityError(
                f"FFPE norm grew to {norm:.3g} at step {n}; reduce dt",
                suggested_dt=0.5 * min(h, h_max))

    stored = np.arange(0, n_steps + 1, max(1, int(store_every)))
    if stored[-1] != n_steps:
        stored = np.append(stored, n_steps)
    values = u[stored] + p[None, :]
    result = GridDensity(x_grid, t_grid[stored], values,
                         meta={'route': 'solver', 't0': t0, 'dt': h, 'steps': n_steps})
    undershoot = result.min_value()
    if undershoot < -TOLERANCES.ffpe_negative_tol:
        app_logger.warning(f"FFPE solution dips to {undershoot:.3e}", "FFPE")
    leak = float(np.max(np.abs(result.mass() - 1.0)))
    app_logger.debug(f"FFPE mass deviation {leak:.2e}", "FFPE")
    return result


# FOURIER-LAPLACE CHECKS

FLT_DX = 0.05
FLT_X_MAX = 12.0
_FLT_POWER = 6


@lru_cache(maxsize=1)
def _laplace_rule() -> Tuple[np.ndarray, np.ndarray]:
    """
    Times t_i and weights w_i with int_0^inf e^-st g(t) dt = sum_i w_i e^-s t_i g(t_i).
    t = u^6 on [0, 1] smooths the t^alpha and t^(1-alpha) behaviour at 0;
    t = 1/v maps [1, inf) onto (0, 1].
    """
    u, wu = gauss_legendre(12)
    head_t = u ** _FLT_POWER
    head_w = _FLT_POWER * u ** (_FLT_POWER - 1) * wu
    base, base_w = gauss_legendre(8)
    edges = np.array([0.0, 0.125, 0.25, 0.5, 1.0])
    width = np.diff(edges)
    v = (edges[:-1, None] + width[:, None] * base[None, :]).ravel()
    wv = (width[:, None] * base_w[None, :]).ravel()
    t = np.concatenate([head_t, 1.0 / v])
    w = np.concatenate([head_w, wv / v ** 2])
    order = np.argsort(t)
    return t[order], w[order]


@lru_cache(maxsize=8)
def flt_trajectory(fam: LevyFamily, params: AlphaScale, t0: float = 0.0,
                   dx: float = FLT_DX, x_max: float = FLT_X_MAX) -> GridDensity:
    """
    reference_density (t0 = 0) or the density part of aged_density (t0 > 0)
    at the Laplace quadrature times; meta['laplace_weights'] holds the weights.
    """
    _require_density(fam)
    if not t0 >= 0:
        raise DomainError(f"t0 must be nonnegative, got {t0}")
    t_nodes, weights = _laplace_rule()
    x_grid = make_x_grid(dx, x_max)
    rows = []
    for t in t_nodes:
        if t0 > 0.0:
            rows.append(aged_density(fam, params, t0, float(t), x_grid).values[0])
        else:
            rows.append(reference_density(fam, params, float(t), x_grid).values[0])
    app_logger.debug(f"Fourier-Laplace trajectory: {t_nodes.size} times, {x_grid.size} cells, t0={t0:g}", "FFPE")
    return GridDensity(x_grid, t_nodes, np.array(rows),
                       meta={'route': 'flt', 't0': t0, 'laplace_weights': weights})


def grid_fourier(density: GridDensity, k: float) -> np.ndarray:
    """
    int e^-ikx C(x, t) dx for every stored time, atom included. The trapezoid
    sum of cell averages carries the box factor sinc(k dx / 2), divided out here.
    """
    phase = np.exp(-1j * k * density.x_grid)
    box = np.sinc(k * density.dx / (2.0 * math.pi))
    cells = integrate.trapezoid(density.values * phase[None, :], density.x_grid, axis=1) / box
    return cells + density.atom_mass


def flt_closed_form(fam: LevyFamily, params: AlphaScale, k: float, s: float) -> complex:
    """s^(alpha-1) / (s^alpha - psi(-k)/c)"""
    psi = complex(levy_symbol(fam, k)) / params.c
    return s ** (params.alpha - 1.0) / (s ** params.alpha - psi)


def flt_numeric(trajectory: GridDensity, k: float, s: float) -> complex:
    """Laplace transform in t of grid_fourier over a flt_trajectory"""
    if not s > 0:
        raise DomainError(f"s must be positive, got {s}")
    weights = trajectory.meta['laplace_weights']
    return complex(np.sum(weights * np.exp(-s * trajectory.t_grid) * grid_fourier(trajectory, k)))


def flt_residual(fam: LevyFamily, params: AlphaScale, k: float, s: float, t0: float = 0.0,
                 dx: float = FLT_DX, x_max: float = FLT_X_MAX) -> complex:
    """
    Numeric Fourier-Laplace transform of the gridded densities against the
    closed form. For t0 = 0 returns p0(k,s) - s^(alpha-1)/(s^alpha - psi(-k));
    for t0 > 0 returns nu(k,s) (s^alpha - psi(-k)) - s^(alpha-1) p_t0(s),
    nu the density part of the aged law.
    """
    if not s > 0:
        raise DomainError(f"s must be positive, got {s}")
    trajectory = flt_trajectory(fam, params, float(t0), dx, x_max)
    numeric = flt_numeric(trajectory, k, s)
    if t0 == 0.0:
        return numeric - flt_closed_form(fam, params, k, s)
    psi = complex(levy_symbol(fam, k)) / params.c
    kernel_lt = aging_kernel_laplace(AgingKernel(params.alpha, t0), s)
    return numeric * (s ** params.alpha - psi) - s ** (params.alpha - 1.0) * kernel_lt


def two_route_report(fam: LevyFamily, params: AlphaScale, t0: float, initial: InitialDensity,
                     t: float, n_mc: int, seed: int, dt: Optional[float] = None,
                     batch_size: Optional[int] = None, threads: int = 1) -> Tuple[GridDensity, dict]:
    """Solver, convolution and Monte Carlo densities at time t with pairwise L1 distances"""
    solved = solve_ffpe(fam, params, t0, initial, t, dt=dt, store_every=10 ** 9)
    conv = convolution_route(fam, params, t0, initial, t)
    hist = mc_histogram_route(fam, params, t0, initial, t, n_mc, seed, batch_size=batch_size, threads=threads)
    distances = {
        'solver_vs_convolution': solved.l1_distance(conv),
        'solver_vs_monte_carlo': solved.l1_distance(hist),
        'convolution_vs_monte_carlo': conv.l1_distance(hist),
        'solver_mass_deviation': float(np.max(np.abs(solved.mass() - 1.0))),
        'solver_min_value': solved.min_value(),
        'dt': solved.meta['dt'],
    }
    return solved, distances
