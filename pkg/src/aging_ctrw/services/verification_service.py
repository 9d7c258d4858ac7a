# src/aging_ctrw/services/verification_service.py
"""
Verification service: turns a Scenario into samples, analytic results and
check reports, and writes them to the output directory
"""

import math
import time
import traceback
from pathlib import Path
from typing import Callable, Dict, List, Optional

import numpy as np
import pandas as pd
from scipy import integrate

from ..analysis import aging, ffpe, frac_calc
from ..exceptions import (
    AgingCtrwError,
    DomainError,
    HorizonError,
    InstabilityError,
    ScenarioError,
    UnsupportedFamilyError,
    VacuousAsymptoticsError,
)
from ..laws import dist
from ..laws.special_fn import AlphaScale
from ..simulation import mc_stats, process
from ..utils.config import TOLERANCES
from ..utils.logger import app_logger
from ..utils.schemas import STREAM_BLOCK, CheckReport, Scenario, SuiteReport
from ..utils.serialization import provenance, scenario_hash, write_frame, write_json

NUMERIC_ERRORS = (InstabilityError, HorizonError, VacuousAsymptoticsError, ArithmeticError)
SCENARIO_ERRORS = (ScenarioError, DomainError, UnsupportedFamilyError)


def family_from_scenario(s: Scenario) -> process.LevyFamily:
    if s.family == 'brownian':
        return process.LevyFamily.brownian(s.mu, s.A)
    if s.family == 'symmetric_stable':
        return process.LevyFamily.symmetric_stable(s.beta, s.scale)
    if s.family == 'poisson':
        return process.LevyFamily.poisson(s.lam)
    params = (s.jump_mean, s.jump_sd) if s.jump_law == 'normal' else (s.jump_rate,)
    return process.LevyFamily.compound_poisson(s.lam, s.jump_law, params)


def sets_from_scenario(s: Scenario) -> List[aging.BorelSet]:
    return [aging.BorelSet.parse(text) for text in s.borel_sets]


class VerificationService:
    """
    Runs scenario commands. Each command returns a result dict with
    success, report, files, error and error_type; exceptions never escape.
    """

    COMMANDS = ('sample', 'aging', 'verify', 'ffpe', 'asymptotics', 'selfsim', 'stationarity')

    def __init__(self, scenario: Scenario, debug_callback: Optional[Callable] = None):
        self.scenario = scenario
        self.debug_callback = debug_callback or self._default_logger
        self.scenario_hash = scenario_hash(scenario.canonical())
        self.out_dir = Path(scenario.out)
        self.family = family_from_scenario(scenario)
        self.params = AlphaScale(scenario.alpha, scenario.c)
        app_logger.info(f"✅ VerificationService ready (scenario {self.scenario_hash}, seed {scenario.seed})",
                        "SERVICE")

    def _default_logger(self, message: str, category: str = "SERVICE", level: str = "INFO"):
        app_logger.log(message, category, level)

    @property
    def law(self) -> aging.MarginalLaw:
        return aging.MarginalLaw(self.family, self.params, seed=self.scenario.seed)

    def _header(self) -> str:
        return provenance(self.scenario_hash, self.scenario.seed)

    def _suite(self, command: str, checks: List[CheckReport]) -> SuiteReport:
        return SuiteReport(command=command, scenario_hash=self.scenario_hash, seed=self.scenario.seed,
                           checks=checks)

    # COMMAND DISPATCH

    def run(self, command: str) -> Dict:
        """Run one command and report success, files and failed checks"""
        if command not in self.COMMANDS:
            return {'success': False, 'command': command, 'error': f"unknown command {command!r}",
                    'error_type': 'scenario', 'files': [], 'failed_checks': [],
                    'log_summary': app_logger.summary_since(app_logger.mark())}
        log_mark = app_logger.mark()
        self.debug_callback(f"Running command '{command}'", "SERVICE", "INFO")
        start_time = time.time()
        result = {'success': False, 'command': command, 'files': [], 'report': None, 'checks': [],
                  'error': None, 'error_type': None, 'failed_checks': []}
        try:
            suite, files = getattr(self, f"cmd_{command}")()
            suite_path = write_json(self.out_dir / f"{command}_report.json", suite)
            result.update({
                'success': True,
                'report': suite.model_dump(),
                'files': [str(p) for p in files] + [str(suite_path)],
                'passed': suite.passed,
                'checks': [c.name for c in suite.checks],
                'failed_checks': suite.failed_checks,
            })
            marker = "✅" if suite.passed else "❌"
            app_logger.info(f"{marker} {command}: {len(suite.checks)} checks, "
                            f"{len(suite.failed_checks)} failed", "SERVICE")
        except SCENARIO_ERRORS as e:
            result.update({'error': str(e), 'error_type': 'scenario',
                           'diagnostics': getattr(e, 'diagnostics', [])})
            app_logger.error(f"❌ {command}: invalid input: {e}", "SERVICE")
        except NUMERIC_ERRORS as e:
            result.update({'error': str(e), 'error_type': 'numeric',
                           'suggested_dt': getattr(e, 'suggested_dt', None)})
            app_logger.error(f"❌ {command}: numerical failure: {e}", "SERVICE")
        except (AgingCtrwError, ValueError, RuntimeError) as e:
            result.update({'error': str(e), 'error_type': 'numeric'})
            app_logger.error(f"❌ {command}: {e}", "SERVICE")
            app_logger.debug(traceback.format_exc(), "SERVICE")
        finally:
            elapsed_ms = (time.time() - start_time) * 1000.0
            app_logger.track_performance(f"cmd_{command}", elapsed_ms, result['success'])
            result['log_summary'] = app_logger.summary_since(log_mark)
        return result

    # COMMANDS

    def cmd_sample(self):
        s = self.scenario
        files, checks = [], []
        for i, t0 in enumerate(s.t0):
            for j, t in enumerate(s.t):
                offset = STREAM_BLOCK * (len(s.t) * i + j)
                if t0 == 0.0:
                    draw = lambda rng, size, t=t: process.ctrwl_sample(self.family, self.params, t, rng, size)
                    name = 'ctrwl'
                else:
                    draw = lambda rng, size, t0=t0, t=t: process.aging_increment_sample(
                        self.family, self.params, t0, [t], rng, n=size,
                        du=s.du_fraction * process.horizon_for(self.params, t0 + t))[:, 0]
                    name = 'aging_increment'
                values = mc_stats.run_replicates(draw, s.n, s.seed, batch_size=s.batch_size,
                                                 threads=s.threads, stream_offset=offset)
                samples = process.SampleSet.create(values, name, s.alpha, s.c, t0, t, s.seed,
                                                   stream_offset=offset, scenario_hash=self.scenario_hash)
                path = self.out_dir / f"sample_t0_{t0:g}_t_{t:g}.csv"
                path.parent.mkdir(parents=True, exist_ok=True)
                samples.to_csv(path)
                files.append(path)
                summary = mc_stats.summarize_heavy_tailed(values)
                checks.append(CheckReport(name=f"sample_t0_{t0:g}_t_{t:g}", passed=True,
                                          statistics=summary, inputs={'t0': t0, 't': t, 'n': s.n},
                                          seeds={'master_seed': s.seed, 'stream_offset': offset}))
        return self._suite('sample', checks), files

    def cmd_aging(self):
        s = self.scenario
        law = self.law
        checks, rows = [], []
        sets = sets_from_scenario(s)
        for b_index, borel_set in enumerate(sets):
            if borel_set.contains_zero:
                raise DomainError(f"borel set {borel_set} contains 0; aging probabilities need 0 outside B")
            for i, t0 in enumerate(s.t0):
                if t0 <= 0.0:
                    raise DomainError("aging needs t0 > 0")
                for j, t in enumerate(s.t):
                    value, q_err = aging.aging_prob(law, borel_set, t, t0, nodes=s.quad_nodes, return_error=True)
                    offset = 10_000 * (b_index * len(s.t0) * len(s.t) + i * len(s.t) + j)
                    freq, sigma = aging.aging_prob_mc(law, borel_set, t, t0, s.n, s.seed, route="renewal",
                                                      batch_size=s.batch_size, threads=s.threads,
                                                      stream_offset=offset)
                    atom = aging.zero_atom(self.family, s.alpha, t, t0, s.c)
                    gap = abs(value - freq)
                    passed = gap <= 3.0 * sigma + q_err + 1e-6
                    rows.append({'set': str(borel_set), 't0': t0, 't': t, 'aging_prob': value,
                                 'quadrature_error': q_err, 'mc_frequency': freq, 'mc_sigma': sigma,
                                 'zero_atom': atom})
                    checks.append(CheckReport(
                        name=f"aging_prob[{borel_set}|t0={t0:g},t={t:g}]",
                        passed=passed,
                        statistics={'aging_prob': value, 'mc_frequency': freq, 'gap': gap,
                                    'sigma': sigma, 'quadrature_error': q_err, 'zero_atom': atom},
                        tolerances={'sigma_band': 3.0},
                        inputs={'set': str(borel_set), 't0': t0, 't': t, 'n': s.n},
                        seeds={'master_seed': s.seed, 'stream_offset': offset}))
        table = self.out_dir / "aging_table.csv"
        write_frame(table, pd.DataFrame(rows), self._header())
        return self._suite('aging', checks), [table]

    def cmd_asymptotics(self):
        s = self.scenario
        borel_set = sets_from_scenario(s)[0]
        t = s.t[0]
        t0_grid = sorted(x for x in s.t0 if x > 0)
        if len(t0_grid) < 2:
            raise DomainError("asymptotics needs at least two positive t0 values")
        table = aging.asymptotic_ratio_table(self.law, borel_set, t, t0_grid)
        slope = aging.fit_loglog_slope(table['t0'], table['prob'])
        target = s.alpha - 1.0
        final_ratio = float(table['ratio'].iloc[-1])
        path = self.out_dir / "asymptotics.csv"
        write_frame(path, table, self._header())
        checks = [
            CheckReport(name="loglog_slope", passed=abs(slope - target) <= 0.05,
                        statistics={'slope': slope, 'expected': target},
                        tolerances={'abs': 0.05}, inputs={'set': str(borel_set), 't': t, 't0_grid': t0_grid}),
            CheckReport(name="asymptotic_ratio", passed=abs(final_ratio - 1.0) <= 0.05,
                        statistics={'ratio_at_largest_t0': final_ratio, 'ratios': table['ratio'].tolist()},
                        tolerances={'rel': 0.05}, inputs={'t0': t0_grid[-1]}),
        ]
        return self._suite('asymptotics', checks), [path]

    def cmd_selfsim(self):
        s = self.scenario
        report = aging.self_similarity_check(self.family, self.params, s.t0[0], s.a, s.times, s.n, s.seed,
                                             level=s.level, batch_size=s.batch_size, threads=s.threads)
        return self._suite('selfsim', [report]), []

    def cmd_stationarity(self):
        s = self.scenario
        report = aging.stationarity_limit_check(self.family, s.t[0], s.t0[0], s.alphas, s.n, s.seed,
                                                c=s.c, batch_size=s.batch_size, threads=s.threads)
        return self._suite('stationarity', [report]), []

    def cmd_ffpe(self):
        s = self.scenario
        x_grid = ffpe.make_x_grid(s.dx, s.x_max)
        initial = ffpe.InitialDensity.narrow_gaussian(x_grid, s.sigma0)
        t0, t = s.t0[0], s.t[0]
        solved, distances = ffpe.two_route_report(self.family, self.params, t0, initial, t, s.n, s.seed,
                                                  dt=s.dt, batch_size=s.batch_size, threads=s.threads)
        path = self.out_dir / f"ffpe_t0_{t0:g}_t_{t:g}.csv"
        path.parent.mkdir(parents=True, exist_ok=True)
        solved.to_csv(path, header_comment=self._header())
        tail = ffpe.source_tail(s.alpha, t0, [t, 20.0 * t0]) if t0 > 0 else np.zeros(2)
        checks = [
            CheckReport(name="ffpe_two_route_l1",
                        passed=max(distances['solver_vs_convolution'], distances['solver_vs_monte_carlo'],
                                   distances['convolution_vs_monte_carlo']) <= 0.03,
                        statistics=distances, tolerances={'l1': 0.03},
                        inputs={'t0': t0, 't': t, 'dx': s.dx, 'x_max': s.x_max, 'sigma0': s.sigma0, 'n': s.n},
                        seeds={'master_seed': s.seed}),
            CheckReport(name="ffpe_mass", passed=distances['solver_mass_deviation'] <= 1e-3,
                        statistics={'mass_deviation': distances['solver_mass_deviation']},
                        tolerances={'abs': 1e-3}),
            CheckReport(name="ffpe_source_tail", passed=bool(tail[1] <= tail[0]) if t0 > 0 else True,
                        statistics={'tail_at_t': float(tail[0]), 'tail_at_20_t0': float(tail[1])}),
        ]
        return self._suite('ffpe', checks), [path]

    def cmd_verify(self):
        """Acceptance-style suite on the scenario's family and alpha"""
        s = self.scenario
        checks: List[CheckReport] = []
        checks.extend(self._verify_kernel())
        checks.extend(self._verify_regeneration_laws())
        if not any(b.contains_zero for b in sets_from_scenario(s)):
            checks.extend(self._verify_aging_convolution())
        checks.extend(self._verify_zero_atom())
        checks.append(self._verify_erickson())
        checks.append(self._verify_fractional_calculus())
        if self.family.kind == "brownian":
            checks.extend(self._verify_transforms())
        else:
            app_logger.info(f"Fourier-Laplace grid check skipped: {self.family.kind} tails exceed the x grid", "SERVICE")
        return self._suite('verify', checks), []

    # VERIFY SUITE PARTS

    def _verify_kernel(self) -> List[CheckReport]:
        worst = 0.0
        opts = dict(limit=TOLERANCES.quad_limit, epsabs=1e-12, epsrel=1e-10)
        for alpha in (0.2, 0.5, 0.8):
            kernel = dist.AgingKernel(alpha, 1.0)
            for s_val in (0.1, 1.0, 10.0):
                integrand = lambda r: math.exp(-s_val * r) * float(kernel.pdf(r))
                head, _ = integrate.quad(integrand, 0.0, 1.0, **opts)
                tail, _ = integrate.quad(integrand, 1.0, np.inf, **opts)
                worst = max(worst, abs(head + tail - float(kernel.laplace(s_val))))
        checks = [CheckReport(name="kernel_laplace_transform", passed=worst <= 1e-7,
                              statistics={'max_abs_error': worst}, tolerances={'abs': 1e-7})]
        checks.extend(aging.kernel_decay_check(alpha) for alpha in (0.2, 0.5, 0.8))
        checks.append(aging.kernel_alpha_limit_check())
        return checks

    def _verify_regeneration_laws(self) -> List[CheckReport]:
        s = self.scenario
        n_paths = min(s.n, 10_000)
        t = s.t[0]
        rng = mc_stats.stream(s.seed, 7_000_000)
        du = 1e-4 * process.horizon_for(self.params, t)
        passage = process.first_passage(self.params, [t], du, rng, n_paths)
        d_at, d_before = passage.d_at[:, 0], passage.d_before[:, 0]
        level = mc_stats.bonferroni_level(s.level, 3)
        laws = {
            'remaining_life': (d_at - t, lambda x: dist.remaining_life_cdf(s.alpha, t, np.maximum(x, 0.0))),
            'age': (t - d_before, lambda x: dist.age_cdf_gb1(s.alpha, t, x)),
            'overshoot': (d_at, lambda x: dist.overshoot_cdf(s.alpha, t, x)),
        }
        checks = []
        for name, (values, cdf) in laws.items():
            stat, p = mc_stats.ks_one_sample(mc_stats.EmpiricalDist.from_samples(values, separate_zeros=False), cdf)
            checks.append(CheckReport(name=f"ks_{name}", passed=p > level,
                                      statistics={'statistic': stat, 'p_value': p},
                                      tolerances={'level': level}, inputs={'t': t, 'n_paths': n_paths, 'du': du},
                                      seeds={'master_seed': s.seed, 'stream': 7_000_000}))
        return checks

    def _verify_aging_convolution(self) -> List[CheckReport]:
        s = self.scenario
        law = self.law
        checks = []
        t = s.t[0]
        cells = [(b, t0) for b in sets_from_scenario(s) for t0 in s.t0 if t0 > 0]
        for cell, (borel_set, t0) in enumerate(cells):
            value, q_err = aging.aging_prob(law, borel_set, t, t0, nodes=s.quad_nodes, return_error=True)
            offset = 8_000_000 + STREAM_BLOCK * cell
            freq, sigma = aging.aging_prob_mc(law, borel_set, t, t0, s.n, s.seed, route="path",
                                              batch_size=s.batch_size, threads=s.threads, stream_offset=offset)
            gap = abs(value - freq)
            checks.append(CheckReport(
                name=f"aging_convolution[{borel_set}|t0={t0:g}]", passed=gap <= 3.0 * sigma + q_err + 1e-6,
                statistics={'aging_prob': value, 'mc_frequency': freq, 'sigma': sigma, 'gap': gap},
                tolerances={'sigma_band': 3.0}, inputs={'t': t, 't0': t0, 'n': s.n},
                seeds={'master_seed': s.seed, 'stream_offset': offset}))
        return checks

    def _verify_zero_atom(self) -> List[CheckReport]:
        s = self.scenario
        t, t0 = s.t[0], next((x for x in s.t0 if x > 0), 1.0)
        atom = aging.zero_atom(self.family, s.alpha, t, t0, s.c)
        draws = mc_stats.run_replicates(
            lambda rng, size: process.aging_increment_renewal_sample(self.family, self.params, t0, t, rng, size),
            s.n, s.seed, batch_size=s.batch_size, threads=s.threads, stream_offset=9_000_000)
        zeros = int(np.count_nonzero(draws == 0.0))
        freq = zeros / s.n
        sigma = mc_stats.binomial_sigma(atom, s.n)
        checks = [CheckReport(name="zero_atom_mc", passed=abs(freq - atom) <= 3.0 * sigma + 1e-9,
                              statistics={'zero_atom': atom, 'mc_frequency': freq, 'sigma': sigma},
                              tolerances={'sigma_band': 3.0}, inputs={'t': t, 't0': t0, 'n': s.n},
                              seeds={'master_seed': s.seed, 'stream_offset': 9_000_000})]
        if self.family.has_density:
            other = process.LevyFamily.symmetric_stable(1.5) if self.family.kind == 'brownian' \
                else process.LevyFamily.brownian()
            other_atom = aging.zero_atom(other, s.alpha, t, t0, s.c)
            checks.append(CheckReport(name="zero_atom_family_independence", passed=abs(other_atom - atom) <= 1e-12,
                                      statistics={'zero_atom': atom, 'other_family': other_atom}))
        return checks

    def _verify_erickson(self) -> CheckReport:
        s = self.scenario
        lam, t, t0 = 1.0, 1.0, 1e3
        rng = mc_stats.stream(s.seed, 9_500_000)
        mean, err = aging.fpp_aging_mean_mc(s.alpha, lam, t, t0, s.n, rng, return_error=True)
        exact = aging.fpp_aging_mean_exact(s.alpha, lam, t, t0)
        target = aging.fpp_aging_mean(s.alpha, lam, t, t0)
        quad, closed = aging.caputo_power_identity(s.alpha, t)
        passed = (abs(mean - exact) <= 4.0 * err + 1e-12
                  and abs(exact / target - 1.0) <= 0.05
                  and abs(quad - closed) <= 1e-8)
        return CheckReport(name="fpp_aging_mean", passed=passed,
                           statistics={'mc_mean': mean, 'mc_stderr': err, 'exact': exact, 'asymptote': target,
                                       'ratio': mean / target,
                                       'identity_quadrature': quad, 'identity_closed_form': closed},
                           tolerances={'sigma_band': 4.0, 'asymptote_rel': 0.05, 'identity': 1e-8},
                           inputs={'lambda': lam, 't': t, 't0': t0, 'n': s.n},
                           seeds={'master_seed': s.seed, 'stream': 9_500_000})

    def _verify_fractional_calculus(self) -> CheckReport:
        alpha = self.scenario.alpha
        linear = frac_calc.TimeGridFn.from_function(lambda t: t, 1.0, 1e-4)
        smooth = frac_calc.TimeGridFn.from_function(lambda t: np.exp(-t), 1.0, 1e-4)
        residuals = {
            'linear': frac_calc.rl_caputo_relation_residual(linear, alpha),
            'exp': frac_calc.rl_caputo_relation_residual(smooth, alpha),
        }
        return CheckReport(name="rl_caputo_relation", passed=max(residuals.values()) <= 1e-3,
                           statistics=residuals, tolerances={'abs': 1e-3}, inputs={'alpha': alpha, 'dt': 1e-4})

    def _verify_transforms(self) -> List[CheckReport]:
        ages = [x for x in self.scenario.t0 if x > 0]
        routes = (('fourier_laplace_residual', 0.0), ('aged_fourier_laplace_residual', ages[0] if ages else 1.0))
        checks = []
        for name, t0 in routes:
            residuals = {}
            for k in (0.5, 1.0, 2.0):
                for s_val in (0.5, 1.0, 2.0):
                    residual = ffpe.flt_residual(self.family, self.params, k, s_val, t0=t0)
                    residuals[f"k={k:g},s={s_val:g}"] = abs(residual)
            worst = max(residuals.values())
            checks.append(CheckReport(name=name, passed=worst <= 5e-3,
                                      statistics={'max_abs_residual': worst, 'residuals': residuals},
                                      tolerances={'abs': 5e-3},
                                      inputs={'t0': t0, 'dx': ffpe.FLT_DX, 'x_max': ffpe.FLT_X_MAX}))
        return checks
