# src/aging_ctrw/utils/config.py
"""
Application defaults and the numerical tolerance record
"""

import os
from dataclasses import dataclass
from typing import Dict, Optional

from dotenv import dotenv_values, load_dotenv


@dataclass(frozen=True)
class NumericTolerances:
    """Every numerical constant the library relies on"""
    # Mittag-Leffler
    ml_switch_radius: float = 5.0
    ml_series_term_tol: float = 1e-16
    ml_series_max_abs_sum: float = 1e5
    ml_series_max_terms: int = 2000
    # quadrature
    quad_epsabs: float = 1e-13
    quad_epsrel: float = 1e-12
    quad_limit: int = 400
    # one-sided stable density
    stable_series_min_x: float = 1.0
    stable_series_max_terms: int = 600
    stable_series_cancellation: float = 1e6
    # subordination rule
    subordination_tail: float = 1e-14
    subordination_panels: int = 8
    subordination_panel_nodes: int = 16
    # paths and statistics
    horizon_tail: float = 1e-6
    du_fraction: float = 1e-3
    ks_level: float = 0.01
    ks_min_n: int = 20
    chi_square_min_expected: float = 5.0
    # aging quadrature
    aging_panel_nodes: int = 16
    # FFPE
    ffpe_safety: float = 0.9
    ffpe_growth_guard: float = 10.0
    ffpe_negative_tol: float = 1e-9


TOLERANCES = NumericTolerances()


def _env(name: str, default: str) -> str:
    return os.getenv(f"AGING_CTRW_{name}", default)


def get_app_config() -> dict:
    """Get application configuration settings"""
    load_dotenv(override=False)
    return {
        'threads': int(_env('THREADS', '1')),
        'batch_size': int(_env('BATCH_SIZE', '20000')),
        'output_dir': _env('OUT', 'results'),
        'log_level': _env('LOG_LEVEL', 'INFO'),
        'quad_nodes': int(_env('QUAD_NODES', str(TOLERANCES.aging_panel_nodes))),
        'du_fraction': float(_env('DU_FRACTION', str(TOLERANCES.du_fraction))),
    }


def _field_names():
    from .schemas import Scenario
    names = set(Scenario.model_fields) | {'lambda'}
    lowered = {name.lower(): name for name in names if name != 'A'}
    return names, lowered


def _scenario_key(key: str) -> str:
    names, lowered = _field_names()
    if key in names:
        return key
    return lowered.get(key.lower(), key)


def _key_lines(path) -> dict:
    lines = {}
    with open(path, 'r', encoding='utf-8') as handle:
        for number, raw in enumerate(handle, start=1):
            line = raw.strip()
            if not line or line.startswith('#') or '=' not in line:
                continue
            key = line.split('=', 1)[0].strip()
            if key.startswith('export '):
                key = key[len('export '):].strip()
            lines[_scenario_key(key)] = number
    return lines


def load_scenario(path: Optional[str] = None, overrides: Optional[Dict] = None):
    """
    Build a Scenario from model defaults, the environment, an optional
    KEY=VALUE file and explicit overrides, in increasing precedence.
    """
    from pydantic import ValidationError

    from ..exceptions import ScenarioError
    from .schemas import Scenario

    app = get_app_config()
    values: Dict = {
        'threads': app['threads'],
        'out': app['output_dir'],
        'quad_nodes': app['quad_nodes'],
        'du_fraction': app['du_fraction'],
        'batch_size': app['batch_size'],
    }
    lines: Dict = {}
    if path:
        if not os.path.isfile(path):
            raise ScenarioError(f"scenario file not found: {path}",
                                [{'field': 'config', 'line': None, 'message': 'file not found'}])
        lines = _key_lines(path)
        for key, raw in dotenv_values(path).items():
            field = _scenario_key(key)
            if raw is None:
                raise ScenarioError(f"missing value for {key}",
                                    [{'field': field, 'line': lines.get(field), 'message': 'expected KEY=VALUE'}])
            values[field] = raw
    for key, value in (overrides or {}).items():
        if value is not None:
            values[_scenario_key(key)] = value
            lines.pop(_scenario_key(key), None)

    try:
        return Scenario.model_validate(values)
    except ValidationError as e:
        diagnostics = []
        for err in e.errors():
            field = str(err['loc'][0]) if err['loc'] else '__root__'
            diagnostics.append({'field': field, 'line': lines.get(field), 'message': err['msg']})
        raise ScenarioError(f"invalid scenario ({len(diagnostics)} problem(s))", diagnostics) from e
