# src/aging_ctrw/cli.py
"""
Command-line front end.

    python -m aging_ctrw.cli verify --config scenarios/brownian.env --seed 7

Exit codes: 0 every check passed, 1 a check failed, 2 invalid scenario or
flags, 3 numerical failure.
"""

import argparse
import sys
from typing import Dict, List, Optional

from . import __version__
from .exceptions import ScenarioError
from .services.verification_service import VerificationService
from .utils.config import get_app_config, load_scenario
from .utils.logger import app_logger
from .utils.serialization import dumps

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_SCENARIO = 2
EXIT_NUMERIC = 3


class _Parser(argparse.ArgumentParser):
    """argparse that raises instead of exiting, so bad flags map to exit code 2"""

    def error(self, message):
        raise ScenarioError(f"invalid arguments: {message}",
                            [{'field': 'argv', 'line': None, 'message': message}])


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog='aging-ctrw', description="Aging CTRW limits: samplers, aging laws and verification")
    parser.add_argument('--version', action='version', version=f"%(prog)s {__version__}")
    parser.add_argument('command', choices=VerificationService.COMMANDS)
    parser.add_argument('--config', help="scenario file with KEY=VALUE lines")
    parser.add_argument('--seed', type=int, help="master seed (unsigned 64-bit)")
    parser.add_argument('--out', help="output directory")
    parser.add_argument('--threads', type=int, help="worker threads for replicate batches")
    parser.add_argument('--alpha', type=float, help="temporal index in (0,1)")
    parser.add_argument('--t0', help="aging times, comma separated")
    parser.add_argument('--t', help="observation times, comma separated")
    parser.add_argument('--family', help="brownian | symmetric_stable | poisson | compound_poisson")
    parser.add_argument('--log-level', default=None, help="DEBUG, INFO, WARNING or ERROR")
    return parser


def _overrides(args: argparse.Namespace) -> Dict:
    return {'seed': args.seed, 'out': args.out, 'threads': args.threads, 'alpha': args.alpha,
            't0': args.t0, 't': args.t, 'family': args.family}


def _report_scenario_error(error: ScenarioError) -> int:
    app_logger.error(f"❌ {error}", "CLI")
    sys.stderr.write(dumps(error.to_dict()))
    return EXIT_SCENARIO


def main(argv: Optional[List[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        app_logger.set_level(args.log_level or get_app_config()['log_level'])
        scenario = load_scenario(args.config, _overrides(args))
    except ScenarioError as e:
        return _report_scenario_error(e)
    except ValueError as e:
        return _report_scenario_error(ScenarioError(str(e), [{'field': 'log_level', 'line': None,
                                                             'message': str(e)}]))

    app_logger.info(f"🚀 {args.command} (seed {scenario.seed}, out {scenario.out})", "CLI")
    result = VerificationService(scenario).run(args.command)

    if not result['success']:
        if result['error_type'] == 'scenario':
            sys.stderr.write(dumps({'error': result['error'], 'diagnostics': result.get('diagnostics', [])}))
            return EXIT_SCENARIO
        sys.stderr.write(dumps({'error': result['error'], 'command': args.command,
                                'suggested_dt': result.get('suggested_dt')}))
        return EXIT_NUMERIC

    sys.stdout.write(dumps({'command': args.command, 'files': result['files'],
                            'checks': result['checks'], 'failed_checks': result['failed_checks'],
                            'warnings': result['log_summary']['warning_count']}))
    if result['failed_checks']:
        for name in result['failed_checks']:
            app_logger.error(f"❌ check failed: {name}", "CLI")
        return EXIT_CHECK_FAILED
    return EXIT_OK


if __name__ == '__main__':
    sys.exit(main())
