# Main package
__version__ = "0.1.0"
__author__ = "Aging CTRW Development Team"
__description__ = "Aging uncoupled CTRW limits: laws, samplers, aged FFPE and verification"

import sys

try:
    from .services.verification_service import VerificationService
    from .utils.config import get_app_config, load_scenario
    from .utils.logger import AppLogger

    __all__ = ['VerificationService', 'get_app_config', 'load_scenario', 'AppLogger']

except ImportError as e:
    print(f"Warning: Some components could not be imported: {e}", file=sys.stderr)
    __all__ = []
