# Utils package
try:
    from .config import TOLERANCES, get_app_config, load_scenario
    from .logger import AppLogger, app_logger

    __all__ = [
        'TOLERANCES',
        'get_app_config',
        'load_scenario',
        'AppLogger',
        'app_logger'
    ]

except ImportError as e:
    import sys
    print(f"Warning: Some utilities could not be imported: {e}", file=sys.stderr)
    __all__ = ['get_app_config']
