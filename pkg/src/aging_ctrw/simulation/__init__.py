# Samplers and statistics
try:
    from .mc_stats import EmpiricalDist, StreamSpec, run_replicates, stream
    from .process import LevyFamily, SampleSet, aging_increment_sample, ctrwl_sample

    __all__ = ['EmpiricalDist', 'StreamSpec', 'run_replicates', 'stream',
               'LevyFamily', 'SampleSet', 'aging_increment_sample', 'ctrwl_sample']

except ImportError as e:
    import sys
    print(f"Warning: Simulation components could not be imported: {e}", file=sys.stderr)
    __all__ = []
