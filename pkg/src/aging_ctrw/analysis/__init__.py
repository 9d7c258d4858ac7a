# Quadrature, fractional operators and the aged FFPE
try:
    from .aging import BorelSet, Interval, MarginalLaw, aging_prob, zero_atom
    from .ffpe import GridDensity, InitialDensity, solve_ffpe
    from .frac_calc import TimeGridFn, caputo, riemann_liouville

    __all__ = ['BorelSet', 'Interval', 'MarginalLaw', 'aging_prob', 'zero_atom',
               'GridDensity', 'InitialDensity', 'solve_ffpe',
               'TimeGridFn', 'caputo', 'riemann_liouville']

except ImportError as e:
    import sys
    print(f"Warning: Analysis components could not be imported: {e}", file=sys.stderr)
    __all__ = []
