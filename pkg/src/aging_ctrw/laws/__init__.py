# Analytic laws
try:
    from .special_fn import AlphaScale, mittag_leffler, stable_pdf_onesided, inverse_subordinator_pdf
    from .dist import AgingKernel, GB2Params, gb2_cdf, gb2_pdf

    __all__ = [
        'AlphaScale',
        'mittag_leffler',
        'stable_pdf_onesided',
        'inverse_subordinator_pdf',
        'AgingKernel',
        'GB2Params',
        'gb2_cdf',
        'gb2_pdf',
    ]

except ImportError as e:
    import sys
    print(f"Warning: Laws could not be imported: {e}", file=sys.stderr)
    __all__ = []
