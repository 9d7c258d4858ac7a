# Services package
try:
    from .verification_service import VerificationService

    __all__ = ['VerificationService']

except ImportError as e:
    import sys
    print(f"Warning: Verification service could not be imported: {e}", file=sys.stderr)
    __all__ = []
