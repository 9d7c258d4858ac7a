# src/aging_ctrw/exceptions.py
"""
Exception hierarchy shared by the library, the service layer and the CLI
"""

from typing import Dict, List, Optional


class AgingCtrwError(Exception):
    """Base class for every error raised by aging_ctrw"""


class DomainError(AgingCtrwError, ValueError):
    """Argument outside the domain of a law or operator"""


class UnsupportedFamilyError(AgingCtrwError, ValueError):
    """Operation not defined for the requested outer process family"""


class AtomContaminationError(AgingCtrwError, ValueError):
    """Continuous-cdf test requested on a sample carrying exact zeros"""


class HorizonError(AgingCtrwError):
    """Simulated subordinator path does not reach the requested time"""


class VacuousAsymptoticsError(AgingCtrwError):
    """Asymptotic constant is zero, so the t0-asymptote carries no information"""


class InstabilityError(AgingCtrwError, RuntimeError):
    """Explicit FFPE time stepping blew up"""

    def __init__(self, message: str, suggested_dt: Optional[float] = None):
        super().__init__(message)
        self.suggested_dt = suggested_dt


class ScenarioError(AgingCtrwError, ValueError):
    """Invalid scenario file or CLI flags"""

    def __init__(self, message: str, diagnostics: Optional[List[Dict]] = None):
        super().__init__(message)
        self.diagnostics = diagnostics or []

    def to_dict(self) -> Dict:
        return {'error': str(self), 'diagnostics': self.diagnostics}
