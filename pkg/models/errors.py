"""
Exception hierarchy for the LLG toolkit
"""
from typing import Optional


class LlgError(Exception):
    """Base class for all toolkit errors"""
    pass


class BasisSizingError(LlgError, ValueError):
    """Raised when a basis is requested with too few grid points or modes"""
    pass


class GridMismatchError(LlgError, ValueError):
    """Raised when fields, states and bases disagree on grid or mode counts"""
    pass


class PathRefinementError(LlgError, ValueError):
    """Raised when sweep values are not refinements of one common Wiener path"""
    pass


class ConfigError(LlgError, ValueError):
    """Raised for invalid run configurations"""
    pass


class OptimizerError(LlgError, RuntimeError):
    """Raised when the optimizer cannot evaluate its starting point"""
    pass


class BlowUpError(LlgError, RuntimeError):
    """
    Raised when a trajectory leaves the finite/bounded regime

    Carries the step index, time and the last finite state so callers
    can report where the path went wrong.
    """

    def __init__(self, message: str, step: int, time: float, last_state: Optional[object] = None):
        super().__init__(message)
        self.step = step
        self.time = time
        self.last_state = last_state
