"""Exception hierarchy for wignerflow.

Numerical failures carry the name of the failing operation so batch runs can
report the origin (CLI exit code 3); configuration problems collect all
violations at once (exit code 2).
"""


class WignerFlowError(Exception):
    """Base class for all wignerflow errors."""


class ValidationError(WignerFlowError):
    """Invalid configuration or domain object; carries every violation."""

    def __init__(self, violations):
        if isinstance(violations, str):
            violations = [violations]
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class UnsupportedOrderError(WignerFlowError):
    """Quantum number beyond the validated range of the recurrence."""


class NoSuchBoundStateError(WignerFlowError):
    """Morse quantum number at or above the bound state count."""


class InsufficientQuadratureWindowError(WignerFlowError):
    """Wavefunction tail not negligible at the quadrature window edge."""


class TruncationNotConvergedError(WignerFlowError):
    """hbar series not converged by the allowed maximum order."""

    def __init__(self, message, last_term_norm):
        super().__init__(message)
        self.last_term_norm = last_term_norm


class GridMismatchError(WignerFlowError):
    """Fields passed to one operation live on different grids."""


class LoopThroughStagnationError(WignerFlowError):
    """Winding-number loop passes through a zero of the vector field."""


class WindingNotConvergedError(WignerFlowError):
    """Adaptive loop refinement exceeded the sample budget."""
