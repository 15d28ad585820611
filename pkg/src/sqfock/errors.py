"""Exception hierarchy shared by all modules.

The CLI maps these onto exit codes: configuration problems exit 2,
numeric-contract violations (norm/trace drift, convergence failures)
exit 3, and eigenstate-tracking / bracketing failures exit 4.
"""


class ToolkitError(Exception):
    """Base class for all toolkit errors."""


class ConfigError(ToolkitError):
    """Invalid or incomplete experiment configuration (exit code 2)."""


class InvalidCutoffError(ToolkitError):
    """Fock cutoff too small to represent the target states."""


class CutoffTooSmallError(ToolkitError):
    """Operator construction lost unitarity at the requested cutoff."""


class InstabilityError(ToolkitError):
    """Parametric drive amplitude at or beyond the cavity detuning."""


class SingularFrequencyError(ToolkitError):
    """Effective cavity frequency of zero makes the closed forms singular."""


class ContractViolationError(ToolkitError):
    """An operation received input violating its stated contract (exit code 3)."""


class StepSizeError(ContractViolationError):
    """Integrator norm/trace/positivity drift beyond tolerance; reduce dt."""


class ConvergenceError(ContractViolationError):
    """Automatic convergence re-run moved a headline observable too much."""


class TrackingError(ToolkitError):
    """Eigenstate identification or branch continuation ambiguous (exit code 4)."""


class BracketError(ToolkitError):
    """Scan interval does not bracket a gap minimum (exit code 4)."""


class DegenerateGapError(ToolkitError):
    """Zero level splitting; oscillation period undefined."""


class DimensionMismatchError(ToolkitError):
    """Operator/state dimensions are inconsistent."""
