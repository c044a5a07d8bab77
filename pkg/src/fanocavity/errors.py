"""Exception types raised by the model, solvers and I/O layers."""


class FanoCavityError(Exception):
    """Base class for all package-specific failures."""


class SusceptibilityPoleError(FanoCavityError):
    """Mechanical response evaluated exactly on an undamped resonance."""


class DegenerateResonanceError(FanoCavityError):
    """Optical steady-state denominator vanished (cannot occur for kappa > 0)."""


class ConvergenceError(FanoCavityError):
    """Fixed-point iteration hit the iteration cap before reaching tolerance.

    Carries the last iterate so callers can inspect possible bistability.
    """

    def __init__(self, message, last=None):
        super().__init__(message)
        self.last = last


class DivergenceError(FanoCavityError):
    """Iteration produced a non-finite iterate."""


class IllConditionedError(FanoCavityError):
    """Linear solve residual did not meet tolerance after refinement."""

    def __init__(self, message, condition=None):
        super().__init__(message)
        self.condition = condition


class AssumptionError(FanoCavityError):
    """Closed-form evaluator called outside its validity regime."""


class SingularCoefficientError(FanoCavityError):
    """Closed-form coefficient denominator vanished."""


class InsufficientDipsError(FanoCavityError):
    """Fewer than two dips found; spectrum is in the single-feature regime."""


class ConfigError(FanoCavityError):
    """Malformed configuration document or invalid value."""
