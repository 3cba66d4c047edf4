"""Exception types shared across the package."""


class WeakloopError(Exception):
    """Base class for all errors raised by this package."""


class DiscretizationError(WeakloopError):
    """Zero-order-hold discretization produced or received non-finite data."""


class StabilityError(WeakloopError):
    """A continuous-time system fails the stability precondition."""


class SingularityError(WeakloopError):
    """A matrix that must be invertible is singular."""


class NumericalError(WeakloopError):
    """Non-finite values appeared in a numeric computation."""


class SelectionError(WeakloopError):
    """A selection parameter lies outside the admissible range."""


class OptimizationError(WeakloopError):
    """An iterative optimizer failed to converge."""


class DecisionPendingError(WeakloopError):
    """An external decision maker has not submitted a selection yet."""


class InteriorityError(WeakloopError):
    """Hyperplane data was recorded from a non-interior optimum."""


class RankError(WeakloopError):
    """The stacked direction matrix does not have full row rank."""


class DegenerateDirectionError(WeakloopError):
    """The nominal action coincides with the estimated optimum."""


class UnboundedGammaError(WeakloopError):
    """The expansion direction is invisible to the performance criterion."""


class InstabilityError(WeakloopError):
    """The closed-loop state diverged during a probe run."""


class NotSettledError(WeakloopError):
    """A trajectory window did not meet the steady-state spread criterion."""


class ConfigError(WeakloopError):
    """A scenario configuration is malformed or inconsistent."""
