"""Exception types shared across the toolkit."""


class AwisimError(Exception):
    """Base class for all toolkit-specific errors."""


class IntegrationError(AwisimError):
    """Adaptive integrator could not continue (step size underflow).

    Carries the time actually reached in ``t_reached``.
    """

    def __init__(self, message: str, t_reached: float):
        super().__init__(message)
        self.t_reached = t_reached


class MultipleSteadyStatesError(AwisimError):
    """The Liouvillian null space has dimension > 1 (degenerate stationary manifold)."""


class StepSizeTooLargeError(AwisimError):
    """Total jump probability per step exceeded 0.1; first-order jump sampling invalid."""


class EmptyStatisticsError(AwisimError):
    """No complete coherent periods available to build statistics from."""


class DivergentIntegralError(AwisimError):
    """A non-decaying eigenmode contributes to an amplitude integral."""


class InvariantViolationError(AwisimError):
    """A density-matrix invariant (trace, hermiticity, positivity) drifted beyond tolerance."""


class DegenerateChainError(AwisimError):
    """The jump chain has a non-unique stationary distribution."""


class RegimeWarning(UserWarning):
    """Parameters fall outside the weak-probe / strong-driving validity regime."""
