"""Exception types shared across the package."""


class ConvergenceError(RuntimeError):
    """An iterative solver ran out of iterations.

    Carries the last iterate so callers can inspect or restart from it.
    """

    def __init__(self, message, *, last_iterate=None, residual=None, iterations=None):
        super().__init__(message)
        self.last_iterate = last_iterate
        self.residual = residual
        self.iterations = iterations


class StiffnessError(RuntimeError):
    """Adaptive step size collapsed below the hard floor during integration."""

    def __init__(self, message, *, t=None, state=None, step=None):
        super().__init__(message)
        self.t = t
        self.state = state
        self.step = step


class RegimeViolationError(ValueError):
    """Parameters fall outside the regime an operation is defined for."""


class SingularLinearizationError(RuntimeError):
    """The 2x2 self-consistency system of the linearization is not invertible."""

    def __init__(self, message, *, determinant=None):
        super().__init__(message)
        self.determinant = determinant
