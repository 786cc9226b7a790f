"""Exception types shared across the package."""


class InputError(ValueError):
    """Invalid user-supplied data (shapes, ranges, labels)."""


class NumericalError(RuntimeError):
    """A numerical routine failed to meet its tolerance."""


class EigenConvergenceError(NumericalError):
    def __init__(self, message, residual):
        super().__init__(f"{message} (residual {residual:.3e})")
        self.residual = residual
