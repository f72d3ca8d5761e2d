"""Exception and warning types raised by the library."""


class DomainError(ValueError):
    """An argument lies outside the domain of the function."""


class PoleError(DomainError):
    """Evaluation at a pole, e.g. epsilon = -C where tau = (omega/2)/(C + epsilon)."""


class DegenerateRecursionError(ArithmeticError):
    """A three-term recursion has a vanishing leading coefficient."""


class NoPartnerError(LookupError):
    """A bound state has no degenerate partner in the sign-flipped problem."""


class ThresholdDivergence(ArithmeticError):
    """A quantity diverges at the rest-mass threshold |epsilon| = 1."""


class ConvergenceError(RuntimeError):
    """A numerical procedure failed to converge."""


class WeightRegimeWarning(UserWarning):
    """The dual Hahn weight is used outside its positive-measure parameter regime."""


class AccuracyWarning(UserWarning):
    """A quadrature rule is too short to integrate the integrand exactly."""
