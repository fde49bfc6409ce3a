"""Exception and warning types raised across the package."""


class SpecMismatchError(ValueError):
    """Objects from two different groups were combined."""


class NormalizationError(ValueError):
    """A vector or state violates its normalization constraint."""


class TheoremViolationError(ArithmeticError):
    """A structural identity that must hold exactly failed numerically.

    Seeing this means a bug in the implementation, not bad input.
    """


class IllConditionedError(ValueError):
    """Reconstruction was refused because some multiplier vanishes."""

    def __init__(self, message, worst_point=None, min_modulus=None):
        super().__init__(message)
        self.worst_point = worst_point
        self.min_modulus = min_modulus


class GridTooSmallError(ValueError):
    """Quadrature grid does not cover the support required by the check."""


class TruncationWarning(UserWarning):
    """Fock-space truncation is too small for the requested displacement."""
