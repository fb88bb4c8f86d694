"""Exception hierarchy shared by every slicedom module."""


class SliceDomError(ValueError):
    """Base class for all domain errors raised by slicedom."""


class NotAUnit(SliceDomError):
    """A quaternion failed the imaginary-unit invariants (purity or norm)."""

    def __init__(self, message, invariant="ImaginaryUnit"):
        super().__init__(message)
        self.invariant = invariant


class ShapeMismatch(SliceDomError):
    pass


class Singular(SliceDomError):
    pass


class SizeCap(SliceDomError):
    pass


class NotFullSliceRank(SliceDomError):
    def __init__(self, message, level=None):
        super().__init__(message)
        self.level = level


class DegenerateSlices(SliceDomError):
    pass


class NotOrthogonal(SliceDomError):
    pass


class EvaluationOutsideDomain(SliceDomError):
    pass


class LengthMismatch(SliceDomError):
    pass


class BrokenJunction(SliceDomError):
    pass


class ParameterOutOfRange(SliceDomError):
    pass


class SingularityHit(SliceDomError):
    pass


class TruncationBudgetExceeded(SliceDomError):
    pass


class HorizonExceeded(SliceDomError):
    pass


class OnCut(SliceDomError):
    pass
