"""Exception types raised across the package."""


class ThicksetError(Exception):
    """Base class for all package errors."""


class MalformedDescriptor(ThicksetError):
    pass


class DepthOverflow(ThicksetError):
    pass


class DimensionMismatch(ThicksetError):
    pass


class EmptyHull(ThicksetError):
    pass


class InvalidGrid(ThicksetError):
    pass


class OutOfRange(ThicksetError):
    pass


class NonConvexGap(ThicksetError):
    pass


class LineMissesSet(ThicksetError):
    pass


class UnsupportedShapePair(ThicksetError):
    pass


class NotLinkedSets(ThicksetError):
    pass


class IterationBudgetExceeded(ThicksetError):
    pass


class InvalidC(ThicksetError):
    pass


class NoFeasibleC(ThicksetError):
    pass


class IllegalMove(ThicksetError):
    """Base for referee rejections."""


class IllegalRadius(IllegalMove):
    pass


class NotNested(IllegalMove):
    pass


class BudgetExceeded(IllegalMove):
    pass


class MultipleSetsAtCZero(IllegalMove):
    pass


class ExponentBudgetExceeded(ThicksetError):
    pass


class NoContainingBall(ThicksetError):
    pass


class MissingHistory(ThicksetError):
    pass


class SurvivorShortfall(ThicksetError):
    def __init__(self, message, node=None):
        super().__init__(message)
        self.node = node


class InfeasibleParams(ThicksetError):
    pass


class RasterBudgetExceeded(ThicksetError):
    pass


class DegenerateRange(ThicksetError):
    pass


class EmptyAtThisDepth(ThicksetError):
    """No certified witness at this depth. Not a disproof."""


class ScaffoldBudgetExceeded(ThicksetError):
    pass
