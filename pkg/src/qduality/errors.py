"""Exception types raised across the package."""


class QDualityError(ValueError):
    """Base class for all package errors."""


class NonHermitian(QDualityError):
    pass


class NotDensityMatrix(QDualityError):
    pass


class BadProbabilities(QDualityError):
    pass


class BadParameter(QDualityError):
    pass


class NotUnitary(QDualityError):
    pass


class ZeroProbability(QDualityError):
    pass


class NotComplementary(QDualityError):
    pass


class BadOrdering(QDualityError):
    pass


class SingularMarginal(QDualityError):
    """A single-qubit marginal is rank deficient, so filtering cannot reach Bell-diagonal form."""


class NotConverged(QDualityError):
    """Filtering hit its iteration cap. The partial result is kept on ``outcome``."""

    def __init__(self, message, outcome=None):
        super().__init__(message)
        self.outcome = outcome


class MonotonicityViolation(QDualityError):
    """Filtering lowered the maximal Bell factor."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report
