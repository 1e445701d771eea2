"""Exception hierarchy shared by all unigen modules."""


class UnigenError(Exception):
    """Base class for every error raised by unigen."""


class NonFinite(UnigenError, ValueError):
    pass


class DimMismatch(UnigenError, ValueError):
    pass


class EmptyInput(UnigenError, ValueError):
    pass


class InvalidDims(UnigenError, ValueError):
    pass


class IndexOutOfRange(UnigenError, IndexError):
    pass


class NotInGroup(UnigenError, ValueError):
    pass


class NotInAlgebra(UnigenError, ValueError):
    pass


class BranchCut(UnigenError, ValueError):
    """An eigenvalue sits on (or too close to) the negative real axis."""


class DepthExceeded(UnigenError, RuntimeError):
    pass


class StuckNoIndependentConjugate(UnigenError, RuntimeError):
    def __init__(self, message, best_score=0.0):
        super().__init__(message)
        self.best_score = best_score


class NoConvergence(UnigenError, RuntimeError):
    def __init__(self, message, residual=float("nan"), condition=float("nan")):
        super().__init__(message)
        self.residual = residual
        self.condition = condition


class CoverageNotReached(UnigenError, RuntimeError):
    """Raised when net validation finds a gap wider than the net radius.

    The offending net is attached as ``.net`` so callers can still use it.
    """

    def __init__(self, message, net=None):
        super().__init__(message)
        self.net = net


class BudgetExhausted(UnigenError, RuntimeError):
    def __init__(self, message, best_t=float("nan"), best_error=float("inf"), letter=None):
        super().__init__(message)
        self.best_t = best_t
        self.best_error = best_error
        self.letter = letter
