"""Exception hierarchy shared by every stage of the toolkit."""


class MixLassoError(Exception):
    """Base class for all errors raised by this package."""


# -- data -------------------------------------------------------------------

class DataError(MixLassoError, ValueError):
    pass


class EmptyFile(DataError):
    pass


class MissingHeader(DataError):
    pass


class UnknownLabelColumn(DataError):
    def __init__(self, column):
        super().__init__(f"label column {column!r} not found in header")
        self.column = column


class NonNumericCell(DataError):
    def __init__(self, row, col, value):
        super().__init__(f"non-numeric or non-finite cell at row {row}, column {col!r}: {value!r}")
        self.row = row
        self.col = col
        self.value = value


class UnknownLevel(DataError):
    def __init__(self, level):
        super().__init__(f"unknown label level {level!r}")
        self.level = level


class ZeroVarianceColumn(DataError):
    def __init__(self, j):
        super().__init__(f"column {j} has zero sample variance")
        self.j = j


class IndexOutOfRange(DataError, IndexError):
    pass


class EmptySelection(DataError):
    pass


class DimensionMismatch(MixLassoError, ValueError):
    pass


# -- pca --------------------------------------------------------------------

class InvalidK(MixLassoError, ValueError):
    pass


class RankDeficient(MixLassoError):
    pass


# -- gmm --------------------------------------------------------------------

class NotPositiveDefinite(MixLassoError, ValueError):
    pass


class DegenerateComponent(MixLassoError):
    def __init__(self, k, mass=None):
        msg = f"mixture component {k} collapsed"
        if mass is not None:
            msg += f" (total responsibility {mass:.3g})"
        super().__init__(msg)
        self.k = k
        self.mass = mass


class ScanError(MixLassoError):
    def __init__(self, K, cause):
        super().__init__(f"K={K}: {cause}")
        self.K = K
        self.cause = cause


# -- lasso ------------------------------------------------------------------

class InvalidProblem(MixLassoError, ValueError):
    pass


class NoConvergence(MixLassoError):
    """Coordinate descent hit ``max_iter``; ``coef`` holds the last iterate."""

    def __init__(self, max_iter, coef, lam=None):
        msg = f"no convergence after {max_iter} sweeps"
        if lam is not None:
            msg += f" at lambda={lam!r}"
        super().__init__(msg)
        self.max_iter = max_iter
        self.coef = coef
        self.lam = lam


class DegenerateStep(MixLassoError):
    pass


# -- pipeline / cli ---------------------------------------------------------

class EmptyCluster(MixLassoError):
    pass


class StageError(MixLassoError):
    """Wraps any failure with the name of the pipeline stage that raised it."""

    def __init__(self, stage, cause):
        super().__init__(f"{stage}: {cause}")
        self.stage = stage
        self.cause = cause


class MalformedInput(MixLassoError, ValueError):
    def __init__(self, row, reason=""):
        msg = f"malformed input at row {row}"
        if reason:
            msg += f": {reason}"
        super().__init__(msg)
        self.row = row
