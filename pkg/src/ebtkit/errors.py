"""Exception hierarchy shared by every ebtkit module."""


class EbtError(Exception):
    """Base class for all ebtkit errors."""


class DimensionMismatch(EbtError, ValueError):
    pass


class ShapeMismatch(DimensionMismatch):
    pass


class NotHermitian(EbtError, ValueError):
    pass


class NotPsd(EbtError, ValueError):
    def __init__(self, message: str, index: int | None = None, min_eigenvalue: float | None = None):
        super().__init__(message)
        self.index = index
        self.min_eigenvalue = min_eigenvalue


class IncompleteSum(EbtError, ValueError):
    def __init__(self, message: str, residual: float):
        super().__init__(message)
        self.residual = residual


class InvalidState(EbtError, ValueError):
    pass


class RankTooHigh(EbtError, ValueError):
    def __init__(self, message: str, index: int):
        super().__init__(message)
        self.index = index


class MarginalNotMaximallyMixed(EbtError, ValueError):
    pass


class NonOrthonormalBasis(EbtError, ValueError):
    pass


class IncompleteProjectors(EbtError, ValueError):
    pass


class NotTracePreserving(EbtError, ValueError):
    pass


class PreconditionRankMismatch(EbtError, ValueError):
    pass


class MergeStall(EbtError, RuntimeError):
    pass


class NotEbtInput(EbtError, ValueError):
    pass


class NotEbt(EbtError, ValueError):
    pass


class UnsupportedDimension(EbtError, ValueError):
    pass


class NonHermiticityPreserving(EbtError, ValueError):
    pass
