"""Exception hierarchy shared by all modules."""


class GhaError(Exception):
    """Base class for every error raised by this package."""


# algebra
class NonMonotonicLadder(GhaError, ValueError):
    pass


class NonFinite(GhaError, ArithmeticError):
    pass


class NegativeSquare(GhaError, ValueError):
    pass


class DimensionMismatch(GhaError, ValueError):
    pass


class TruncationOverflow(GhaError):
    """A† applied to a state with weight on the top level of the truncated space."""


class IndexOutOfRange(GhaError, IndexError):
    pass


# power-law spectrum
class MissingPhysicalParams(GhaError, ValueError):
    pass


class PhysicalModeUnsupported(GhaError, ValueError):
    pass


class Inconclusive(GhaError):
    pass


# numerics
class DomainError(GhaError, ValueError):
    pass


class TailNotConverged(GhaError, ArithmeticError):
    pass


class NoConvergence(GhaError, ArithmeticError):
    pass


# coherent states / resolution of unity
class SpecMismatch(GhaError, ValueError):
    pass


class VacuumUndefined(GhaError, ValueError):
    pass


class QuadratureFailure(NoConvergence):
    pass


class NonPositiveWeight(GhaError, ValueError):
    pass
