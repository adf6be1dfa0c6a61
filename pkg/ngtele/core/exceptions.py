"""
Error types raised by the ngtele numerics
"""


class NGTeleError(Exception):
    """Base class for every error raised by the library"""


class ParameterDomainError(NGTeleError, ValueError):
    """A physical parameter lies outside its admissible range"""


class DimensionMismatchError(NGTeleError, ValueError):
    """Vector/matrix sizes do not agree with the mode count"""


class SymplecticityError(NGTeleError, ValueError):
    """A matrix that should be symplectic is not"""


class SeriesCapacityError(NGTeleError, MemoryError):
    """A truncated series would exceed the configured size"""


class ContractViolationError(NGTeleError, ValueError):
    """A caller broke an operation's precondition"""


class DivergentIntegralError(NGTeleError, ArithmeticError):
    """A Gaussian weight is not positive definite"""


class DegenerateHeraldError(NGTeleError, ArithmeticError):
    """The heralding event has (numerically) zero probability"""


class InternalConsistencyError(NGTeleError, ArithmeticError):
    """A computed quantity violates a property that must hold exactly"""


class CutoffError(NGTeleError, ValueError):
    """The Fock truncation loses too much probability"""
