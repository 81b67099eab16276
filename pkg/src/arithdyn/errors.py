"""
Custom exceptions for arithdyn.
"""


class ArithdynError(Exception):
    """Base exception for arithdyn errors."""

    pass


class SpecParseError(ArithdynError):
    """Error parsing a textual specification (base, alpha, window, ...).

    When the failure can be pinned to a character, ``position`` holds its
    zero-based index.
    """

    def __init__(self, message: str, position: int | None = None):
        super().__init__(message)
        self.position = position


class FieldMismatchError(ArithdynError):
    """Operands belong to different number fields."""

    pass


class ZeroDivisionInFieldError(ArithdynError, ZeroDivisionError):
    """Division by an exact zero field element."""

    pass


class IrreduciblePolynomialError(ArithdynError):
    """A minimal polynomial was rejected.

    Raised when the polynomial factors over the rationals, has no real root
    above 1, or is too large to check and was not trusted by the caller.
    """

    def __init__(self, message: str, factors: list = None):
        super().__init__(message)
        self.factors = factors or []


class OutOfRangeError(ArithdynError):
    """An argument lies outside the documented domain of an operation."""

    def __init__(self, message: str, value=None, interval: tuple = None):
        super().__init__(message)
        self.value = value
        self.interval = interval


class InadmissibleError(ArithdynError):
    """A digit sequence violates the incidence rules of its compactum."""

    def __init__(self, message: str, position: int | None = None):
        super().__init__(message)
        self.position = position


class BoundaryUndecidedError(ArithdynError):
    """A threshold comparison fell inside the requested resolution."""

    def __init__(self, message: str, threshold=None):
        super().__init__(message)
        self.threshold = threshold


class PrecisionError(ArithdynError):
    """Interval refinement ran out of its precision budget."""

    pass


class RationalInputError(ArithdynError):
    """A rational number was given where an irrational one is required."""

    pass


class UndecidableAtDepthError(ArithdynError):
    """A finite prefix is too short to decide the question asked."""

    def __init__(self, message: str, depth: int | None = None):
        super().__init__(message)
        self.depth = depth


class SemiconjugacyError(ArithdynError):
    """The identity B·M_beta = M·B failed for an assembled matrix."""

    pass


class NotAlgebraicError(ArithdynError):
    """An exact algebraic base is required but a numeric one was given."""

    pass


class NotHomoclinicError(ArithdynError):
    """The field element does not define a homoclinic point."""

    pass


class BlockResidualError(ArithdynError):
    """A golden-ratio word does not split completely into blocks.

    The unparsed tail is kept in ``residual``.
    """

    def __init__(self, message: str, residual: str = ""):
        super().__init__(message)
        self.residual = residual
