"""Exception types shared across the package."""


class ChevDiophError(Exception):
    """Base class for every error raised by this package."""


class IllegalRank(ChevDiophError):
    pass


class CapExceeded(ChevDiophError):
    pass


class UnknownConvention(ChevDiophError):
    pass


class KindMismatch(ChevDiophError):
    pass


class PeelFailure(ChevDiophError):
    pass


class BadModulus(ChevDiophError):
    pass


class ReducibleModulusPolynomial(ChevDiophError):
    pass


class InfiniteRing(ChevDiophError):
    pass


class NotLocal(ChevDiophError):
    pass


class NonUnitParameter(ChevDiophError):
    pass


class NonUnitDenominator(ChevDiophError):
    pass


class BudgetExceeded(ChevDiophError):
    pass


class RewriteDivergence(ChevDiophError):
    pass


class TargetUnavailable(ChevDiophError):
    pass


class CaseUnavailable(ChevDiophError):
    pass


class UnknownSymbol(ChevDiophError):
    pass


class ParseError(ChevDiophError):
    """Malformed input text; carries 1-based line and column."""

    def __init__(self, message, line=0, col=0):
        self.line = line
        self.col = col
        super().__init__(f"{message} (line {line}, col {col})")


# The public name used by the equation grammar.
SyntaxError = ParseError  # noqa: A001
