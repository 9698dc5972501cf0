"""Exception hierarchy shared by every subpackage."""

from __future__ import annotations


class RenormLabError(Exception):
    """Base class; carries an optional witness for reports."""

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


class EmptyInput(RenormLabError, ValueError):
    pass


class ExpressionError(RenormLabError, ValueError):
    """Expression could not be parsed or lies outside the monotone rule set."""


class OrderUndecidable(RenormLabError):
    """A first-difference scan exceeded the scan cap."""


class MalformedFamily(RenormLabError, ValueError):
    pass


class NotSeparable(RenormLabError):
    pass


class NotInZ0(RenormLabError, ValueError):
    pass


class UnknownNode(RenormLabError, KeyError):
    def __str__(self) -> str:  # KeyError quotes its argument otherwise
        return self.args[0]


class SizeLimit(RenormLabError, ValueError):
    pass


class NotIncreasing(RenormLabError, ValueError):
    pass


class EmptyIntersection(RenormLabError, ValueError):
    pass


class NonChainPlateau(RenormLabError, ValueError):
    pass


class PreconditionFailed(RenormLabError, ValueError):
    pass


class WedgeViolation(RenormLabError, ValueError):
    pass


class NonConvergence(RenormLabError, ArithmeticError):
    pass


class PlateauViolation(RenormLabError, ValueError):
    pass


class SandwichViolation(RenormLabError, ValueError):
    pass


class ToleranceBreach(RenormLabError, ArithmeticError):
    pass


class IllegalMove(RenormLabError, ValueError):
    pass


class NoFixedPair(RenormLabError):
    pass


class ParseError(RenormLabError, ValueError):
    pass


class ValidationError(RenormLabError, ValueError):
    pass
