"""Exception hierarchy shared across the package."""


class QPVerifyError(Exception):
    """Base class for all package errors."""


class DomainError(QPVerifyError, ValueError):
    """Input outside the supported numeric domain (nome, orientation, ...)."""


class EvalOverflowError(QPVerifyError, OverflowError):
    """An accumulated exponent exceeds the representable double range."""


class ParseError(QPVerifyError, ValueError):
    """Syntax error in the expression language, with a character position."""

    def __init__(self, message: str, position: int | None = None):
        self.position = position
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)


class UnknownFunctionError(ParseError):
    """A call to a function name outside the sigma/theta vocabulary."""


class UndeclaredSymbolError(ParseError):
    """An argument uses a symbol that was not declared."""


class FamilyMixError(QPVerifyError, ValueError):
    """Sigma and theta factors mixed where a single period lattice is required."""


class NonPeriodShiftError(QPVerifyError, ValueError):
    """A factor argument shifts by an amount that is not reducible to its lattice."""


class MultiplierMismatchError(QPVerifyError, ValueError):
    """Terms of an expression do not share a common quasi-periodicity multiplier."""

    def __init__(self, message: str, offenders: list[str] | None = None):
        self.offenders = offenders or []
        super().__init__(message)


class IrreducibleMonomialError(QPVerifyError, ValueError):
    """A zero-count expansion left monomials that are not rational multiples of 2*pi*i."""


class ProbeDegeneracyError(QPVerifyError, ArithmeticError):
    """All probe points for a lattice quantity landed too close to a zero."""


class PoleError(QPVerifyError, ArithmeticError):
    """Evaluation requested at (or too near) a pole."""


class DegenerateEvalError(QPVerifyError, ArithmeticError):
    """A consistency ratio would divide by a value below the degeneracy threshold."""


class BoundaryZeroError(QPVerifyError, ArithmeticError):
    """|f| dropped below threshold on a contour; the caller should re-base."""


class BudgetExceededError(QPVerifyError, RuntimeError):
    """An adaptive routine hit its sample or subdivision budget."""


class InconsistentWindingError(QPVerifyError, RuntimeError):
    """Sub-cell winding numbers do not sum to the parent winding."""


class NoAdmissibleBaseError(QPVerifyError, RuntimeError):
    """No parallelogram base with a zero-free boundary was found.

    For candidate identities this usually means the function is numerically
    identically zero, so zero counting does not apply.
    """
