"""Exception types shared across the package."""

from __future__ import annotations


class HolonomicError(Exception):
    """Base class for all errors raised by this package."""


class DivisionError(HolonomicError):
    """Exact polynomial division left a nonzero remainder."""


class NoSolution(HolonomicError):
    """An inconsistent linear system was asked for a solution."""


class PoleError(HolonomicError):
    """Numeric evaluation hit a (near-)vanishing denominator."""


class KindError(HolonomicError):
    """A generator was attached to a variable of the wrong kind."""


class AlgebraError(HolonomicError):
    """Operands live in different algebras, or an algebra is malformed."""


class DegenerateScale(HolonomicError):
    """An argument rewrite was requested with zero slope."""


class NotDFiniteError(HolonomicError):
    """The staircase is infinite: the ideal is not d-finite of finite rank."""


# historical alias used by some call sites
FiniteRankError = NotDFiniteError


class UnsupportedExpression(HolonomicError):
    """The expression falls outside the supported hyperexponential /
    hypergeometric / Laguerre closure fragment."""


class SearchExhausted(HolonomicError):
    """A bounded search (telescoper order/degree, dependency rank cap)
    ran out of room.  The message records the caps that were hit."""


class ZeroFunctionWarning(UserWarning):
    """An operator acted as zero on the function: the annihilator is the
    whole algebra."""


class InvalidCertificate(HolonomicError):
    """A claimed telescoper/certificate pair fails exact ideal membership."""


class InhomogeneousResidual(HolonomicError):
    """Boundary terms do not vanish and no homogenization was possible.

    The partially built recurrence (with its inhomogeneity marker) is
    attached as ``.recurrence``.
    """

    def __init__(self, message, recurrence=None):
        super().__init__(message)
        self.recurrence = recurrence


class ParameterError(HolonomicError):
    """Physically inadmissible Coulomb parameters."""


class RelationDegenerate(HolonomicError):
    """Reduction modulo the parameter relations annihilated a denominator."""


class DivergentIntegral(HolonomicError):
    """The model integral diverges (decay <= 0 or exponent <= -1)."""


class ParseError(HolonomicError):
    """Malformed input text.  Carries a character position."""

    def __init__(self, message, position=None):
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)
        self.position = position
