"""Exception types shared across the package."""

from __future__ import annotations


class StepDualError(Exception):
    """Base class for all errors raised by :mod:`stepdual`."""


class CapExceeded(StepDualError):
    """An enumeration or construction would exceed its configured size cap."""

    def __init__(self, what: str, size: int, cap: int, level: int | None = None):
        self.what = what
        self.size = size
        self.cap = cap
        self.level = level
        where = f" at level {level}" if level is not None else ""
        shown = f"about 2^{size.bit_length() - 1}" if size.bit_length() > 64 else str(size)
        super().__init__(f"{what}{where}: {shown} exceeds cap {cap}")


class InvalidStructure(StepDualError, ValueError):
    """A value failed the axioms checked on construction."""


class MixedLattice(StepDualError):
    """Elements of two different presented lattices were combined."""


class InconsistentPresentation(UserWarning):
    """A presentation has no admissible point, so its lattice is degenerate (0 = 1)."""


class NotASublattice(StepDualError, ValueError):
    pass


class NotADivisor(StepDualError, ValueError):
    pass


class OutOfRange(StepDualError, ValueError):
    pass


class DepthExceeded(StepDualError):
    pass


class UnboundVariable(StepDualError):
    pass


class UnknownSymbol(StepDualError):
    pass


class ArityMismatch(StepDualError):
    pass


class IndexOutOfWindow(StepDualError, IndexError):
    pass


class EmptyStructure(StepDualError, ValueError):
    pass


class FormulaNotInDomain(StepDualError):
    pass


class UnsupportedFormat(StepDualError, ValueError):
    pass


class ParseError(SyntaxError):
    """Syntax error carrying a 0-based position and the expected tokens."""

    def __init__(self, message: str, text: str, position: int, expected=()):
        expected = tuple(expected)
        detail = f" (expected {' or '.join(expected)})" if expected else ""
        super().__init__(f"{message} at position {position}{detail}")
        self.reason = message
        self.position = position
        self.expected = expected
        self.text = text
