"""Diagnostics raised by the compiler.

Every diagnostic carries an optional source line so the CLI can report
``file:line: message``.
"""

from __future__ import annotations


class Asm2QError(Exception):
    """Base class for every compiler diagnostic."""

    def __init__(self, message: str, line: int | None = None):
        super().__init__(message)
        self.message = message
        self.line = line

    def at(self, line: int | None) -> "Asm2QError":
        """Attach a source line if none is recorded yet; returns self."""
        if self.line is None:
            self.line = line
        return self

    def __str__(self) -> str:
        if self.line is None:
            return self.message
        return f"line {self.line}: {self.message}"


# frontend
class MalformedHeader(Asm2QError):
    pass


class OutOfRange(Asm2QError):
    pass


class BadToken(Asm2QError):
    pass


class UnknownMnemonic(Asm2QError):
    pass


class ArityMismatch(Asm2QError):
    pass


class UnsupportedInstruction(Asm2QError):
    pass


class OracleStructure(Asm2QError):
    pass


class UnknownKeyWarning(UserWarning):
    """An unrecognised key in the JSON header; it is ignored."""


# circuit IR
class DuplicateRegister(Asm2QError):
    pass


class IndexOutOfRange(Asm2QError):
    pass


class NotInvertible(Asm2QError):
    pass


# lowering
class OverlappingRanges(Asm2QError):
    pass


class RewriteInCoherentMode(Asm2QError):
    pass


class MissingCarrySource(Asm2QError):
    pass


class WidthMismatch(Asm2QError):
    pass


# simulator
class TooManyQubits(Asm2QError):
    pass
