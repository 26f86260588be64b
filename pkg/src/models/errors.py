"""
Exception hierarchy and structured diagnostics.
"""

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Tuple


@dataclass(frozen=True)
class Diagnostic:
    """A single problem found while loading, checking or parsing.

    Args:
        code: Short machine-readable identifier, e.g. ``"prox-variable"``.
        message: Human-readable explanation.
        line: 1-based source line, when the problem has a source location.
        column: 1-based source column.
        path: Location inside a proof tree, as child indices from the root.
    """

    code: str
    message: str
    line: Optional[int] = None
    column: Optional[int] = None
    path: Optional[Tuple[int, ...]] = None

    def __str__(self) -> str:
        location = ""
        if self.line is not None:
            location = f"{self.line}:{self.column or 0}: "
        where = ""
        if self.path is not None:
            where = " at node " + "/".join(["root", *(str(i) for i in self.path)])
        return f"{location}[{self.code}] {self.message}{where}"


class SqclpError(Exception):
    """Base class for every error raised by the engine."""


class QualificationDomainError(SqclpError):
    """A value lies outside its qualification domain, or two domains disagree."""


class SyntaxObjectError(SqclpError):
    """Malformed syntax object (wrong kind, wrong arity)."""


class ConstraintError(SqclpError):
    """Malformed constraint or primitive not supported by the constraint domain."""


class UnsatisfiableError(ConstraintError):
    """A solved form was requested for an unsatisfiable constraint set."""


class EmbeddingError(SqclpError):
    """Encoding or decoding outside the range of a qualification embedding."""


class ProofError(SqclpError):
    """A proof tree refers to something the program does not have."""


class DiagnosticError(SqclpError):
    """An error that carries a list of diagnostics."""

    def __init__(self, message: str, diagnostics: Iterable[Diagnostic] = ()):
        self.message = message
        self.diagnostics: Sequence[Diagnostic] = tuple(diagnostics)
        detail = "; ".join(str(d) for d in self.diagnostics)
        super().__init__(f"{message}: {detail}" if detail else message)


class ProgramError(DiagnosticError):
    """The program is not admissible for its scheme parameters."""


class ParseError(DiagnosticError):
    """Source text does not follow the concrete syntax."""

    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None,
                 diagnostics: Iterable[Diagnostic] = ()):
        self.line = line
        self.column = column
        diagnostics = tuple(diagnostics) or (Diagnostic("parse", message, line, column),)
        super().__init__("cannot parse input", diagnostics)
