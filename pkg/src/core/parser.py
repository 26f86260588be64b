"""
Parser for the textual syntax of programs, goals and constraint lists.

The grammar lives in ``assets/sqclp.lark``. Parsing produces raw syntax:
qualification literals stay uninterpreted (fractions, pairs, booleans or
``inf``) until :mod:`src.core.loader` checks them against the qualification
domain of the program.
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Any, Optional, Tuple

from lark import Lark, Token, Transformer, v_args
from lark.exceptions import UnexpectedEOF, UnexpectedInput, VisitError

from src.core.constraints import DOMAINS
from src.core.solver import Goal, GoalItem
from src.models.errors import ParseError, SqclpError
from src.models.qualification import ANY, BASIC_DOMAINS, INF, QualDomain, product
from src.models.syntax import (
    Apply,
    Atom,
    Basic,
    BodyItem,
    ConstraintSet,
    DefinedAtom,
    Equation,
    PrimitiveAtom,
    SymbolKind,
    Term,
    Var,
)
from src.utilities.helpers import format_rational, get_resource_path

GRAMMAR_FILE = "assets/sqclp.lark"
START_RULES = ("program", "goal", "constraints", "literal_entry", "term_entry", "qvalue_entry")


@dataclass(frozen=True)
class SymbolRef:
    """Symbol as written in a proximity declaration; unknown kind or arity is None."""

    name: str
    kind: Optional[SymbolKind] = None
    arity: Optional[int] = None

    def __str__(self) -> str:
        return self.name if self.arity is None else f"{self.name}/{self.arity}"


@dataclass(frozen=True)
class Directive:
    name: str
    value: Any
    line: Optional[int] = None


@dataclass(frozen=True)
class ProximityDecl:
    left: SymbolRef
    right: SymbolRef
    value: Any
    line: Optional[int] = None


@dataclass(frozen=True)
class SourceClause:
    """Clause before qualification values are checked; ``attenuation`` None stands for top."""

    head: DefinedAtom
    attenuation: Any
    body: Tuple[BodyItem, ...] = ()
    line: Optional[int] = None


@dataclass(frozen=True)
class SourceProgram:
    directives: Tuple[Directive, ...] = ()
    proximity: Tuple[ProximityDecl, ...] = ()
    clauses: Tuple[SourceClause, ...] = ()

    def directive(self, name: str) -> Optional[Directive]:
        found = [d for d in self.directives if d.name == name]
        return found[-1] if found else None


def _error(message: str, token: Optional[Token] = None, line: Optional[int] = None) -> ParseError:
    if token is not None:
        return ParseError(message, token.line, token.column)
    return ParseError(message, line)


class _SourceBuilder(Transformer):
    """Turns parse trees into syntax objects."""

    def program(self, items):
        directives = tuple(i for i in items if isinstance(i, Directive))
        proximity = tuple(i for i in items if isinstance(i, ProximityDecl))
        clauses = tuple(i for i in items if isinstance(i, SourceClause))
        return SourceProgram(directives, proximity, clauses)

    @v_args(meta=True)
    def qdom_directive(self, meta, children):
        return Directive("qdom", children[0], meta.line)

    def qdom_expr(self, children):
        domains = []
        for child in children:
            if isinstance(child, Token):
                if str(child) not in BASIC_DOMAINS:
                    raise _error(f"unknown qualification domain {child}", child)
                child = BASIC_DOMAINS[str(child)]
            domains.append(child)
        return product(*domains)

    @v_args(meta=True)
    def cdom_directive(self, meta, children):
        name = str(children[0])
        if name not in DOMAINS:
            raise _error(f"unknown constraint domain {name}", children[0])
        return Directive("cdom", name, meta.line)

    @v_args(meta=True)
    def preset_directive(self, meta, children):
        return Directive("preset", str(children[0]), meta.line)

    @v_args(meta=True)
    def proximity(self, meta, children):
        left, right, value = children
        return ProximityDecl(left, right, value, meta.line)

    @staticmethod
    def _arity(children) -> Optional[int]:
        if len(children) < 2:
            return None
        text = str(children[1])
        if not text.isdigit():
            raise _error(f"arity must be a natural number, got {text}", children[1])
        return int(text)

    def prox_name(self, children):
        return SymbolRef(str(children[0]), None, self._arity(children))

    def prox_prim(self, children):
        return SymbolRef(str(children[0]), SymbolKind.PRIMITIVE, self._arity(children))

    def prox_var(self, children):
        return SymbolRef(str(children[0]), SymbolKind.VARIABLE, 0)

    def prox_basic(self, children):
        return SymbolRef(format_rational(Fraction(str(children[0]))), SymbolKind.BASIC, 0)

    @staticmethod
    def _head(atom: Atom, line: Optional[int]) -> DefinedAtom:
        if not isinstance(atom, DefinedAtom):
            raise _error(f"clause head {atom} must be a defined atom", line=line)
        return atom

    @v_args(meta=True)
    def qualified_clause(self, meta, children):
        head, attenuation, *body = children
        return SourceClause(self._head(head, meta.line), attenuation, tuple(body[0]) if body else (), meta.line)

    @v_args(meta=True)
    def prolog_rule(self, meta, children):
        head, body = children
        return SourceClause(self._head(head, meta.line), None, tuple(body), meta.line)

    @v_args(meta=True)
    def fact(self, meta, children):
        return SourceClause(self._head(children[0], meta.line), None, (), meta.line)

    def body(self, children):
        return tuple(children)

    def body_item(self, children):
        threshold = children[1] if len(children) > 1 else ANY
        return BodyItem(children[0], threshold)

    def any_threshold(self, _):
        return ANY

    def goal(self, children):
        items = [c for c in children if isinstance(c, tuple) and len(c) == 2 and isinstance(c[0], Atom)]
        conditions = next((c for c in children if isinstance(c, list)), [])
        constraints = next((c for c in children if isinstance(c, ConstraintSet)), ConstraintSet())
        qvars = {str(qvar) for _, qvar in items}
        thresholds = {}
        for qvar, value in conditions:
            if str(qvar) not in qvars:
                raise _error(f"threshold condition on {qvar}, which qualifies no goal atom", qvar)
            if str(qvar) in thresholds:
                raise _error(f"more than one threshold condition on {qvar}", qvar)
            thresholds[str(qvar)] = value
        return Goal(tuple(GoalItem(atom, str(qvar), thresholds.get(str(qvar), ANY)) for atom, qvar in items),
                    constraints)

    def goal_item(self, children):
        return (children[0], children[1])

    def conditions(self, children):
        return list(children)

    def condition(self, children):
        return (children[0], children[1])

    def pi(self, children):
        return ConstraintSet(children)

    def constraints(self, children):
        return ConstraintSet(children)

    def equation(self, children):
        return Equation(children[0], children[1])

    def primitive(self, children):
        return PrimitiveAtom(str(children[0]), children[1])

    def defined(self, children):
        return DefinedAtom(str(children[0]), children[1] if len(children) > 1 else ())

    def var(self, children):
        return Var(str(children[0]))

    def basic(self, children):
        return Basic(Fraction(str(children[0])))

    def apply(self, children):
        return Apply(str(children[0]), children[1] if len(children) > 1 else ())

    def terms(self, children):
        return tuple(children)

    def qnumber(self, children):
        return Fraction(str(children[0]))

    def qpair(self, children):
        return (children[0], children[1])

    def qtrue(self, _):
        return True

    def qfalse(self, _):
        return False

    def qinf(self, _):
        return INF

    def literal_entry(self, children):
        return children[0]

    term_entry = literal_entry
    qvalue_entry = literal_entry


@lru_cache(maxsize=None)
def _parser() -> Lark:
    with open(get_resource_path(GRAMMAR_FILE), "r", encoding="utf-8") as f:
        grammar = f.read()
    return Lark(grammar, start=list(START_RULES), parser="earley", propagate_positions=True)


def _parse(text: str, start: str) -> Any:
    try:
        tree = _parser().parse(text, start=start)
    except UnexpectedEOF as exc:
        lines = text.splitlines() or [""]
        raise ParseError("unexpected end of input", len(lines), len(lines[-1]) + 1) from exc
    except UnexpectedInput as exc:
        message = str(exc).strip().splitlines()[0]
        raise ParseError(message, exc.line, exc.column) from exc
    try:
        return _SourceBuilder().transform(tree)
    except VisitError as exc:
        if isinstance(exc.orig_exc, SqclpError):
            raise exc.orig_exc from None
        if isinstance(exc.orig_exc, (ValueError, ZeroDivisionError)):
            raise ParseError(f"invalid literal: {exc.orig_exc}") from exc.orig_exc
        raise


def parse_program(text: str) -> SourceProgram:
    """Parse a whole ``.sqclp`` source; raises :class:`ParseError` with line and column."""
    return _parse(text, "program")


def parse_goal(text: str) -> Goal:
    """Parse ``?- A#W, ... | W >= v, ... with constraints``; unstated thresholds are ``?``."""
    return _parse(text.strip(), "goal")


def parse_constraints(text: str) -> ConstraintSet:
    text = text.strip()
    if not text:
        return ConstraintSet()
    return _parse(text, "constraints")


def parse_atom(text: str) -> Atom:
    return _parse(text.strip(), "literal_entry")


def parse_term(text: str) -> Term:
    return _parse(text.strip(), "term_entry")


def parse_qvalue(text: str) -> Any:
    return _parse(text.strip(), "qvalue_entry")


def parse_qdom(text: str) -> QualDomain:
    """Qualification domain from its name, e.g. ``U*W``."""
    directive = _parse(f"#qdom {text.strip()}", "program").directive("qdom")
    if directive is None:
        raise ParseError(f"no qualification domain in {text!r}")
    return directive.value
