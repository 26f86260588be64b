"""
Proximity relations over symbols and their extension to terms and atoms.

A :class:`ProximityTable` stores the non-trivial entries of a Q-valued
proximity relation: reflexive pairs are implicitly top, unlisted pairs are
bottom. Transitivity is not required.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import Any, Dict, FrozenSet, Iterable, List, Mapping, Optional, Tuple

from src.core.constraints import REAL, ConstraintDomain, NormalForm
from src.core.embedding import expressible
from src.models.errors import Diagnostic, QualificationDomainError, UnsatisfiableError
from src.models.qualification import QualDomain, format_value
from src.models.syntax import (
    Apply,
    Atom,
    Basic,
    ConstraintSet,
    Equation,
    PrimitiveAtom,
    Symbol,
    SymbolKind,
    Term,
    Var,
    symbol_key,
)


def _key(x: Symbol, y: Symbol) -> FrozenSet[Symbol]:
    return frozenset((x, y))


class ProximityTable:
    """Finite, symmetric proximity relation over symbols, valued in ``qdom``."""

    __slots__ = ("qdom", "_entries", "_neighbours", "_hash")

    def __init__(self, qdom: QualDomain, entries: Optional[Mapping[Tuple[Symbol, Symbol], Any]] = None):
        self.qdom = qdom
        table: Dict[FrozenSet[Symbol], Any] = {}
        for (x, y), value in dict(entries or {}).items():
            key = _key(x, y)
            if key in table and table[key] != value:
                raise QualificationDomainError(
                    f"conflicting proximity values for {x} and {y}: "
                    f"{format_value(table[key])} and {format_value(value)}")
            table[key] = value
        self._entries = table
        neighbours: Dict[Symbol, List[Tuple[Symbol, Any]]] = {}
        for key, value in table.items():
            if len(key) != 2 or value == qdom.bottom:
                continue
            x, y = sorted(key, key=symbol_key)
            neighbours.setdefault(x, []).append((y, value))
            neighbours.setdefault(y, []).append((x, value))
        self._neighbours = {s: tuple(sorted(ns, key=lambda p: symbol_key(p[0])))
                            for s, ns in neighbours.items()}
        self._hash = hash((qdom, frozenset(table.items())))

    @classmethod
    def identity(cls, qdom: QualDomain) -> "ProximityTable":
        """The empty table: plain syntactic equality."""
        return cls(qdom)

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other) -> bool:
        if not isinstance(other, ProximityTable):
            return NotImplemented
        return self.qdom == other.qdom and self._entries == other._entries

    def __len__(self) -> int:
        return len(self._entries)

    def __repr__(self) -> str:
        return f"ProximityTable({self.qdom}, {len(self._entries)} entries)"

    @property
    def is_identity(self) -> bool:
        return not self._neighbours

    def entries(self) -> List[Tuple[Symbol, Symbol, Any]]:
        """Declared entries as ``(x, y, value)`` with ``x`` ordered before ``y``."""
        result = []
        for key, value in self._entries.items():
            ordered = sorted(key, key=symbol_key)
            x, y = ordered[0], ordered[-1]
            result.append((x, y, value))
        return sorted(result, key=lambda e: (symbol_key(e[0]), symbol_key(e[1])))

    def sym_prox(self, x: Symbol, y: Symbol) -> Any:
        if x == y:
            return self.qdom.top
        return self._entries.get(_key(x, y), self.qdom.bottom)

    def neighbours(self, symbol: Symbol) -> Tuple[Tuple[Symbol, Any], ...]:
        """Distinct symbols with a non-bottom proximity to ``symbol``."""
        return self._neighbours.get(symbol, ())

    def symbols(self) -> FrozenSet[Symbol]:
        return frozenset().union(*self._entries.keys()) if self._entries else frozenset()

    def is_similarity(self) -> bool:
        """Whether the relation happens to be transitive as well."""
        qdom = self.qdom
        symbols = sorted(self._neighbours, key=symbol_key)
        for x, y, z in ((a, b, c) for a in symbols for b in symbols for c in symbols):
            if x == z:
                continue
            if not qdom.leq(qdom.glb(self.sym_prox(x, y), self.sym_prox(y, z)), self.sym_prox(x, z)):
                return False
        return True


@lru_cache(maxsize=65536)
def term_prox(table: ProximityTable, t: Term, s: Term) -> Any:
    qdom = table.qdom
    if t == s:
        return qdom.top
    if isinstance(t, Var) or isinstance(s, Var):
        return qdom.bottom
    t_args = t.args if isinstance(t, Apply) else ()
    s_args = s.args if isinstance(s, Apply) else ()
    if len(t_args) != len(s_args):
        return qdom.bottom
    degree = table.sym_prox(t.symbol, s.symbol)
    for a, b in zip(t_args, s_args):
        if degree == qdom.bottom:
            break
        degree = qdom.glb(degree, term_prox(table, a, b))
    return degree


def args_prox(table: ProximityTable, xs: Iterable[Term], ys: Iterable[Term]) -> Any:
    return table.qdom.inf(term_prox(table, a, b) for a, b in zip(xs, ys))


def atom_prox(table: ProximityTable, a: Atom, b: Atom) -> Any:
    """Homomorphic extension of ``term_prox`` to atoms; kind mismatch is bottom."""
    qdom = table.qdom
    if a == b:
        return qdom.top
    if isinstance(a, Equation) and isinstance(b, Equation):
        return qdom.glb(term_prox(table, a.lhs, b.lhs), term_prox(table, a.rhs, b.rhs))
    if type(a) is not type(b) or len(a.args) != len(b.args):
        return qdom.bottom
    if isinstance(a, PrimitiveAtom):
        if a.pred != b.pred:
            return qdom.bottom
        return args_prox(table, a.args, b.args)
    return qdom.glb(table.sym_prox(a.symbol, b.symbol), args_prox(table, a.args, b.args))


@dataclass(frozen=True)
class Closeness:
    """Answer of a closeness test: verdict (None when unknown) and witness degree."""

    verdict: Optional[bool]
    degree: Any

    def __bool__(self) -> bool:
        return self.verdict is True


def closeness_degree(table: ProximityTable, cdom: ConstraintDomain, constraints: ConstraintSet,
                     t: Term, s: Term) -> Tuple[Any, bool]:
    """Proximity of two solved-form terms, consulting entailment at variable leaves.

    Returns the degree and whether some leaf comparison came back unknown.
    """
    qdom = table.qdom
    if t == s:
        return qdom.top, False
    if isinstance(t, Var) or isinstance(s, Var) or (isinstance(t, Basic) and isinstance(s, Basic)):
        verdict = cdom.entails(constraints, Equation(t, s))
        if verdict:
            return qdom.top, False
        return term_prox(table, t, s), verdict is None
    if not (isinstance(t, Apply) and isinstance(s, Apply)) or len(t.args) != len(s.args):
        return qdom.bottom, False
    degree = table.sym_prox(t.symbol, s.symbol)
    unknown = False
    for a, b in zip(t.args, s.args):
        if degree == qdom.bottom:
            break
        sub, sub_unknown = closeness_degree(table, cdom, constraints, a, b)
        degree = qdom.glb(degree, sub)
        unknown = unknown or sub_unknown
    return degree, unknown


def close_at(table: ProximityTable, constraints: ConstraintSet, level: Any, t: Term, s: Term,
             cdom: ConstraintDomain = REAL) -> Closeness:
    """Decide ``t ≈ s`` at level ``level`` with respect to ``constraints``.

    Witnesses are the solved-form instances of ``t`` and ``s``. A negative
    answer becomes unknown when the constraint set keeps a nonlinear residue.
    """
    qdom = table.qdom
    qdom.check(level)
    if qdom.is_bottom(level):
        raise QualificationDomainError("closeness level must lie above bottom")
    nf = cdom.normalize(constraints)
    if nf.status is False:
        raise UnsatisfiableError(f"constraint set {constraints} is unsatisfiable")
    degree, unknown = closeness_degree(
        table, cdom, constraints, t.substitute(nf.subst), s.substitute(nf.subst))
    verdict: Optional[bool] = qdom.leq(level, degree)
    if not verdict and (unknown or nf.nonlinear):
        verdict = None
    return Closeness(verdict, degree)


@dataclass(frozen=True)
class AdmissibilityReport:
    ok: bool
    diagnostics: Tuple[Diagnostic, ...] = field(default_factory=tuple)

    def __bool__(self) -> bool:
        return self.ok


def _entry_problems(qdom: QualDomain, x: Symbol, y: Symbol, value: Any):
    pair = f"~({x}, {y})"
    if not qdom.contains(value):
        yield "prox-value", f"{pair} = {format_value(value)} is not a value of {qdom}"
        return
    if value == qdom.bottom:
        yield "prox-bottom", f"{pair} must not be bottom"
    if x == y:
        if value != qdom.top:
            yield "prox-reflexive", f"{pair} must be top"
        return
    kinds = {x.kind, y.kind}
    if SymbolKind.VARIABLE in kinds:
        yield "prox-variable", f"{pair} relates variables"
    elif SymbolKind.PRIMITIVE in kinds:
        yield "prox-primitive", f"{pair} relates primitive predicates"
    elif len(kinds) > 1:
        yield "prox-kind", f"{pair} relates symbols of different kinds"
    elif x.arity != y.arity:
        yield "prox-arity", f"{pair} relates symbols of different arities"


def admissible(table: ProximityTable, qdom: QualDomain, cdom: ConstraintDomain,
               locations: Optional[Mapping[FrozenSet[Symbol], int]] = None) -> AdmissibilityReport:
    """Check that ``(table, qdom, cdom)`` is an admissible triple.

    Transitivity is deliberately not required. ``locations`` maps entry keys to
    source lines for the diagnostics.
    """
    locations = locations or {}
    diagnostics: List[Diagnostic] = []
    if table.qdom != qdom:
        diagnostics.append(Diagnostic(
            "prox-domain", f"proximity table is valued in {table.qdom}, program uses {qdom}"))
    for x, y, value in table.entries():
        for code, message in _entry_problems(qdom, x, y, value):
            diagnostics.append(Diagnostic(code, message, locations.get(_key(x, y))))
    if not expressible(qdom, cdom):
        diagnostics.append(Diagnostic(
            "not-expressible", f"qualification domain {qdom} is not expressible in {cdom}"))
    return AdmissibilityReport(not diagnostics, tuple(diagnostics))



def _basic_from(symbol: Symbol) -> Basic:
    return Basic(Fraction(symbol.name))


@lru_cache(maxsize=16384)
def term_variants(table: ProximityTable, term: Term, nf: Optional[NormalForm] = None,
                  floor: Any = None) -> Tuple[Tuple[Term, Any], ...]:
    """Terms close to ``term`` with a non-bottom degree.

    Variants come from the table neighbours of every symbol in ``term`` and,
    when a normal form is given, from the variables its constraint set forces
    equal to a subterm. ``term`` is expected in solved form. Each variant is
    reported once per maximal degree. With a ``floor``, only variants whose
    degree reaches it are kept; argument variants are pruned before they
    are combined.
    """
    qdom = table.qdom
    found: Dict[Term, List[Any]] = {}

    def keep(degree: Any) -> bool:
        return degree != qdom.bottom and (floor is None or qdom.leq(floor, degree))

    def add(candidate: Term, degree: Any) -> None:
        kept = found.setdefault(candidate, [])
        if any(qdom.leq(degree, other) for other in kept):
            return
        kept[:] = [other for other in kept if not qdom.leq(other, degree)] + [degree]

    if isinstance(term, Var):
        add(term, qdom.top)
    elif isinstance(term, Basic):
        add(term, qdom.top)
        for other, degree in table.neighbours(term.symbol):
            if other.kind is SymbolKind.BASIC and keep(degree):
                add(_basic_from(other), degree)
    else:
        heads = [(term.name, qdom.top)] + [
            (other.name, degree) for other, degree in table.neighbours(term.symbol)
            if other.kind is SymbolKind.CONSTRUCTOR and other.arity == len(term.args) and keep(degree)]
        options = [term_variants(table, arg, nf, floor) for arg in term.args]
        for name, head_degree in heads:
            for combo in product(*options):
                degree = qdom.inf([head_degree, *(d for _, d in combo)])
                if keep(degree):
                    add(Apply(name, tuple(t for t, _ in combo)), degree)

    if nf is not None:
        for candidate, degrees in list(found.items()):
            normal = candidate.substitute(nf.subst)
            for name in nf.aliases.get(normal, ()):
                for degree in degrees:
                    add(Var(name), degree)
    return tuple((candidate, degree) for candidate, degrees in found.items() for degree in degrees)
