"""
Symbolic syntax: symbols, terms, substitutions, atoms, constraint sets,
qualified clauses and programs.

Everything here is immutable; substitution and variable collection are
methods on the syntax classes, with :func:`apply_subst` and
:func:`free_vars` as the uniform entry points.
"""

import re
from abc import ABC, abstractmethod
from collections.abc import Mapping
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Any, Dict, FrozenSet, Iterable, Iterator, Optional, Set, Tuple

from src.models.errors import Diagnostic, ProgramError, ProofError, SyntaxObjectError
from src.models.qualification import ANY, QualDomain, format_value
from src.utilities.helpers import format_rational, to_fraction


class SymbolKind(Enum):
    VARIABLE = "variable"
    BASIC = "basic"
    CONSTRUCTOR = "constructor"
    DEFINED = "defined"
    PRIMITIVE = "primitive"


@dataclass(frozen=True)
class Symbol:
    name: str
    kind: SymbolKind
    arity: int = 0

    def __str__(self) -> str:
        if self.kind in (SymbolKind.CONSTRUCTOR, SymbolKind.DEFINED, SymbolKind.PRIMITIVE):
            return f"{self.name}/{self.arity}"
        return self.name


# Enum members are not orderable; sort symbols through this key instead.
def symbol_key(symbol: Symbol) -> tuple:
    return (symbol.name, symbol.kind.value, symbol.arity)


class Term(ABC):
    """Constructor term: a variable, a basic value or a constructor application."""

    @abstractmethod
    def substitute(self, s: Mapping) -> "Term":
        ...

    @abstractmethod
    def variables(self) -> FrozenSet[str]:
        ...

    @abstractmethod
    def symbols(self) -> Iterator[Symbol]:
        ...

    @property
    @abstractmethod
    def symbol(self) -> Symbol:
        ...

    @property
    def is_ground(self) -> bool:
        return not self.variables()


@dataclass(frozen=True)
class Var(Term):
    name: str

    def substitute(self, s):
        return s.get(self.name, self)

    def variables(self):
        return frozenset((self.name,))

    def symbols(self):
        yield self.symbol

    @property
    def symbol(self):
        return Symbol(self.name, SymbolKind.VARIABLE)

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Basic(Term):
    value: Fraction

    def __post_init__(self):
        object.__setattr__(self, "value", to_fraction(self.value))

    def substitute(self, s):
        return self

    def variables(self):
        return frozenset()

    def symbols(self):
        yield self.symbol

    @property
    def symbol(self):
        return Symbol(format_rational(self.value), SymbolKind.BASIC)

    def __str__(self) -> str:
        return format_rational(self.value)


@dataclass(frozen=True)
class Apply(Term):
    name: str
    args: Tuple[Term, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))

    def substitute(self, s):
        if not self.args:
            return self
        return Apply(self.name, tuple(arg.substitute(s) for arg in self.args))

    def variables(self):
        return frozenset().union(*(arg.variables() for arg in self.args))

    def symbols(self):
        yield self.symbol
        for arg in self.args:
            yield from arg.symbols()

    @property
    def symbol(self):
        return Symbol(self.name, SymbolKind.CONSTRUCTOR, len(self.args))

    def __str__(self) -> str:
        if not self.args:
            return self.name
        return f"{self.name}({','.join(str(arg) for arg in self.args)})"


class Atom(ABC):
    """Defined, primitive or equational atom."""

    @property
    @abstractmethod
    def args(self) -> Tuple[Term, ...]:
        ...

    @abstractmethod
    def substitute(self, s: Mapping) -> "Atom":
        ...

    def variables(self) -> FrozenSet[str]:
        return frozenset().union(*(arg.variables() for arg in self.args))

    def symbols(self) -> Iterator[Symbol]:
        for arg in self.args:
            yield from arg.symbols()

    @property
    def is_ground(self) -> bool:
        return not self.variables()


def _format_call(name: str, args: Tuple[Term, ...]) -> str:
    if not args:
        return name
    return f"{name}({','.join(str(arg) for arg in args)})"


@dataclass(frozen=True)
class DefinedAtom(Atom):
    pred: str
    args: Tuple[Term, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))

    @property
    def symbol(self) -> Symbol:
        return Symbol(self.pred, SymbolKind.DEFINED, len(self.args))

    def substitute(self, s):
        return DefinedAtom(self.pred, tuple(arg.substitute(s) for arg in self.args))

    def symbols(self):
        yield self.symbol
        yield from super().symbols()

    def __str__(self) -> str:
        return _format_call(self.pred, self.args)


@dataclass(frozen=True)
class PrimitiveAtom(Atom):
    pred: str
    args: Tuple[Term, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))

    @property
    def symbol(self) -> Symbol:
        return Symbol(self.pred, SymbolKind.PRIMITIVE, len(self.args))

    def substitute(self, s):
        return PrimitiveAtom(self.pred, tuple(arg.substitute(s) for arg in self.args))

    def symbols(self):
        yield self.symbol
        yield from super().symbols()

    def __str__(self) -> str:
        return _format_call(self.pred, self.args)


@dataclass(frozen=True)
class Equation(Atom):
    lhs: Term
    rhs: Term

    @property
    def args(self):
        return (self.lhs, self.rhs)

    def substitute(self, s):
        return Equation(self.lhs.substitute(s), self.rhs.substitute(s))

    def __str__(self) -> str:
        return f"{self.lhs} == {self.rhs}"


class ConstraintSet:
    """Finite set of atomic constraints (primitive atoms and equations).

    Keeps first-seen order for printing; equality and hashing are set-based.
    """

    __slots__ = ("atoms", "_members")

    def __init__(self, atoms: Iterable[Atom] = ()):
        ordered = []
        seen = set()
        for atom in atoms:
            if not isinstance(atom, (PrimitiveAtom, Equation)):
                raise SyntaxObjectError(f"{atom} is not an atomic constraint")
            if atom not in seen:
                seen.add(atom)
                ordered.append(atom)
        self.atoms: Tuple[Atom, ...] = tuple(ordered)
        self._members = frozenset(ordered)

    def __iter__(self):
        return iter(self.atoms)

    def __len__(self) -> int:
        return len(self.atoms)

    def __contains__(self, atom) -> bool:
        return atom in self._members

    def __eq__(self, other) -> bool:
        if not isinstance(other, ConstraintSet):
            return NotImplemented
        return self._members == other._members

    def __hash__(self) -> int:
        return hash(self._members)

    def __repr__(self) -> str:
        return f"ConstraintSet({list(self.atoms)!r})"

    def __str__(self) -> str:
        return "{" + ", ".join(str(atom) for atom in self.atoms) + "}"

    @property
    def primitives(self) -> Tuple[PrimitiveAtom, ...]:
        return tuple(a for a in self.atoms if isinstance(a, PrimitiveAtom))

    @property
    def equations(self) -> Tuple[Equation, ...]:
        return tuple(a for a in self.atoms if isinstance(a, Equation))

    def substitute(self, s: Mapping) -> "ConstraintSet":
        return ConstraintSet(atom.substitute(s) for atom in self.atoms)

    def variables(self) -> FrozenSet[str]:
        return frozenset().union(*(atom.variables() for atom in self.atoms))

    def union(self, other: Iterable[Atom]) -> "ConstraintSet":
        return ConstraintSet((*self.atoms, *other))


EMPTY = ConstraintSet()


class Substitution(Mapping):
    """Finite map from variable names to terms; identity bindings are dropped."""

    __slots__ = ("_bindings",)

    def __init__(self, bindings: Optional[Mapping] = None):
        clean: Dict[str, Term] = {}
        for name, term in dict(bindings or {}).items():
            if not isinstance(term, Term):
                raise SyntaxObjectError(f"cannot bind {name} to non-term {term!r}")
            if term != Var(name):
                clean[name] = term
        self._bindings = clean

    def __getitem__(self, name: str) -> Term:
        return self._bindings[name]

    def __iter__(self):
        return iter(self._bindings)

    def __len__(self) -> int:
        return len(self._bindings)

    def __hash__(self) -> int:
        return hash(frozenset(self._bindings.items()))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Mapping):
            return NotImplemented
        return self._bindings == dict(other.items())

    def __repr__(self) -> str:
        return f"Substitution({self._bindings!r})"

    def __str__(self) -> str:
        pairs = ", ".join(f"{name} -> {self._bindings[name]}" for name in sorted(self._bindings))
        return "{" + pairs + "}"

    def compose(self, other: Mapping) -> "Substitution":
        """``o.compose(a, b)`` behaves as applying ``self`` then ``other``."""
        combined = {name: term.substitute(other) for name, term in self._bindings.items()}
        for name, term in other.items():
            combined.setdefault(name, term)
        return Substitution(combined)

    def bind(self, name: str, term: Term) -> "Substitution":
        return self.compose(Substitution({name: term}))

    def restrict(self, names: Iterable[str]) -> "Substitution":
        keep = set(names)
        return Substitution({n: t for n, t in self._bindings.items() if n in keep})


IDENTITY = Substitution()


def apply_subst(o: Any, s: Mapping) -> Any:
    """Simultaneous, capture-free application of ``s`` to a syntax object."""
    return o.substitute(s)


def compose(s1: Mapping, s2: Mapping) -> Substitution:
    return Substitution(s1).compose(s2)


def free_vars(o: Any) -> FrozenSet[str]:
    return o.variables()


def match(pattern: Any, target: Any, bindings: Optional[Mapping] = None) -> Optional[Substitution]:
    """One-way matching: a substitution ``θ`` with ``pattern θ == target``, or None.

    Variables of ``target`` behave as constants.
    """
    found: Dict[str, Term] = dict(bindings or {})
    stack = [(pattern, target)]
    while stack:
        p, t = stack.pop()
        if isinstance(p, Var):
            bound = found.get(p.name)
            if bound is None:
                found[p.name] = t
            elif bound != t:
                return None
        elif type(p) is not type(t):
            return None
        elif isinstance(p, Basic):
            if p != t:
                return None
        elif isinstance(p, Apply):
            if p.name != t.name or len(p.args) != len(t.args):
                return None
            stack.extend(zip(p.args, t.args))
        elif isinstance(p, (DefinedAtom, PrimitiveAtom)):
            if p.pred != t.pred or len(p.args) != len(t.args):
                return None
            stack.extend(zip(p.args, t.args))
        elif isinstance(p, Equation):
            stack.extend(zip(p.args, t.args))
        else:
            raise SyntaxObjectError(f"cannot match {p!r}")
    return Substitution(found)


@dataclass(frozen=True)
class BodyItem:
    atom: Atom
    threshold: Any = ANY

    def substitute(self, s):
        return BodyItem(self.atom.substitute(s), self.threshold)

    def variables(self):
        return self.atom.variables()

    def __str__(self) -> str:
        if self.threshold is ANY:
            return str(self.atom)
        return f"{self.atom}#{format_value(self.threshold)}"


@dataclass(frozen=True)
class Clause:
    """Qualified clause ``head <-α- B₁#w₁, ..., Bₘ#wₘ``."""

    head: DefinedAtom
    attenuation: Any
    body: Tuple[BodyItem, ...] = ()
    line: Optional[int] = field(default=None, compare=False)

    def __post_init__(self):
        if not isinstance(self.head, DefinedAtom):
            raise SyntaxObjectError(f"clause head {self.head} must be a defined atom")
        object.__setattr__(self, "body", tuple(self.body))

    def substitute(self, s):
        return Clause(self.head.substitute(s), self.attenuation,
                      tuple(item.substitute(s) for item in self.body), self.line)

    def variables(self):
        return self.head.variables().union(*(item.variables() for item in self.body))

    def symbols(self) -> Iterator[Symbol]:
        yield from self.head.symbols()
        for item in self.body:
            yield from item.atom.symbols()

    def __str__(self) -> str:
        text = f"{self.head} <-{format_value(self.attenuation)}-"
        if self.body:
            text += " " + ", ".join(str(item) for item in self.body)
        return text


_SUFFIX = re.compile(r"_\d+$")


def renaming_for(clause: Clause, avoid: Iterable[str], start: int = 1) -> Substitution:
    """Variable renaming used by :func:`rename_apart`.

    Fresh names take the form ``X_k`` with ``k`` counting up from ``start``.
    """
    taken: Set[str] = set(avoid)
    renaming: Dict[str, Term] = {}
    for name in sorted(clause.variables()):
        base = _SUFFIX.sub("", name)
        k = start
        while f"{base}_{k}" in taken:
            k += 1
        fresh = f"{base}_{k}"
        taken.add(fresh)
        renaming[name] = Var(fresh)
    return Substitution(renaming)


def rename_apart(clause: Clause, avoid: Iterable[str], start: int = 1) -> Clause:
    """A variant of ``clause`` whose variables avoid every name in ``avoid``."""
    return clause.substitute(renaming_for(clause, avoid, start))


def suffix_of(name: str) -> int:
    """Numeric ``_k`` suffix of a variable name, 0 when there is none."""
    found = _SUFFIX.search(name)
    return int(found.group()[1:]) if found else 0


@dataclass(frozen=True)
class Program:
    """A set of qualified clauses together with the scheme parameters ⟨R, Q, C⟩."""

    clauses: Tuple[Clause, ...]
    proximity: Any
    qdom: QualDomain
    cdom: Any

    def __post_init__(self):
        object.__setattr__(self, "clauses", tuple(self.clauses))
        problems = list(self._value_problems())
        if problems:
            raise ProgramError("program qualification values are invalid", problems)

    def _value_problems(self) -> Iterator[Diagnostic]:
        for clause in self.clauses:
            if not self.qdom.contains(clause.attenuation):
                yield Diagnostic("attenuation-domain",
                                 f"attenuation {format_value(clause.attenuation)} is not in {self.qdom}",
                                 clause.line)
            elif clause.attenuation == self.qdom.bottom:
                yield Diagnostic("attenuation-bottom", "attenuation factor must lie above bottom",
                                 clause.line)
            for item in clause.body:
                if item.threshold is ANY:
                    continue
                if not self.qdom.contains(item.threshold) or item.threshold == self.qdom.bottom:
                    yield Diagnostic("threshold-domain",
                                     f"threshold {format_value(item.threshold)} must be a "
                                     f"non-bottom value of {self.qdom}", clause.line)

    def clause(self, clause_id: int) -> Clause:
        """Clause by 1-based position."""
        if not 1 <= clause_id <= len(self.clauses):
            raise ProofError(f"program has no clause {clause_id}")
        return self.clauses[clause_id - 1]

    def signature(self) -> Dict[str, Set[Symbol]]:
        """Symbols used by the clauses, grouped by name."""
        table: Dict[str, Set[Symbol]] = {}
        for clause in self.clauses:
            for symbol in clause.symbols():
                if symbol.kind is not SymbolKind.VARIABLE:
                    table.setdefault(symbol.name, set()).add(symbol)
        return table
