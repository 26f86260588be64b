"""
Declarative semantics of qualified constrained programs.

Qc-atoms ``A#d <= Π`` are graded, constrained facts. An interpretation is a
set of defined qc-atoms closed under entailment; here it is represented by
its generators, grouped in cells ``(atom, Π)`` that keep the antichain of
maximal degrees. ``tp_step`` is the immediate consequence operator restricted
to a finite :class:`GroundScope`, and ``lfp_bounded`` iterates it from the
empty interpretation.
"""

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from types import MappingProxyType
from typing import Any, Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple

from src.core.constraints import ConstraintDomain
from src.core.proximity import close_at, closeness_degree, term_variants
from src.models.constants import DEFAULT_ITERATIONS, DEFAULT_UNIVERSE_DEPTH
from src.models.errors import SyntaxObjectError
from src.models.qualification import QualDomain, format_value
from src.models.syntax import (
    EMPTY,
    Apply,
    Atom,
    Basic,
    BodyItem,
    Clause,
    ConstraintSet,
    DefinedAtom,
    Equation,
    Program,
    Substitution,
    SymbolKind,
    Term,
    Var,
    match,
)
from src.utilities.logger import AppLogger

logger = AppLogger()

Cell = Tuple[DefinedAtom, ConstraintSet]


@dataclass(frozen=True)
class QcAtom:
    """Qualified constrained atom ``A#d <= Π``."""

    atom: Atom
    degree: Any
    constraints: ConstraintSet = EMPTY

    def substitute(self, s) -> "QcAtom":
        return QcAtom(self.atom.substitute(s), self.degree, self.constraints.substitute(s))

    def variables(self):
        return self.atom.variables() | self.constraints.variables()

    def with_degree(self, degree: Any) -> "QcAtom":
        return QcAtom(self.atom, degree, self.constraints)

    def __str__(self) -> str:
        text = f"{self.atom}#{format_value(self.degree)}"
        if len(self.constraints):
            text += f" <= {self.constraints}"
        return text


def is_observable(phi: QcAtom, qdom: QualDomain, cdom: ConstraintDomain) -> Optional[bool]:
    """Non-bottom degree and satisfiable constraints."""
    if not qdom.contains(phi.degree) or phi.degree == qdom.bottom:
        return False
    return cdom.satisfiable(phi.constraints)


@dataclass(frozen=True)
class EntailmentResult:
    verdict: Optional[bool]
    theta: Optional[Substitution] = None

    def __bool__(self) -> bool:
        return self.verdict is True


def _local_bindings(atoms: Sequence[Atom], targets: Sequence[Atom],
                    bindings: Dict[str, Term]) -> Iterator[Dict[str, Term]]:
    """Extensions of ``bindings`` matching each atom against some target, or leaving it."""
    if not atoms:
        yield bindings
        return
    head, rest = atoms[0], atoms[1:]
    for target in targets:
        oriented = [target]
        if isinstance(target, Equation):
            oriented.append(Equation(target.rhs, target.lhs))
        for candidate in oriented:
            found = match(head, candidate, bindings)
            if found is not None:
                extended = dict(bindings)
                extended.update(found)
                yield from _local_bindings(rest, targets, extended)
    yield from _local_bindings(rest, targets, bindings)


def qc_entails(phi: QcAtom, other: QcAtom, qdom: QualDomain, cdom: ConstraintDomain) -> EntailmentResult:
    """Does ``phi`` entail ``other``?

    Entailment holds when some ``θ`` gives ``A' = Aθ``, ``d' ⊑ d`` and
    ``Π' ⊨ Πθ``. The atom fixes ``θ`` on the variables of ``A``. Variables
    that occur only in ``Π`` are existential: ``θ`` may bind them to any
    term, and the candidates tried are the bindings that match constraints
    of ``Π`` against constraints of ``Π'``, then the identity.
    """
    theta = match(phi.atom, other.atom)
    if theta is None or not qdom.leq(other.degree, phi.degree):
        return EntailmentResult(False)
    fixed: Dict[str, Term] = {name: Var(name) for name in phi.atom.variables()}
    fixed.update(theta)
    local = phi.constraints.variables() - phi.atom.variables()
    pending = [atom for atom in phi.constraints if atom.variables() & local]
    unknown = False
    tried = set()
    for bindings in _local_bindings(pending, tuple(other.constraints), fixed):
        candidate = Substitution(bindings)
        if candidate in tried:
            continue
        tried.add(candidate)
        verdict = cdom.entails_all(other.constraints, phi.constraints.substitute(candidate))
        if verdict:
            return EntailmentResult(True, candidate.restrict(phi.variables()))
        unknown = unknown or verdict is None
    return EntailmentResult(None if unknown else False)


class Interpretation:
    """Finitely generated qc-interpretation.

    ``cells`` maps ``(atom, Π)`` to degrees; only the maximal ones are kept.
    Membership of a qc-atom is entailment by some generator.
    """

    def __init__(self, qdom: QualDomain, cdom: ConstraintDomain,
                 cells: Optional[Mapping[Cell, Iterable[Any]]] = None):
        self.qdom = qdom
        self.cdom = cdom
        kept: Dict[Cell, Tuple[Any, ...]] = {}
        for key, degrees in (cells or {}).items():
            best = qdom.maxima(d for d in degrees if d != qdom.bottom)
            if best:
                kept[key] = best
        self._cells = kept
        self._by_pred: Dict[Tuple[str, int], List[Cell]] = {}
        for key in kept:
            atom = key[0]
            self._by_pred.setdefault((atom.pred, len(atom.args)), []).append(key)

    @classmethod
    def bottom(cls, qdom: QualDomain, cdom: ConstraintDomain) -> "Interpretation":
        return cls(qdom, cdom)

    @property
    def cells(self) -> Mapping[Cell, Tuple[Any, ...]]:
        return MappingProxyType(self._cells)

    def __len__(self) -> int:
        return sum(len(degrees) for degrees in self._cells.values())

    def __eq__(self, other) -> bool:
        if not isinstance(other, Interpretation):
            return NotImplemented
        return (self.qdom == other.qdom
                and {k: frozenset(v) for k, v in self._cells.items()}
                == {k: frozenset(v) for k, v in other._cells.items()})

    def __repr__(self) -> str:
        return f"Interpretation({self.qdom}, {len(self)} generators)"

    def generators(self) -> Iterator[QcAtom]:
        for (atom, constraints), degrees in self._cells.items():
            for degree in degrees:
                yield QcAtom(atom, degree, constraints)

    def degrees(self, atom: DefinedAtom, constraints: ConstraintSet = EMPTY) -> Tuple[Any, ...]:
        return self._cells.get((atom, constraints), ())

    def _candidates(self, atom: DefinedAtom) -> List[Cell]:
        return self._by_pred.get((atom.pred, len(atom.args)), [])

    def _forms(self, atom: DefinedAtom, constraints: ConstraintSet) -> Tuple[DefinedAtom, ...]:
        """``atom`` and its instance under the equalities ``constraints`` force."""
        nf = self.cdom.normalize(constraints)
        if nf.status is False or not nf.subst:
            return (atom,)
        canonical = atom.substitute(nf.subst)
        return (atom,) if canonical == atom else (atom, canonical)

    def best_degrees(self, atom: DefinedAtom, constraints: ConstraintSet = EMPTY) -> Tuple[Any, ...]:
        """Maximal ``d`` with ``atom#d <= constraints`` established as a member."""
        top = self.qdom.top
        found: List[Any] = []
        for form in self._forms(atom, constraints):
            found.extend(self.degrees(form, constraints))
            for key in self._candidates(form):
                if key == (form, constraints):
                    continue
                if qc_entails(QcAtom(key[0], top, key[1]), QcAtom(form, top, constraints),
                              self.qdom, self.cdom).verdict:
                    found.extend(self._cells[key])
        return self.qdom.maxima(found)

    def contains(self, phi: QcAtom) -> Optional[bool]:
        """Membership up to entailment by a generator.

        Atoms are compared up to the equalities their own constraint set
        forces: ``q(X, Y) <= {X == Y}`` is found in a cell for ``q(X, X)``.
        """
        if not isinstance(phi.atom, DefinedAtom):
            return False
        if not self.qdom.contains(phi.degree) or phi.degree == self.qdom.bottom:
            return False
        forms = self._forms(phi.atom, phi.constraints)
        for form in forms:
            if any(self.qdom.leq(phi.degree, d) for d in self.degrees(form, phi.constraints)):
                return True
        unknown = False
        for form in forms:
            target = QcAtom(form, phi.degree, phi.constraints)
            for key in self._candidates(form):
                for degree in self._cells[key]:
                    verdict = qc_entails(QcAtom(key[0], degree, key[1]), target, self.qdom, self.cdom).verdict
                    if verdict:
                        return True
                    unknown = unknown or verdict is None
        return None if unknown else False

    def __contains__(self, phi: QcAtom) -> bool:
        return self.contains(phi) is True

    def leq(self, other: "Interpretation") -> bool:
        """Membership-wise inclusion."""
        return all(other.contains(g) is True for g in self.generators())

    def new_since(self, before: "Interpretation") -> Tuple[QcAtom, ...]:
        """Generators of ``self`` whose degree is not dominated in the same cell of ``before``."""
        fresh = []
        for g in self.generators():
            if not any(self.qdom.leq(g.degree, d) for d in before.degrees(g.atom, g.constraints)):
                fresh.append(g)
        return tuple(fresh)


def valid_in(program: Program, interpretation: Interpretation, phi: QcAtom) -> Optional[bool]:
    """Validity of an observable qc-atom in an interpretation."""
    qdom, cdom = program.qdom, program.cdom
    observable = is_observable(phi, qdom, cdom)
    if observable is not True:
        return False if observable is False else None
    if isinstance(phi.atom, DefinedAtom):
        return interpretation.contains(phi)
    if isinstance(phi.atom, Equation):
        return close_at(program.proximity, phi.constraints, phi.degree,
                        phi.atom.lhs, phi.atom.rhs, cdom).verdict
    return cdom.check_primitive(phi.constraints, phi.atom)


class _Consequences:
    """Immediate consequences of one interpretation under one constraint set."""

    def __init__(self, program: Program, interpretation: Interpretation, constraints: ConstraintSet):
        self.program = program
        self.qdom = program.qdom
        self.table = program.proximity
        self.cdom = program.cdom
        self.interpretation = interpretation
        self.constraints = constraints
        self.nf = self.cdom.normalize(constraints)

    def closeness(self, t: Term, s: Term) -> Any:
        degree, _ = closeness_degree(self.table, self.cdom, self.constraints,
                                     t.substitute(self.nf.subst), s.substitute(self.nf.subst))
        return degree

    def valid_degrees(self, atom: Atom) -> Tuple[Any, ...]:
        """Maximal degrees at which ``atom <= Π`` is valid."""
        if isinstance(atom, DefinedAtom):
            return self.interpretation.best_degrees(atom, self.constraints)
        if isinstance(atom, Equation):
            degree = self.closeness(atom.lhs, atom.rhs)
            return () if degree == self.qdom.bottom else (degree,)
        if self.cdom.entails(self.constraints, atom) is True:
            return (self.qdom.top,)
        return ()

    def body_options(self, item: BodyItem) -> Tuple[Any, ...]:
        return tuple(d for d in self.valid_degrees(item.atom) if self.qdom.threshold_ok(d, item.threshold))

    def body_values(self, clause: Clause) -> Tuple[Any, ...]:
        """Maximal values of ``α ∘ ⊓ eⱼ`` over admissible body degrees."""
        options = []
        for item in clause.body:
            choices = self.body_options(item)
            if not choices:
                return ()
            options.append(choices)
        values = (self.qdom.attenuate(clause.attenuation, self.qdom.inf(combo)) for combo in product(*options))
        return self.qdom.maxima(v for v in values if v != self.qdom.bottom)

    def heads(self, head: DefinedAtom) -> Iterator[Tuple[DefinedAtom, Any]]:
        """Atoms close to ``head`` and the glb of their predicate and argument degrees."""
        qdom = self.qdom
        preds = [(head.pred, qdom.top)] + [
            (other.name, degree) for other, degree in self.table.neighbours(head.symbol)
            if other.kind is SymbolKind.DEFINED and other.arity == len(head.args)]
        options = [term_variants(self.table, arg.substitute(self.nf.subst), self.nf) for arg in head.args]
        for pred, pred_degree in preds:
            for combo in product(*options):
                degree = qdom.inf([pred_degree, *(d for _, d in combo)])
                if degree != qdom.bottom:
                    yield DefinedAtom(pred, tuple(t for t, _ in combo)), degree


def immediate_consequence(program: Program, interpretation: Interpretation, clause: Clause,
                          phi: QcAtom, theta: Substitution,
                          degrees: Optional[Tuple[Sequence[Any], Sequence[Any]]] = None) -> bool:
    """Is ``phi`` an immediate consequence of ``interpretation`` via ``clause`` and ``theta``?

    ``degrees`` optionally fixes ``(d₀..dₙ, e₁..eₘ)``; otherwise the maximal
    valid choices are tried.
    """
    qdom, table = program.qdom, program.proximity
    if not isinstance(phi.atom, DefinedAtom) or is_observable(phi, qdom, program.cdom) is not True:
        return False
    step = _Consequences(program, interpretation, phi.constraints)
    instance = clause.substitute(theta)
    head = instance.head
    if len(phi.atom.args) != len(head.args):
        return False
    d0 = table.sym_prox(phi.atom.symbol, head.symbol)
    arg_max = [step.closeness(a, b) for a, b in zip(phi.atom.args, head.args)]
    if d0 == qdom.bottom or any(d == qdom.bottom for d in arg_max):
        return False
    valid = [step.valid_degrees(item.atom) for item in instance.body]

    if degrees is not None:
        head_degrees, body_degrees = tuple(degrees[0]), tuple(degrees[1])
        if len(head_degrees) != len(head.args) + 1 or len(body_degrees) != len(instance.body):
            return False
        for given, best in zip(head_degrees, [d0, *arg_max]):
            if given == qdom.bottom or not qdom.leq(given, best):
                return False
        for given, item, best in zip(body_degrees, instance.body, valid):
            if given == qdom.bottom or not any(qdom.leq(given, b) for b in best):
                return False
            if not qdom.threshold_ok(given, item.threshold):
                return False
        return qdom.leq(phi.degree, qdom.bound(head_degrees, instance.attenuation, body_degrees))

    options = [tuple(d for d in best if qdom.threshold_ok(d, item.threshold))
               for best, item in zip(valid, instance.body)]
    return any(qdom.leq(phi.degree, qdom.bound([d0, *arg_max], instance.attenuation, combo))
               for combo in product(*options))


@dataclass(frozen=True)
class GroundScope:
    """Finite universe for the fixpoint oracle: candidate terms and constraint sets."""

    terms: Tuple[Term, ...]
    constraint_sets: Tuple[ConstraintSet, ...] = (EMPTY,)

    @classmethod
    def from_program(cls, program: Program, depth: int = DEFAULT_UNIVERSE_DEPTH,
                     constraint_sets: Sequence[ConstraintSet] = (EMPTY,)) -> "GroundScope":
        """Terms up to ``depth`` nested constructor applications.

        Level zero holds the constants and basic values of the program, of
        the proximity table and of the constraint sets, plus the variables of
        the constraint sets.
        """
        if depth < 0:
            raise ValueError("universe depth must be non-negative")
        level: set = set()
        constructors: set = set()

        def collect(term: Term) -> None:
            if isinstance(term, Apply) and term.args:
                constructors.add((term.name, len(term.args)))
                for arg in term.args:
                    collect(arg)
            elif not isinstance(term, Var):
                level.add(term)

        for clause in program.clauses:
            for atom in (clause.head, *(item.atom for item in clause.body)):
                for arg in atom.args:
                    collect(arg)
        for symbol in program.proximity.symbols():
            if symbol.kind is SymbolKind.BASIC:
                level.add(Basic(Fraction(symbol.name)))
            elif symbol.kind is SymbolKind.CONSTRUCTOR:
                if symbol.arity:
                    constructors.add((symbol.name, symbol.arity))
                else:
                    level.add(Apply(symbol.name))
        for constraints in constraint_sets:
            for atom in constraints:
                for arg in atom.args:
                    collect(arg)
            level.update(Var(name) for name in constraints.variables())

        terms = sorted(level, key=_term_order)
        for _ in range(depth):
            known = set(terms)
            grown = list(terms)
            for name, arity in sorted(constructors):
                for args in product(terms, repeat=arity):
                    candidate = Apply(name, args)
                    if candidate not in known:
                        known.add(candidate)
                        grown.append(candidate)
            terms = grown
        return cls(tuple(terms), tuple(constraint_sets))


def _term_order(term: Term) -> Tuple[int, str]:
    rank = 0 if isinstance(term, Var) else 1 if isinstance(term, Basic) else 2
    return rank, str(term)


def _clause_consequences(program: Program, interpretation: Interpretation, scope: GroundScope,
                         constraints: ConstraintSet, clause: Clause) -> List[Tuple[DefinedAtom, ConstraintSet, Any]]:
    step = _Consequences(program, interpretation, constraints)
    qdom = program.qdom
    found: List[Tuple[DefinedAtom, ConstraintSet, Any]] = []
    if step.nf.status is False:
        return found
    names = sorted(clause.variables())
    for values in product(scope.terms, repeat=len(names)):
        instance = clause.substitute(dict(zip(names, values)))
        bodies = step.body_values(instance)
        if not bodies:
            continue
        for head, head_degree in step.heads(instance.head):
            for body_value in bodies:
                degree = qdom.glb(head_degree, body_value)
                if degree != qdom.bottom:
                    found.append((head, constraints, degree))
    return found


def tp_step(program: Program, interpretation: Interpretation, scope: GroundScope,
            workers: Optional[int] = None) -> Interpretation:
    """Maximal immediate consequences of ``interpretation`` within ``scope``.

    Clause/constraint-set pairs may be evaluated on a thread pool; results are
    merged in task order so the outcome does not depend on ``workers``.
    """
    tasks = [(constraints, clause) for constraints in scope.constraint_sets for clause in program.clauses]

    def run(task):
        return _clause_consequences(program, interpretation, scope, *task)

    if workers and workers > 1 and len(tasks) > 1:
        with ThreadPoolExecutor(max_workers=workers, thread_name_prefix="tp-step") as pool:
            batches = list(pool.map(run, tasks))
    else:
        batches = [run(task) for task in tasks]
    cells: Dict[Cell, List[Any]] = {}
    for batch in batches:
        for atom, constraints, degree in batch:
            cells.setdefault((atom, constraints), []).append(degree)
    return Interpretation(program.qdom, program.cdom, cells)


@dataclass(frozen=True)
class FixpointResult:
    interpretation: Interpretation
    converged: bool
    iterations: int
    trace: Tuple[Tuple[QcAtom, ...], ...] = field(default_factory=tuple)


def lfp_bounded(program: Program, scope: GroundScope, max_iters: int = DEFAULT_ITERATIONS,
                workers: Optional[int] = None) -> FixpointResult:
    """Iterate ``tp_step`` from the empty interpretation.

    ``trace[k]`` lists the generators that became maximal at iteration ``k + 1``.
    """
    if max_iters < 0:
        raise ValueError("max_iters must be non-negative")
    started = time.perf_counter()
    current = Interpretation.bottom(program.qdom, program.cdom)
    trace: List[Tuple[QcAtom, ...]] = []
    converged = False
    while True:
        following = tp_step(program, current, scope, workers)
        if following == current:
            converged = True
            break
        if len(trace) == max_iters:
            break
        trace.append(following.new_since(current))
        current = following
        logger.debug("Fixpoint iteration", extra_context={"iteration": len(trace), "generators": len(current)})
    logger.performance("lfp_bounded", (time.perf_counter() - started) * 1000,
                       {"iterations": len(trace), "converged": converged, "terms": len(scope.terms)})
    return FixpointResult(current, converged, len(trace), tuple(trace))


def is_model(program: Program, interpretation: Interpretation, scope: GroundScope,
             workers: Optional[int] = None) -> bool:
    """Within ``scope``: ``interpretation`` is a model iff it is a pre-fixpoint of ``tp_step``."""
    return tp_step(program, interpretation, scope, workers).leq(interpretation)


def semantic_consequence(program: Program, phi: QcAtom, scope: GroundScope,
                         max_iters: int = DEFAULT_ITERATIONS) -> Optional[bool]:
    """``P ⊨ phi`` for a defined qc-atom, decided by membership in the least model within scope."""
    if not isinstance(phi.atom, DefinedAtom):
        raise SyntaxObjectError("semantic consequence is decided for defined qc-atoms only")
    result = lfp_bounded(program, scope, max_iters)
    verdict = result.interpretation.contains(phi)
    if verdict is not True and not result.converged:
        return None
    return verdict
