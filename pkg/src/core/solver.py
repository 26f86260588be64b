"""
Depth-bounded goal solver producing proof-carrying solutions.

The search selects the leftmost pending atom, tries program clauses in the
order they are written and explores depth-first. Every goal atom may use at
most ``depth`` clause applications (SQDA nodes) in its derivation; body atoms
share what their parent has left.

Clause heads are matched by weak unification: constructor symbols may differ
when the proximity table relates them, and the accumulated proximity becomes
the degree of the argument equation. A variable is bound to each term close
to the other side in turn, which keeps the search complete for
non-transitive tables.

The constraint set of the goal is fixed by default and its variables are
rigid. In collect mode primitive body atoms are added to it instead, and its
satisfiability is re-checked after every addition or binding.

Degrees computed during the search are lower bounds used for pruning; once
a derivation is complete its degrees are recomputed at their maximum under
the final substitution, thresholds are re-checked and the witness proof
trees are verified by :func:`check_proof`.
"""

import time
from dataclasses import dataclass, replace
from typing import Any, Dict, FrozenSet, Iterator, List, Optional, Tuple

from src.core.proof import SQDA, SQEA, SQPA, ProofTree, check_proof
from src.core.proximity import closeness_degree, term_variants
from src.core.semantics import QcAtom, is_observable
from src.models.constants import DEFAULT_DEPTH, DEFAULT_LIMIT
from src.models.errors import SyntaxObjectError
from src.models.qualification import ANY, format_value
from src.models.syntax import (
    EMPTY,
    IDENTITY,
    Apply,
    Atom,
    ConstraintSet,
    DefinedAtom,
    Equation,
    PrimitiveAtom,
    Program,
    Substitution,
    Term,
    Var,
    renaming_for,
    suffix_of,
)
from src.utilities.logger import AppLogger

logger = AppLogger()


@dataclass(frozen=True)
class GoalItem:
    atom: Atom
    qvar: str
    threshold: Any = ANY

    def __str__(self) -> str:
        return f"{self.atom}#{self.qvar}"


@dataclass(frozen=True)
class Goal:
    """Goal atoms with pairwise distinct qualification variables, plus the goal's constraints."""

    items: Tuple[GoalItem, ...]
    constraints: ConstraintSet = EMPTY

    def __post_init__(self):
        object.__setattr__(self, "items", tuple(self.items))
        seen = set()
        for item in self.items:
            if item.qvar in seen:
                raise SyntaxObjectError(f"qualification variable {item.qvar} is used more than once")
            seen.add(item.qvar)

    def variables(self) -> FrozenSet[str]:
        return frozenset().union(*(item.atom.variables() for item in self.items))

    def __str__(self) -> str:
        text = "?- " + ", ".join(str(item) for item in self.items)
        conditions = [f"{item.qvar} >= {format_value(item.threshold)}"
                      for item in self.items if item.threshold is not ANY]
        if conditions:
            text += " | " + ", ".join(conditions)
        if len(self.constraints):
            text += " with " + ", ".join(str(atom) for atom in self.constraints)
        return text


@dataclass(frozen=True)
class SearchOptions:
    depth: int = DEFAULT_DEPTH
    limit: Optional[int] = DEFAULT_LIMIT
    collect: bool = False
    verify: bool = True


@dataclass(frozen=True)
class Solution:
    """Answer ``⟨σ, μ, Π⟩`` with one witness proof tree per goal atom."""

    subst: Substitution
    qmap: Tuple[Tuple[str, Any], ...]
    constraints: ConstraintSet
    witness: Tuple[ProofTree, ...]

    @property
    def qualifications(self) -> Dict[str, Any]:
        return dict(self.qmap)

    def __str__(self) -> str:
        parts = [f"{name} = {self.subst[name]}" for name in sorted(self.subst)]
        parts += [f"{name} = {format_value(value)}" for name, value in self.qmap]
        text = ", ".join(parts) if parts else "yes"
        if len(self.constraints):
            text += f" with {self.constraints}"
        return text


@dataclass(frozen=True)
class _Step:
    """Derivation skeleton; degrees are filled in once the substitution is final."""

    rule: str
    atom: Atom
    threshold: Any
    clause_id: int = 0
    renaming: Substitution = IDENTITY
    children: Tuple["_Step", ...] = ()


@dataclass(frozen=True)
class _State:
    sigma: Substitution
    constraints: ConstraintSet
    counter: int
    rigid: FrozenSet[str]
    reserved: FrozenSet[str]

    @property
    def effective(self) -> ConstraintSet:
        return self.constraints.substitute(self.sigma)


class Solver:
    """Goal solver for one program."""

    def __init__(self, program: Program, options: Optional[SearchOptions] = None):
        self.program = program
        self.options = options or SearchOptions()
        self.qdom = program.qdom
        self.table = program.proximity
        self.cdom = program.cdom

    def solve(self, goal: Goal) -> Iterator[Solution]:
        rigid = frozenset() if self.options.collect else goal.constraints.variables()
        return self._search(goal, rigid)

    def _search(self, goal: Goal, rigid: FrozenSet[str]) -> Iterator[Solution]:
        started = time.perf_counter()
        emitted = set()
        try:
            if self.cdom.satisfiable(goal.constraints) is not True:
                logger.info("Goal constraints are not satisfiable", extra_context={"goal": str(goal)})
                return
            reserved = goal.variables() | goal.constraints.variables()
            start = 1 + max((suffix_of(name) for name in reserved), default=0)
            state = _State(IDENTITY, goal.constraints, start, frozenset(rigid), reserved)
            items = tuple((item.atom, item.threshold) for item in goal.items)
            for steps, final in self._goal(items, state):
                solution = self._finalize(goal, steps, final)
                if solution is None:
                    continue
                key = _canonical(solution, goal.variables())
                if key in emitted:
                    continue
                emitted.add(key)
                yield solution
                if self.options.limit is not None and len(emitted) >= self.options.limit:
                    return
        finally:
            logger.performance("solve", (time.perf_counter() - started) * 1000,
                               {"goal": str(goal), "solutions": len(emitted), "depth": self.options.depth})

    def _goal(self, items, state: _State) -> Iterator[Tuple[Tuple[_Step, ...], _State]]:
        if not items:
            yield (), state
            return
        (atom, threshold), rest = items[0], items[1:]
        for step, after, _ in self._item(atom, threshold, state, self.options.depth):
            for steps, final in self._goal(rest, after):
                yield (step, *steps), final

    def _body(self, items, state: _State, budget: int) -> Iterator[Tuple[Tuple[_Step, ...], _State, int]]:
        if not items:
            yield (), state, 0
            return
        (atom, threshold), rest = items[0], items[1:]
        for step, after, used in self._item(atom, threshold, state, budget):
            for steps, final, more in self._body(rest, after, budget - used):
                yield (step, *steps), final, used + more

    def _item(self, atom: Atom, threshold: Any, state: _State, budget: int):
        if isinstance(atom, Equation):
            for after, degree in self._weak_unify(atom.lhs, atom.rhs, state, _floor(threshold)):
                if self.qdom.threshold_ok(degree, threshold):
                    yield _Step("SQEA", atom, threshold), after, 0
        elif isinstance(atom, PrimitiveAtom):
            after = self._primitive(atom, state)
            if after is not None:
                yield _Step("SQPA", atom, threshold), after, 0
        else:
            yield from self._defined(atom, threshold, state, budget)

    def _primitive(self, atom: PrimitiveAtom, state: _State) -> Optional[_State]:
        if self.options.collect:
            after = replace(state, constraints=state.constraints.union([atom]))
            return after if self._nf(after).status is True else None
        if self.cdom.entails(state.effective, atom.substitute(state.sigma)) is True:
            return state
        return None

    def _defined(self, atom: DefinedAtom, threshold: Any, state: _State, budget: int):
        if budget < 1:
            return
        qdom = self.qdom
        goal_atom = atom.substitute(state.sigma)
        for clause_id, clause in enumerate(self.program.clauses, 1):
            head = clause.head
            if len(head.args) != len(goal_atom.args):
                continue
            d0 = self.table.sym_prox(goal_atom.symbol, head.symbol)
            if d0 == qdom.bottom or not qdom.threshold_ok(d0, threshold):
                continue
            renaming = renaming_for(clause, state.reserved, state.counter)
            renamed = clause.substitute(renaming)
            counter = max([state.counter - 1, *(suffix_of(v.name) for v in renaming.values())]) + 1
            prepared = replace(state, counter=counter)
            body = tuple((item.atom, item.threshold) for item in renamed.body)
            for unified, degrees in self._unify_args(goal_atom.args, renamed.head.args, prepared,
                                                     _floor(threshold)):
                head_degree = qdom.inf([d0, *degrees])
                if head_degree == qdom.bottom or not qdom.threshold_ok(head_degree, threshold):
                    continue
                for steps, final, used in self._body(body, unified, budget - 1):
                    yield _Step("SQDA", atom, threshold, clause_id, renaming, steps), final, used + 1

    def _nf(self, state: _State):
        return self.cdom.normalize(state.effective)

    def _bindable(self, var: Var, state: _State) -> bool:
        return var.name not in state.rigid

    def _bind(self, state: _State, name: str, term: Term) -> Optional[_State]:
        if term != Var(name) and name in term.variables():
            return None
        after = replace(state, sigma=state.sigma.bind(name, term))
        if self.options.collect and name in state.constraints.substitute(state.sigma).variables():
            if self._nf(after).status is not True:
                return None
        return after

    def _unify_args(self, xs, ys, state: _State, floor: Any = None) -> Iterator[Tuple[_State, Tuple[Any, ...]]]:
        if not xs:
            yield state, ()
            return
        for after, degree in self._weak_unify(xs[0], ys[0], state, floor):
            for final, degrees in self._unify_args(xs[1:], ys[1:], after, floor):
                yield final, (degree, *degrees)

    def _weak_unify(self, g: Term, h: Term, state: _State, floor: Any = None) -> Iterator[Tuple[_State, Any]]:
        """Alternatives making ``g`` and ``h`` close, each with the degree reached.

        Variants below ``floor`` are not tried.
        """
        qdom = self.qdom
        nf = self._nf(state)
        if nf.status is not True:
            return
        g = g.substitute(state.sigma).substitute(nf.subst)
        h = h.substitute(state.sigma).substitute(nf.subst)
        if g == h:
            yield state, qdom.top
            return
        for var, other in ((h, g), (g, h)):
            if isinstance(var, Var) and self._bindable(var, state):
                if isinstance(other, Var):
                    after = self._bind(state, var.name, other)
                    if after is not None:
                        yield after, qdom.top
                    return
                for candidate, degree in term_variants(self.table, other, nf, floor):
                    after = self._bind(state, var.name, candidate)
                    if after is not None:
                        yield after, degree
                return
        if isinstance(g, Apply) and isinstance(h, Apply):
            if len(g.args) != len(h.args):
                return
            d0 = self.table.sym_prox(g.symbol, h.symbol)
            if d0 == qdom.bottom:
                return
            for after, degrees in self._unify_args(g.args, h.args, state, floor):
                degree = qdom.inf([d0, *degrees])
                if degree != qdom.bottom:
                    yield after, degree
            return
        degree, _ = closeness_degree(self.table, self.cdom, state.effective, g, h)
        if degree != qdom.bottom:
            yield state, degree

    def _finalize(self, goal: Goal, steps: Tuple[_Step, ...], state: _State) -> Optional[Solution]:
        constraints = state.effective
        if self.cdom.satisfiable(constraints) is not True:
            return None
        trees = []
        for step in steps:
            tree = self._tree(step, state.sigma, constraints)
            if tree is None:
                return None
            trees.append(tree)
        qmap = tuple((item.qvar, tree.conclusion.degree) for item, tree in zip(goal.items, trees))
        solution = Solution(state.sigma.restrict(goal.variables()), qmap, constraints, tuple(trees))
        if self.options.verify:
            for tree in trees:
                check = check_proof(self.program, tree)
                if not check.ok:
                    logger.warning("Discarding a derivation that does not check",
                                   extra_context={"goal": str(goal),
                                                  "problems": [str(d) for d in check.diagnostics]})
                    return None
        return solution

    def _closeness(self, t: Term, s: Term, constraints: ConstraintSet) -> Any:
        nf = self.cdom.normalize(constraints)
        degree, _ = closeness_degree(self.table, self.cdom, constraints,
                                     t.substitute(nf.subst), s.substitute(nf.subst))
        return degree

    def _tree(self, step: _Step, sigma: Substitution, constraints: ConstraintSet) -> Optional[ProofTree]:
        """Proof tree of a finished step with maximal degrees, or None if a threshold fails."""
        qdom = self.qdom
        atom = step.atom.substitute(sigma)
        if step.rule == "SQEA":
            degree = self._closeness(atom.lhs, atom.rhs, constraints)
            tree: ProofTree = SQEA(QcAtom(atom, degree, constraints))
        elif step.rule == "SQPA":
            degree = qdom.top
            tree = SQPA(QcAtom(atom, degree, constraints))
        else:
            clause = self.program.clause(step.clause_id)
            theta = Substitution({name: step.renaming.get(name, Var(name)).substitute(sigma)
                                  for name in clause.variables()})
            instance = clause.substitute(theta)
            head = instance.head
            head_degrees = [self.table.sym_prox(atom.symbol, head.symbol)]
            head_degrees += [self._closeness(a, b, constraints) for a, b in zip(atom.args, head.args)]
            equations = [SQEA(QcAtom(Equation(a, b), d, constraints))
                         for a, b, d in zip(atom.args, head.args, head_degrees[1:])]
            premises: List[ProofTree] = []
            for child in step.children:
                subtree = self._tree(child, sigma, constraints)
                if subtree is None:
                    return None
                premises.append(subtree)
            body_degrees = tuple(p.conclusion.degree for p in premises)
            degree = qdom.bound(head_degrees, instance.attenuation, body_degrees)
            tree = SQDA(QcAtom(atom, degree, constraints), step.clause_id, theta,
                        tuple(head_degrees), body_degrees, (*equations, *premises))
        if degree == qdom.bottom or not qdom.threshold_ok(degree, step.threshold):
            return None
        return tree


def _floor(threshold: Any) -> Any:
    return None if threshold is ANY else threshold


def _canonical(solution: Solution, goal_vars: FrozenSet[str]):
    """Solution key up to renaming of variables that do not occur in the goal."""
    renaming: Dict[str, Term] = {}
    for name in sorted(goal_vars):
        term = solution.subst.get(name, Var(name))
        for var in sorted(term.variables()):
            if var not in goal_vars and var not in renaming:
                renaming[var] = Var(f"_{len(renaming) + 1}")
    for var in sorted(solution.constraints.variables()):
        if var not in goal_vars and var not in renaming:
            renaming[var] = Var(f"_{len(renaming) + 1}")
    bindings = tuple((name, str(solution.subst.get(name, Var(name)).substitute(renaming)))
                     for name in sorted(goal_vars))
    return bindings, solution.qmap, solution.constraints.substitute(renaming)


def solve(program: Program, goal: Goal, options: Optional[SearchOptions] = None) -> Iterator[Solution]:
    """Lazily enumerate solutions of ``goal``; see :class:`Solver`."""
    return Solver(program, options).solve(goal)


def prove(program: Program, phi: QcAtom, depth: int = DEFAULT_DEPTH) -> Optional[ProofTree]:
    """A proof of ``phi`` with at most ``depth`` SQDA nodes, or None when none was found.

    None does not assert that ``phi`` is underivable.
    """
    if is_observable(phi, program.qdom, program.cdom) is not True:
        return None
    if not isinstance(phi.atom, DefinedAtom):
        leaf = SQEA(phi) if isinstance(phi.atom, Equation) else SQPA(phi)
        return leaf if check_proof(program, leaf).ok else None
    goal = Goal((GoalItem(phi.atom, "_W", phi.degree),), phi.constraints)
    solver = Solver(program, SearchOptions(depth=depth, limit=None, collect=False, verify=False))
    for solution in solver._search(goal, phi.variables()):
        candidate = solution.witness[0].with_degree(phi.degree)
        if check_proof(program, candidate).ok:
            return candidate
    return None
