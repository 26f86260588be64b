"""
Proof trees of the qualified constrained Horn logic and their checker.

Three inference rules build a tree:

* ``SQDA`` derives a defined atom from a program clause instance, with one
  equational premise per head argument followed by one premise per body atom
* ``SQEA`` closes an equation whose sides are close at the stated degree
* ``SQPA`` closes a primitive atom entailed by the constraint set
"""

from dataclasses import dataclass, field, replace
from typing import Any, List, Optional, Tuple

from src.core.proximity import close_at
from src.core.semantics import QcAtom, is_observable
from src.models.errors import Diagnostic, UnsatisfiableError
from src.models.qualification import format_value
from src.models.syntax import DefinedAtom, Equation, PrimitiveAtom, Program, Substitution


class ProofTree:
    """Common interface of the three node kinds."""

    rule = ""
    conclusion: QcAtom

    @property
    def children(self) -> Tuple["ProofTree", ...]:
        return ()

    def with_degree(self, degree: Any) -> "ProofTree":
        return replace(self, conclusion=self.conclusion.with_degree(degree))


@dataclass(frozen=True)
class SQEA(ProofTree):
    conclusion: QcAtom
    rule = "SQEA"


@dataclass(frozen=True)
class SQPA(ProofTree):
    conclusion: QcAtom
    rule = "SQPA"


@dataclass(frozen=True)
class SQDA(ProofTree):
    """Clause application: ``head_degrees`` is ``d₀..dₙ``, ``body_degrees`` is ``e₁..eₘ``."""

    conclusion: QcAtom
    clause_id: int
    theta: Substitution
    head_degrees: Tuple[Any, ...]
    body_degrees: Tuple[Any, ...]
    premises: Tuple[ProofTree, ...] = field(default_factory=tuple)
    rule = "SQDA"

    @property
    def children(self) -> Tuple[ProofTree, ...]:
        return self.premises


def sqda_count(tree: ProofTree) -> int:
    own = 1 if isinstance(tree, SQDA) else 0
    return own + sum(sqda_count(child) for child in tree.children)


@dataclass(frozen=True)
class ProofCheck:
    ok: bool
    diagnostics: Tuple[Diagnostic, ...] = ()

    def __bool__(self) -> bool:
        return self.ok


def check_proof(program: Program, tree: ProofTree) -> ProofCheck:
    """Validate every node of ``tree``; reports the first failing node and condition.

    Raises :class:`ProofError` when a node names a clause the program does not have.
    """
    if is_observable(tree.conclusion, program.qdom, program.cdom) is not True:
        problem = Diagnostic("not-observable", f"conclusion {tree.conclusion} is not observable", path=())
        return ProofCheck(False, (problem,))
    problem = _check(program, tree, ())
    return ProofCheck(problem is None, () if problem is None else (problem,))


def _check(program: Program, tree: ProofTree, path: Tuple[int, ...]) -> Optional[Diagnostic]:
    qdom = program.qdom
    phi = tree.conclusion
    if not qdom.contains(phi.degree) or phi.degree == qdom.bottom:
        return Diagnostic("degree", f"degree {format_value(phi.degree)} must be a non-bottom value of {qdom}",
                          path=path)
    if isinstance(tree, SQEA):
        return _check_equation(program, phi, path)
    if isinstance(tree, SQPA):
        if not isinstance(phi.atom, PrimitiveAtom):
            return Diagnostic("shape", f"SQPA concludes {phi.atom}, which is not primitive", path=path)
        if program.cdom.check_primitive(phi.constraints, phi.atom) is not True:
            return Diagnostic("sqpa-entail", f"{phi.atom} is not entailed by {phi.constraints}", path=path)
        return None
    if isinstance(tree, SQDA):
        return _check_sqda(program, tree, path)
    return Diagnostic("shape", f"unknown proof node {tree!r}", path=path)


def _check_equation(program: Program, phi: QcAtom, path: Tuple[int, ...]) -> Optional[Diagnostic]:
    if not isinstance(phi.atom, Equation):
        return Diagnostic("shape", f"SQEA concludes {phi.atom}, which is not an equation", path=path)
    try:
        closeness = close_at(program.proximity, phi.constraints, phi.degree,
                             phi.atom.lhs, phi.atom.rhs, program.cdom)
    except UnsatisfiableError as exc:
        return Diagnostic("sqea-close", str(exc), path=path)
    if closeness.verdict is not True:
        return Diagnostic("sqea-close", f"{phi.atom.lhs} and {phi.atom.rhs} are not close at level "
                          f"{format_value(phi.degree)} (degree {format_value(closeness.degree)})", path=path)
    return None


def _check_sqda(program: Program, tree: SQDA, path: Tuple[int, ...]) -> Optional[Diagnostic]:
    qdom = program.qdom
    phi = tree.conclusion
    clause = program.clause(tree.clause_id)
    if not isinstance(phi.atom, DefinedAtom):
        return Diagnostic("shape", f"SQDA concludes {phi.atom}, which is not a defined atom", path=path)
    instance = clause.substitute(tree.theta)
    head = instance.head
    n, m = len(head.args), len(instance.body)
    if len(phi.atom.args) != n:
        return Diagnostic("shape", f"{phi.atom} and clause head {head} differ in arity", path=path)
    if len(tree.head_degrees) != n + 1 or len(tree.body_degrees) != m or len(tree.children) != n + m:
        return Diagnostic("shape", f"SQDA over clause {tree.clause_id} needs {n + 1} head degrees, "
                          f"{m} body degrees and {n + m} premises", path=path)

    d0 = tree.head_degrees[0]
    if d0 == qdom.bottom or not qdom.leq(d0, program.proximity.sym_prox(phi.atom.symbol, head.symbol)):
        return Diagnostic("sqda-predicate", f"proximity of {phi.atom.symbol} and {head.symbol} "
                          f"does not reach {format_value(d0)}", path=path)

    expected: List[QcAtom] = [QcAtom(Equation(a, b), d, phi.constraints)
                              for a, b, d in zip(phi.atom.args, head.args, tree.head_degrees[1:])]
    expected += [QcAtom(item.atom, e, phi.constraints) for item, e in zip(instance.body, tree.body_degrees)]
    for index, (child, wanted) in enumerate(zip(tree.children, expected)):
        if child.conclusion != wanted:
            return Diagnostic("shape", f"premise {index} concludes {child.conclusion}, expected {wanted}",
                              path=path + (index,))
        if index < n and not isinstance(child, SQEA):
            return Diagnostic("shape", f"premise {index} must be an SQEA node", path=path + (index,))

    for item, e in zip(instance.body, tree.body_degrees):
        if not qdom.threshold_ok(e, item.threshold):
            return Diagnostic("sqda-threshold", f"body atom {item.atom} has degree {format_value(e)} "
                              f"below threshold {format_value(item.threshold)}", path=path)

    bound = qdom.bound(tree.head_degrees, instance.attenuation, tree.body_degrees)
    if not qdom.leq(phi.degree, bound):
        return Diagnostic("sqda-bound", f"degree {format_value(phi.degree)} exceeds the clause bound "
                          f"{format_value(bound)}", path=path)

    for index, child in enumerate(tree.children):
        problem = _check(program, child, path + (index,))
        if problem is not None:
            return problem
    return None
