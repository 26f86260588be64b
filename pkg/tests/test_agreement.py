"""Goal solving agrees with the least fixpoint, and every witness checks.

The fixpoint over a small ground universe is the reference: for each ground
atom it holds, the best answers of the solver reach exactly the same maximal
degrees, and ``prove`` finds a proof tree at each of them. In the other
direction every ground answer inside the universe is a member of the
fixpoint, and a witness of height ``k`` concludes a member of ``T_P↑k``.
"""

from collections import defaultdict

import pytest

from src.core.proof import SQDA, check_proof
from src.core.semantics import GroundScope, Interpretation, QcAtom, lfp_bounded, tp_step
from src.core.solver import Goal, GoalItem, SearchOptions, prove, solve
from src.models.syntax import DefinedAtom, Var

ORACLE_CASES = [
    ("chain", 0),
    ("similar", 0),
    ("weights", 0),
    ("costs", 0),
    ("nested", 1),
]

# Iterations compared step by step, and the SQDA budget a member of T_P↑k
# needs: programs with one defined body atom per clause are linear.
ITERATION_CASES = [
    ("chain", 0, 4, lambda k: 2 ** k - 1),
    ("nested", 1, 3, lambda k: k),
]

CORPUS_GOALS = [
    ("goodwork", "?- goodWork(X)#W | W >= (0.55,30)"),
    ("goodwork", "?- goodWork(X)#W, famousAuthor(Y)#V"),
    ("running", "?- q(X,Z)#W | W >= 0.8 with cp_>(X,1.0), op_+(A,A,X), op_*(2.0,A,Y)"),
    ("running", "?- r(c(X),Y,Z)#W with cp_>(X,3)"),
    ("running", "?- p'(c'(X),Y)#W"),
    ("family", "?- ancestor(X,Y)#W"),
    ("fuzzy", "?- valuable(X)#W"),
    ("budget", "?- cheap(X)#W"),
    ("budget", "?- affordable(X)#W | W >= (0.5,5)"),
]


def _cells(interpretation):
    cells = defaultdict(list)
    for phi in interpretation.generators():
        cells[phi.atom].append(phi.degree)
    return cells


def _open_goals(program):
    """One goal ``p(X1, .., Xn)#W`` per defined predicate of ``program``."""
    heads = {(clause.head.pred, len(clause.head.args)) for clause in program.clauses}
    for pred, arity in sorted(heads):
        atom = DefinedAtom(pred, tuple(Var(f"X{i}") for i in range(1, arity + 1)))
        yield Goal((GoalItem(atom, "W"),))


def _height(tree):
    below = max((_height(child) for child in tree.children), default=0)
    return below + 1 if isinstance(tree, SQDA) else below


def _in_scope(atom, scope):
    terms = set(scope.terms)
    return atom.is_ground and all(arg in terms for arg in atom.args)


def _iterates(program, scope, count):
    current = Interpretation.bottom(program.qdom, program.cdom)
    iterates = [current]
    for _ in range(count):
        current = tp_step(program, current, scope)
        iterates.append(current)
    return iterates


class TestFixpointOracle:

    @pytest.mark.parametrize("name, universe_depth", ORACLE_CASES)
    def test_solver_reaches_the_fixpoint_degrees(self, fixpoint_programs, name, universe_depth):
        program = fixpoint_programs[name]
        qdom = program.qdom
        result = lfp_bounded(program, GroundScope.from_program(program, universe_depth))
        assert result.converged
        for atom, degrees in _cells(result.interpretation).items():
            answers = solve(program, Goal((GoalItem(atom, "W"),)), SearchOptions(limit=None))
            found = [solution.qualifications["W"] for solution in answers]
            assert set(qdom.maxima(found)) == set(qdom.maxima(degrees)), str(atom)
            for degree in degrees:
                assert prove(program, QcAtom(atom, degree)) is not None, f"{atom}#{degree}"

    @pytest.mark.parametrize("name, universe_depth", ORACLE_CASES)
    def test_ground_answers_are_in_the_fixpoint(self, fixpoint_programs, name, universe_depth):
        program = fixpoint_programs[name]
        scope = GroundScope.from_program(program, universe_depth)
        model = lfp_bounded(program, scope).interpretation
        checked = 0
        for goal in _open_goals(program):
            for solution in solve(program, goal, SearchOptions(limit=None)):
                conclusion = solution.witness[0].conclusion
                if not _in_scope(conclusion.atom, scope):
                    continue
                checked += 1
                assert model.contains(conclusion) is True, str(conclusion)
        assert checked > 0

    def test_goodwork(self, goodwork):
        result = lfp_bounded(goodwork, GroundScope.from_program(goodwork, 0))
        assert result.converged
        cells = _cells(result.interpretation)
        for atom, degrees in cells.items():
            answers = solve(goodwork, Goal((GoalItem(atom, "W"),)), SearchOptions(limit=None))
            found = [solution.qualifications["W"] for solution in answers]
            assert set(goodwork.qdom.maxima(found)) == set(goodwork.qdom.maxima(degrees)), str(atom)


class TestIterations:

    @pytest.mark.parametrize("name, universe_depth, count, budget", ITERATION_CASES)
    def test_witness_height_bounds_the_iteration(self, fixpoint_programs, name, universe_depth, count, budget):
        program = fixpoint_programs[name]
        scope = GroundScope.from_program(program, universe_depth)
        iterates = _iterates(program, scope, count)
        for goal in _open_goals(program):
            for solution in solve(program, goal, SearchOptions(depth=count, limit=None)):
                tree = solution.witness[0]
                if not _in_scope(tree.conclusion.atom, scope):
                    continue
                height = _height(tree)
                assert height <= count
                assert iterates[height].contains(tree.conclusion) is True, f"{tree.conclusion} at {height}"

    @pytest.mark.parametrize("name, universe_depth, count, budget", ITERATION_CASES)
    def test_members_of_each_iterate_have_proofs(self, fixpoint_programs, name, universe_depth, count, budget):
        program = fixpoint_programs[name]
        scope = GroundScope.from_program(program, universe_depth)
        for k, iterate in enumerate(_iterates(program, scope, count)):
            for phi in iterate.generators():
                assert prove(program, phi, depth=budget(k)) is not None, f"{phi} at {k}"

    def test_nested_needs_each_iteration(self, fixpoint_programs):
        program = fixpoint_programs["nested"]
        scope = GroundScope.from_program(program, 1)
        iterates = _iterates(program, scope, 2)
        phi = next(g for g in iterates[2].generators() if g not in iterates[1])
        assert prove(program, phi, depth=1) is None
        assert prove(program, phi, depth=2) is not None


class TestWitnesses:

    @pytest.mark.parametrize("collect", [False, True])
    @pytest.mark.parametrize("name, text", CORPUS_GOALS)
    def test_every_witness_checks(self, corpus, ask, name, text, collect):
        program = corpus[name]
        for solution in ask(program, text, limit=None, collect=collect, verify=False):
            assert len(solution.witness) == len(solution.qmap)
            for tree in solution.witness:
                check = check_proof(program, tree)
                assert check.ok, [str(d) for d in check.diagnostics]
