"""Tests for qc-atoms, interpretations and the bounded fixpoint."""

import random
from fractions import Fraction

import pytest

from src.core.constraints import REAL
from src.core.semantics import (
    GroundScope,
    Interpretation,
    QcAtom,
    immediate_consequence,
    is_model,
    is_observable,
    lfp_bounded,
    qc_entails,
    semantic_consequence,
    tp_step,
    valid_in,
)
from src.models.errors import SyntaxObjectError
from src.models.qualification import U
from src.models.syntax import (
    EMPTY,
    Apply,
    Basic,
    ConstraintSet,
    DefinedAtom,
    Equation,
    PrimitiveAtom,
    Substitution,
    Var,
)

F = Fraction
X, Y, Z, A, B = Var("X"), Var("Y"), Var("Z"), Var("A"), Var("B")
a, b, c_ = Apply("a"), Apply("b"), Apply("c")


def c(*args):
    return Apply("c", args)


def cp(*args):
    return Apply("c'", args)


def path(x, y):
    return DefinedAtom("path", (x, y))


PI = ConstraintSet([
    PrimitiveAtom("cp_>", (X, Basic(1))),
    PrimitiveAtom("op_+", (A, A, X)),
    PrimitiveAtom("op_*", (Basic(2), A, Y)),
])
PI_PRIME = ConstraintSet([
    PrimitiveAtom("cp_>=", (A, Basic(3))),
    PrimitiveAtom("op_*", (Basic(2), A, X)),
    PrimitiveAtom("op_+", (A, A, Y)),
])


class TestQcEntailment:
    PHI = QcAtom(DefinedAtom("r", (cp(Y), c(X), Z)), F(4, 5), PI)
    WEAKER = QcAtom(DefinedAtom("r", (cp(Y), c(X), c(Var("Z'")))), F(7, 10), PI_PRIME)

    def test_instance_with_stronger_constraints(self):
        result = qc_entails(self.PHI, self.WEAKER, U, REAL)
        assert result.verdict is True
        assert result.theta == {"Z": c(Var("Z'"))}

    def test_not_the_other_way(self):
        assert not qc_entails(self.WEAKER, self.PHI, U, REAL)

    def test_degree_must_not_grow(self):
        stronger = self.WEAKER.with_degree(F(9, 10))
        assert qc_entails(self.PHI, stronger, U, REAL).verdict is False

    def test_constraint_only_variables_are_bound_by_matching(self):
        phi = QcAtom(DefinedAtom("p", (X,)), F(1), ConstraintSet([PrimitiveAtom("op_+", (A, A, X))]))
        other = QcAtom(DefinedAtom("p", (X,)), F(1), ConstraintSet([PrimitiveAtom("op_+", (B, B, X))]))
        result = qc_entails(phi, other, U, REAL)
        assert result.verdict is True
        assert result.theta == {"A": B}

    def test_equations_match_in_either_orientation(self):
        phi = QcAtom(DefinedAtom("p", (X,)), F(1), ConstraintSet([Equation(X, Apply("f", (A,)))]))
        other = QcAtom(DefinedAtom("p", (X,)), F(1), ConstraintSet([Equation(Apply("f", (B,)), X)]))
        assert qc_entails(phi, other, U, REAL).theta == {"A": B}

    def test_atom_variables_stay_fixed(self):
        phi = QcAtom(DefinedAtom("p", (X,)), F(1), ConstraintSet([PrimitiveAtom("op_+", (A, A, X))]))
        other = QcAtom(DefinedAtom("p", (X,)), F(1), ConstraintSet([PrimitiveAtom("op_+", (B, B, Y))]))
        assert qc_entails(phi, other, U, REAL).verdict is False

    def test_observability(self):
        assert is_observable(self.PHI, U, REAL) is True
        assert is_observable(self.PHI.with_degree(F(0)), U, REAL) is False
        unsat = QcAtom(DefinedAtom("p"), F(1), ConstraintSet([Equation(a, b)]))
        assert is_observable(unsat, U, REAL) is False

    def test_text(self):
        assert str(QcAtom(DefinedAtom("p", (a,)), F(9, 10))) == "p(a)#0.9"


class TestInterpretation:

    def test_cells_keep_maximal_degrees(self):
        atom = DefinedAtom("p", (a,))
        interpretation = Interpretation(U, REAL, {(atom, EMPTY): [F(1, 2), F(4, 5), F(0)]})
        assert interpretation.degrees(atom) == (F(4, 5),)
        assert len(interpretation) == 1

    def test_membership_by_entailment(self):
        general = DefinedAtom("q", (X, c(X)))
        interpretation = Interpretation(U, REAL, {(general, EMPTY): [F(1)]})
        assert QcAtom(DefinedAtom("q", (a, c(a))), F(9, 10)) in interpretation
        assert QcAtom(DefinedAtom("q", (a, c(b))), F(9, 10)) not in interpretation
        assert interpretation.best_degrees(DefinedAtom("q", (a, c(a)))) == (F(1),)

    def test_inclusion(self):
        atom = DefinedAtom("p", (a,))
        low = Interpretation(U, REAL, {(atom, EMPTY): [F(1, 2)]})
        high = Interpretation(U, REAL, {(atom, EMPTY): [F(4, 5)]})
        assert low.leq(high)
        assert not high.leq(low)
        assert Interpretation.bottom(U, REAL).leq(low)

    def test_valid_in(self, running):
        empty = Interpretation.bottom(U, REAL)
        equation = QcAtom(Equation(c(X), cp(X)), F(9, 10))
        assert valid_in(running, empty, equation) is True
        assert valid_in(running, empty, equation.with_degree(F(19, 20))) is False
        bounded = QcAtom(PrimitiveAtom("cp_>", (X, Basic(1))), F(1),
                         ConstraintSet([PrimitiveAtom("cp_>=", (X, Basic(3)))]))
        assert valid_in(running, empty, bounded) is True
        assert valid_in(running, empty, QcAtom(DefinedAtom("q", (a, c(a))), F(1))) is False


class TestImmediateConsequence:
    THETA = Substitution({"X": a, "Y": c(a)})

    @pytest.fixture
    def facts(self):
        return Interpretation(U, REAL, {(DefinedAtom("q", (a, c(a))), EMPTY): [F(1)]})

    def test_clause_instance(self, running, facts):
        clause = running.clause(2)
        phi = QcAtom(DefinedAtom("p", (c(a), c(a))), F(9, 10))
        assert immediate_consequence(running, facts, clause, phi, self.THETA)

    def test_close_predicate(self, running, facts):
        clause = running.clause(2)
        assert immediate_consequence(running, facts, clause,
                                     QcAtom(DefinedAtom("p'", (c(a), c(a))), F(4, 5)), self.THETA)
        assert not immediate_consequence(running, facts, clause,
                                         QcAtom(DefinedAtom("p'", (c(a), c(a))), F(17, 20)), self.THETA)

    def test_explicit_degrees(self, running, facts):
        clause = running.clause(2)
        phi = QcAtom(DefinedAtom("p", (c(a), c(a))), F(9, 10))
        assert immediate_consequence(running, facts, clause, phi, self.THETA, ((F(1),) * 3, (F(1),)))
        assert not immediate_consequence(running, facts, clause, phi, self.THETA, ((F(1),) * 3, (F(1, 2),)))

    def test_missing_body_fact(self, running):
        phi = QcAtom(DefinedAtom("p", (c(a), c(a))), F(1, 2))
        assert not immediate_consequence(running, Interpretation.bottom(U, REAL), running.clause(2),
                                         phi, self.THETA)


class TestGroundScope:

    def test_constants(self, chain):
        assert GroundScope.from_program(chain, 0).terms == (a, b, c_)

    def test_nested_terms(self, fixpoint_programs):
        scope = GroundScope.from_program(fixpoint_programs["nested"], 1)
        z = Apply("z")
        assert scope.terms == (z, Apply("s", (z,)), Apply("t", (z,)))

    def test_constraint_variables(self, chain):
        pi = ConstraintSet([PrimitiveAtom("cp_>", (X, Basic(1)))])
        scope = GroundScope.from_program(chain, 0, [pi])
        assert scope.terms[:2] == (X, Basic(1))
        assert scope.constraint_sets == (pi,)

    def test_negative_depth(self, chain):
        with pytest.raises(ValueError):
            GroundScope.from_program(chain, -1)


class TestFixpoint:

    @pytest.fixture(scope="class")
    def chain_lfp(self, chain):
        return lfp_bounded(chain, GroundScope.from_program(chain, 0))

    def test_chain(self, chain_lfp):
        assert chain_lfp.converged
        model = chain_lfp.interpretation
        assert model.degrees(path(a, b)) == (F(9, 10),)
        assert model.degrees(path(a, c_)) == (F(7, 10),)
        assert chain_lfp.iterations == len(chain_lfp.trace)

    def test_first_iteration_holds_the_facts(self, chain_lfp):
        assert {g.atom.pred for g in chain_lfp.trace[0]} == {"edge"}

    def test_nested(self, fixpoint_programs):
        nested = fixpoint_programs["nested"]
        result = lfp_bounded(nested, GroundScope.from_program(nested, 1))
        z = Apply("z")
        assert result.converged
        assert result.interpretation.degrees(DefinedAtom("nat", (Apply("t", (z,)),))) == (F(3, 5),)
        assert result.interpretation.degrees(
            DefinedAtom("nat", (Apply("s", (Apply("s", (z,)),)),))) == (F(81, 100),)

    def test_iteration_bound(self, chain):
        scope = GroundScope.from_program(chain, 0)
        result = lfp_bounded(chain, scope, max_iters=1)
        assert not result.converged
        assert result.iterations == 1
        assert lfp_bounded(chain, scope, max_iters=0).interpretation == Interpretation.bottom(U, REAL)
        with pytest.raises(ValueError):
            lfp_bounded(chain, scope, max_iters=-1)

    def test_least_model(self, chain, chain_lfp):
        scope = GroundScope.from_program(chain, 0)
        assert is_model(chain, chain_lfp.interpretation, scope)
        assert not is_model(chain, Interpretation.bottom(U, REAL), scope)

    def test_worker_pool_gives_the_same_step(self, chain, chain_lfp):
        scope = GroundScope.from_program(chain, 0)
        model = chain_lfp.interpretation
        assert tp_step(chain, model, scope, workers=4) == tp_step(chain, model, scope)

    def test_semantic_consequence(self, chain):
        scope = GroundScope.from_program(chain, 0)
        assert semantic_consequence(chain, QcAtom(path(a, c_), F(7, 10)), scope) is True
        assert semantic_consequence(chain, QcAtom(path(a, c_), F(3, 4)), scope) is False
        with pytest.raises(SyntaxObjectError):
            semantic_consequence(chain, QcAtom(Equation(a, a), F(1)), scope)

    @pytest.mark.parametrize("seed", range(200))
    def test_step_is_monotone(self, chain, chain_lfp, seed):
        rng = random.Random(seed)
        scope = GroundScope.from_program(chain, 0)
        generators = list(chain_lfp.interpretation.generators())
        larger = [g for g in generators if rng.random() < 0.7]
        smaller = [g for g in larger if rng.random() < 0.6]

        def build(chosen):
            cells = {}
            for g in chosen:
                cells.setdefault((g.atom, g.constraints), []).append(g.degree)
            return Interpretation(U, REAL, cells)

        small, large = build(smaller), build(larger)
        assert small.leq(large)
        assert tp_step(chain, small, scope).leq(tp_step(chain, large, scope))

    def test_iterates_grow(self, chain):
        scope = GroundScope.from_program(chain, 0)
        iterates = [lfp_bounded(chain, scope, max_iters=k).interpretation for k in range(5)]
        for smaller, larger in zip(iterates, iterates[1:]):
            assert smaller.leq(larger)

    @pytest.mark.parametrize("seed", range(200))
    def test_validity_is_closed_under_entailment(self, chain, chain_lfp, seed):
        rng = random.Random(seed)
        model = chain_lfp.interpretation
        phi = rng.choice(list(model.generators()))
        weaker = phi.with_degree(phi.degree * F(rng.randint(1, 10), 10))
        if rng.random() < 0.5:
            weaker = QcAtom(weaker.atom, weaker.degree, ConstraintSet([Equation(X, a)]))
        assert qc_entails(phi, weaker, U, REAL)
        assert valid_in(chain, model, phi)
        assert valid_in(chain, model, weaker)


class TestWorkedExamples:
    """Facts of the running and good-work programs at the iteration that first derives them."""

    PHI_Q = QcAtom(DefinedAtom("q", (X, cp(Y))), F(9, 10), PI)
    PHI_P = QcAtom(DefinedAtom("p'", (cp(Y), c(X))), F(4, 5), PI)

    @pytest.fixture(scope="class")
    def running_iterates(self, running):
        scope = GroundScope.from_program(running, 1, [PI])
        first = tp_step(running, Interpretation.bottom(U, REAL), scope)
        return first, tp_step(running, first, scope)

    def test_clause_fact_at_the_first_step(self, running_iterates):
        first, _ = running_iterates
        assert self.PHI_Q in first
        assert self.PHI_Q.with_degree(F(19, 20)) not in first

    def test_close_predicate_at_the_second_step(self, running_iterates):
        first, second = running_iterates
        assert self.PHI_P not in first
        assert self.PHI_P in second
        assert self.PHI_Q in second

    def test_membership_modulo_forced_equalities(self, running_iterates):
        first, _ = running_iterates
        assert QcAtom(DefinedAtom("q", (X, cp(X))), F(9, 10), PI) in first
        assert QcAtom(DefinedAtom("q", (Y, cp(X))), F(9, 10), PI) in first

    def test_goodwork_model(self, goodwork):
        result = lfp_bounded(goodwork, GroundScope.from_program(goodwork, 0))
        model = result.interpretation
        assert result.converged
        for name, degree in (("king_liar", (F(3, 5), F(5))), ("king_lear", (F(27, 40), F(4)))):
            assert QcAtom(DefinedAtom("goodWork", (Apply(name),)), degree) in model
        assert QcAtom(DefinedAtom("goodWork", (Apply("king_liar"),)), (F(7, 10), F(5))) not in model
