"""Tests for encoding qualification values as real constraint terms."""

import random
from fractions import Fraction

import pytest

from src.core.constraints import HERBRAND, REAL
from src.core.embedding import PAIR, Embedding, expressible
from src.models.errors import EmbeddingError, QualificationDomainError
from src.models.qualification import INF, B, U, W, product
from src.models.syntax import Apply, Basic, ConstraintSet, Equation, PrimitiveAtom, Var

F = Fraction
X, Y, Z = Var("X"), Var("Y"), Var("Z")
UW = product(U, W)


def bind(constraints: ConstraintSet, **values) -> ConstraintSet:
    return constraints.union(Equation(Var(name), term) for name, term in values.items())


class TestExpressible:

    def test_numeric_domains_need_arithmetic(self):
        assert expressible(U, REAL)
        assert expressible(UW, REAL)
        assert not expressible(W, HERBRAND)
        assert expressible(B, HERBRAND)
        assert expressible(product(B, B), HERBRAND)


class TestEncoding:

    def test_encode(self):
        assert Embedding(U).encode_value(F(1, 2)) == Basic(F(1, 2))
        assert Embedding(B).encode_value(True) == Basic(1)
        assert Embedding(UW).encode_value((F(3, 5), F(5))) == Apply(PAIR, (Basic(F(3, 5)), Basic(5)))

    def test_bottom_has_no_encoding(self):
        with pytest.raises(EmbeddingError):
            Embedding(U).encode_value(F(0))
        with pytest.raises(EmbeddingError):
            Embedding(W).encode_value(INF)

    def test_values_outside_the_domain(self):
        with pytest.raises(QualificationDomainError):
            Embedding(U).encode_value(F(2))

    def test_decode_inverts_encode(self):
        embedding = Embedding(UW)
        value = (F(27, 40), F(4))
        assert embedding.decode(embedding.encode_value(value)) == value

    @pytest.mark.parametrize("qdom, term", [
        (U, Basic(0)),
        (U, Apply("a")),
        (B, Basic(0)),
        (UW, Basic(1)),
        (UW, Apply(PAIR, (Basic(1),))),
    ])
    def test_decode_rejects_non_encodings(self, qdom, term):
        with pytest.raises(EmbeddingError):
            Embedding(qdom).decode(term)


class TestQVal:

    def test_uncertainty(self):
        assert Embedding(U).qval_constraint(X) == ConstraintSet([
            PrimitiveAtom("cp_<", (Basic(0), X)),
            PrimitiveAtom("cp_<=", (X, Basic(1))),
        ])

    def test_weight(self):
        assert Embedding(W).qval_constraint(X) == ConstraintSet([PrimitiveAtom("cp_<=", (Basic(0), X))])

    def test_product_uses_fresh_variables(self):
        constraints = Embedding(UW).qval_constraint(X)
        assert Equation(X, Apply(PAIR, (Var("_Q_1"), Var("_Q_2")))) in constraints
        assert REAL.satisfiable(bind(constraints, X=Embedding(UW).encode_value((F(1, 2), F(3))))) is True
        assert REAL.satisfiable(bind(constraints, X=Apply(PAIR, (Basic(0), Basic(3))))) is False

    @pytest.mark.parametrize("value, ok", [(F(1, 2), True), (F(1), True), (F(0), False), (F(3, 2), False)])
    def test_membership(self, value, ok):
        assert REAL.satisfiable(bind(Embedding(U).qval_constraint(X), X=Basic(value))) is ok

    def test_boolean_is_herbrand(self):
        constraints = Embedding(B).qval_constraint(X)
        assert constraints == ConstraintSet([Equation(X, Basic(1))])
        assert HERBRAND.satisfiable(constraints) is True


class TestQBound:

    def test_uncertainty_is_a_product(self):
        constraints = Embedding(U).qbound_constraint(X, Y, Z)
        assert constraints == ConstraintSet([
            PrimitiveAtom("op_*", (Y, Z, Var("_Q_1"))),
            PrimitiveAtom("cp_<=", (X, Var("_Q_1"))),
        ])

    def test_weight_is_a_sum(self):
        constraints = Embedding(W).qbound_constraint(X, Y, Z)
        assert constraints == ConstraintSet([
            PrimitiveAtom("op_+", (Y, Z, Var("_Q_1"))),
            PrimitiveAtom("cp_>=", (X, Var("_Q_1"))),
        ])

    def test_prefix(self):
        constraints = Embedding(U).qbound_constraint(X, Y, Z, prefix="_B")
        assert "_B_1" in constraints.variables()


def _value(rng: random.Random, qdom):
    if qdom == U:
        return F(rng.randint(1, 10), 10)
    if qdom == W:
        return F(rng.randint(0, 12), rng.choice([1, 2]))
    if qdom == B:
        return True
    return (_value(rng, qdom.left), _value(rng, qdom.right))


class TestQBoundAgreesWithTheDomain:
    """Satisfiability of the encoded bound matches the lattice order."""

    @pytest.mark.parametrize("seed", range(200))
    def test_agreement(self, seed):
        rng = random.Random(seed)
        qdom = [U, W, UW, product(U, W, B)][seed % 4]
        embedding = Embedding(qdom)
        x, y, z = (_value(rng, qdom) for _ in range(3))
        constraints = bind(embedding.qbound_constraint(X, Y, Z),
                           X=embedding.encode_value(x),
                           Y=embedding.encode_value(y),
                           Z=embedding.encode_value(z))
        assert REAL.satisfiable(constraints) is qdom.leq(x, qdom.attenuate(y, z))
