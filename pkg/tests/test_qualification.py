"""Tests for the qualification domains B, U, W and their strict products."""

import random
from fractions import Fraction

import pytest

from src.models.errors import QualificationDomainError
from src.models.qualification import ANY, INF, B, ProductDomain, U, W, format_value, product

F = Fraction


class TestBooleanDomain:

    def test_bounds(self):
        assert B.bottom is False
        assert B.top is True

    def test_lattice(self):
        assert B.leq(False, True)
        assert not B.leq(True, False)
        assert B.glb(True, False) is False
        assert B.lub(True, False) is True

    def test_attenuation_is_conjunction(self):
        assert B.attenuate(True, True) is True
        assert B.attenuate(True, False) is False

    def test_coerce(self):
        assert B.coerce(1) is True
        assert B.coerce(True) is True
        with pytest.raises(QualificationDomainError):
            B.coerce(F(1, 2))


class TestUncertaintyDomain:

    def test_bounds(self):
        assert U.bottom == 0
        assert U.top == 1

    def test_order_and_bounds(self):
        assert U.leq(F(1, 2), F(3, 4))
        assert U.glb(F(1, 2), F(3, 4)) == F(1, 2)
        assert U.lub(F(1, 2), F(3, 4)) == F(3, 4)

    def test_attenuation_is_product(self):
        assert U.attenuate(F(3, 4), F(9, 10)) == F(27, 40)

    def test_values_outside_the_unit_interval_are_rejected(self):
        with pytest.raises(QualificationDomainError):
            U.leq(F(3, 2), F(1, 2))
        with pytest.raises(QualificationDomainError):
            U.coerce(F(3, 2))

    def test_floats_are_not_members(self):
        assert not U.contains(0.5)
        assert U.coerce(0.5) == F(1, 2)


class TestWeightDomain:

    def test_order_is_reversed(self):
        assert W.top == 0
        assert W.bottom is INF
        assert W.leq(F(5), F(3))
        assert not W.leq(F(3), F(5))
        assert W.leq(INF, F(0))

    def test_glb_is_numerical_max(self):
        assert W.glb(F(3), F(5)) == 5
        assert W.lub(F(3), F(5)) == 3
        assert W.glb(INF, F(2)) is INF
        assert W.lub(INF, F(2)) == 2

    def test_attenuation_is_addition(self):
        assert W.attenuate(F(3), F(2)) == 5
        assert W.attenuate(F(3), INF) is INF

    def test_negative_weights_are_rejected(self):
        with pytest.raises(QualificationDomainError):
            W.coerce(-1)


class TestProductDomain:
    UW = product(U, W)

    def test_name(self):
        assert self.UW.name == "U*W"
        assert product(U, product(W, B)).name == "U*(W*B)"
        assert product(U, W, B) == ProductDomain(ProductDomain(U, W), B)

    def test_strictness(self):
        assert not self.UW.contains((F(0), F(5)))
        assert not self.UW.contains((F(1, 2), INF))
        assert self.UW.contains((F(0), INF))
        assert self.UW.bottom == (F(0), INF)
        assert self.UW.top == (F(1), F(0))

    def test_componentwise_operations(self):
        assert self.UW.glb((F(9, 10), F(1)), (F(1, 2), F(3))) == (F(1, 2), F(3))
        assert self.UW.attenuate((F(3, 4), F(3)), (F(9, 10), F(1))) == (F(27, 40), F(4))
        assert self.UW.leq((F(11, 20), F(30)), (F(27, 40), F(4)))

    def test_glb_with_bottom_collapses(self):
        assert self.UW.glb(self.UW.bottom, (F(1, 2), F(3))) == self.UW.bottom

    def test_maxima_keeps_incomparable_values(self):
        values = [(F(9, 10), F(2)), (F(4, 5), F(1)), (F(1, 2), F(3))]
        assert self.UW.maxima(values) == ((F(9, 10), F(2)), (F(4, 5), F(1)))

    def test_coerce_nested_literal(self):
        assert self.UW.coerce((F(3, 5), F(5))) == (F(3, 5), F(5))
        with pytest.raises(QualificationDomainError):
            self.UW.coerce(F(1, 2))


class TestThresholds:

    def test_any_accepts_everything(self):
        assert U.threshold_ok(F(1, 100), ANY)
        assert W.threshold_ok(F(1000), ANY)

    def test_threshold_comparison(self):
        assert U.threshold_ok(F(4, 5), F(1, 2))
        assert not U.threshold_ok(F(2, 5), F(1, 2))

    def test_bottom_threshold_is_rejected(self):
        with pytest.raises(QualificationDomainError):
            U.check_threshold(F(0))
        assert U.check_threshold(ANY) is ANY

    def test_clause_bound(self):
        assert U.bound([F(1), F(9, 10)], F(9, 10), [F(4, 5)]) == F(18, 25)
        assert U.inf([]) == U.top
        assert W.sup([]) is INF


class TestFormatValue:

    @pytest.mark.parametrize("value, text", [
        (F(3, 5), "0.6"),
        (F(1, 3), "1/3"),
        (F(5), "5"),
        (INF, "inf"),
        (ANY, "?"),
        (True, "true"),
        ((F(3, 5), F(5)), "(0.6, 5)"),
    ])
    def test_literal_text(self, value, text):
        assert format_value(value) == text


def _value(rng: random.Random, qdom):
    if qdom == B:
        return rng.random() < 0.7
    if qdom == U:
        return F(rng.randint(0, 10), 10)
    if qdom == W:
        return INF if rng.random() < 0.1 else F(rng.randint(0, 12), rng.choice([1, 2]))
    if rng.random() < 0.1:
        return qdom.bottom
    while True:
        left, right = _value(rng, qdom.left), _value(rng, qdom.right)
        if left != qdom.left.bottom and right != qdom.right.bottom:
            return (left, right)


DOMAINS = [B, U, W, product(U, W), product(U, W, B)]


class TestLatticeLaws:
    """Randomised checks of the bounded-lattice and attenuation axioms."""

    @pytest.mark.parametrize("seed", range(200))
    def test_axioms(self, seed):
        rng = random.Random(seed)
        qdom = DOMAINS[seed % len(DOMAINS)]
        a, b, c = (_value(rng, qdom) for _ in range(3))

        assert qdom.glb(a, b) == qdom.glb(b, a)
        assert qdom.lub(a, b) == qdom.lub(b, a)
        assert qdom.leq(qdom.glb(a, b), a)
        assert qdom.leq(a, qdom.lub(a, b))
        assert qdom.glb(a, qdom.lub(a, b)) == a
        assert qdom.leq(qdom.bottom, a) and qdom.leq(a, qdom.top)

        assert qdom.attenuate(a, qdom.top) == a
        assert qdom.attenuate(a, b) == qdom.attenuate(b, a)
        assert qdom.leq(qdom.attenuate(a, b), a)
        assert qdom.attenuate(a, qdom.bottom) == qdom.bottom
        if qdom.leq(a, b):
            assert qdom.leq(qdom.attenuate(a, c), qdom.attenuate(b, c))

    @pytest.mark.parametrize("seed", range(200))
    def test_attenuation_distributes_over_infimum(self, seed):
        rng = random.Random(10_000 + seed)
        qdom = DOMAINS[seed % len(DOMAINS)]
        d = _value(rng, qdom)
        values = [_value(rng, qdom) for _ in range(rng.randint(1, 4))]
        assert qdom.attenuate(d, qdom.inf(values)) == qdom.inf(qdom.attenuate(d, v) for v in values)

    @pytest.mark.parametrize("seed", range(200))
    def test_maxima_is_an_antichain_covering_its_input(self, seed):
        rng = random.Random(20_000 + seed)
        qdom = DOMAINS[seed % len(DOMAINS)]
        values = [_value(rng, qdom) for _ in range(rng.randint(1, 6))]
        best = qdom.maxima(values)
        for x in best:
            assert not any(qdom.lt(x, y) for y in best)
        for value in values:
            assert any(qdom.leq(value, x) for x in best)
