"""
Expressing a qualification domain in a constraint domain.

An :class:`Embedding` maps the non-bottom values of a qualification domain
injectively onto ground terms of ``R`` and generates the two constraint
families that characterise it: ``qVal(X)`` (``X`` is the image of some
value) and ``qBound(X, Y, Z)`` (the value of ``X`` is below the attenuation
of the value of ``Y`` by the value of ``Z``).

Encodings:

* ``B``: the single non-bottom value ``true`` maps to ``1``
* ``U``: identity on ``(0, 1]``
* ``W``: identity on the non-negative rationals (``inf`` is bottom and has no image)
* products: ``pair(x, y)`` of the component images
"""

from itertools import count
from typing import Any, Callable, Iterator

from src.core.constraints import ConstraintDomain
from src.models.errors import EmbeddingError
from src.models.qualification import (
    BooleanDomain,
    ProductDomain,
    QualDomain,
    UncertaintyDomain,
    WeightDomain,
    format_value,
)
from src.models.syntax import Apply, Basic, ConstraintSet, Equation, PrimitiveAtom, Term, Var

PAIR = "pair"

ONE = Basic(1)
ZERO = Basic(0)


def expressible(qdom: QualDomain, cdom: ConstraintDomain) -> bool:
    """Booleans are expressible anywhere; the numeric domains need arithmetic."""
    return all(isinstance(leaf, BooleanDomain) for leaf in qdom.leaves) or cdom.has_arithmetic


class Embedding:
    """Embedding of ``qdom`` into the real constraint domain."""

    def __init__(self, qdom: QualDomain):
        self.qdom = qdom

    def __repr__(self) -> str:
        return f"Embedding({self.qdom})"

    def encode_value(self, value: Any) -> Term:
        self.qdom.check(value)
        if value == self.qdom.bottom:
            raise EmbeddingError(f"bottom value {format_value(value)} of {self.qdom} has no encoding")
        return self._encode(self.qdom, value)

    def _encode(self, qdom: QualDomain, value: Any) -> Term:
        if isinstance(qdom, ProductDomain):
            return Apply(PAIR, (self._encode(qdom.left, value[0]), self._encode(qdom.right, value[1])))
        if isinstance(qdom, BooleanDomain):
            return ONE
        return Basic(value)

    def decode(self, term: Term) -> Any:
        """Partial inverse of :meth:`encode_value`."""
        return self._decode(self.qdom, term)

    def _decode(self, qdom: QualDomain, term: Term) -> Any:
        if isinstance(qdom, ProductDomain):
            if not (isinstance(term, Apply) and term.name == PAIR and len(term.args) == 2):
                raise EmbeddingError(f"{term} is not an encoding of a {qdom} value")
            return (self._decode(qdom.left, term.args[0]), self._decode(qdom.right, term.args[1]))
        if not isinstance(term, Basic):
            raise EmbeddingError(f"{term} is not an encoding of a {qdom} value")
        if isinstance(qdom, BooleanDomain):
            if term != ONE:
                raise EmbeddingError(f"{term} is not an encoding of a B value")
            return True
        if not qdom.contains(term.value) or term.value == qdom.bottom:
            raise EmbeddingError(f"{term} is not an encoding of a {qdom} value")
        return term.value

    def qval_constraint(self, x: Var, prefix: str = "_Q") -> ConstraintSet:
        """Constraints satisfied exactly when ``x`` is bound to an encoding."""
        fresh = _fresh_names(prefix)
        return ConstraintSet(self._qval(self.qdom, x, fresh))

    def _qval(self, qdom: QualDomain, x: Term, fresh: Callable[[], Var]) -> Iterator:
        if isinstance(qdom, ProductDomain):
            first, second = fresh(), fresh()
            yield Equation(x, Apply(PAIR, (first, second)))
            yield from self._qval(qdom.left, first, fresh)
            yield from self._qval(qdom.right, second, fresh)
        elif isinstance(qdom, BooleanDomain):
            yield Equation(x, ONE)
        elif isinstance(qdom, UncertaintyDomain):
            yield PrimitiveAtom("cp_<", (ZERO, x))
            yield PrimitiveAtom("cp_<=", (x, ONE))
        elif isinstance(qdom, WeightDomain):
            yield PrimitiveAtom("cp_<=", (ZERO, x))
        else:
            raise EmbeddingError(f"no embedding for qualification domain {qdom}")

    def qbound_constraint(self, x: Var, y: Var, z: Var, prefix: str = "_Q") -> ConstraintSet:
        """Constraints encoding ``x ⊑ y ∘ z`` over encoded values."""
        fresh = _fresh_names(prefix)
        return ConstraintSet(self._qbound(self.qdom, x, y, z, fresh))

    def _qbound(self, qdom: QualDomain, x: Term, y: Term, z: Term, fresh: Callable[[], Var]) -> Iterator:
        if isinstance(qdom, ProductDomain):
            xs, ys, zs = (fresh(), fresh()), (fresh(), fresh()), (fresh(), fresh())
            for whole, parts in ((x, xs), (y, ys), (z, zs)):
                yield Equation(whole, Apply(PAIR, parts))
            yield from self._qbound(qdom.left, xs[0], ys[0], zs[0], fresh)
            yield from self._qbound(qdom.right, xs[1], ys[1], zs[1], fresh)
        elif isinstance(qdom, BooleanDomain):
            for term in (x, y, z):
                yield Equation(term, ONE)
        elif isinstance(qdom, UncertaintyDomain):
            product = fresh()
            yield PrimitiveAtom("op_*", (y, z, product))
            yield PrimitiveAtom("cp_<=", (x, product))
        elif isinstance(qdom, WeightDomain):
            total = fresh()
            yield PrimitiveAtom("op_+", (y, z, total))
            yield PrimitiveAtom("cp_>=", (x, total))
        else:
            raise EmbeddingError(f"no embedding for qualification domain {qdom}")


def _fresh_names(prefix: str) -> Callable[[], Var]:
    counter = count(1)
    return lambda: Var(f"{prefix}_{next(counter)}")
