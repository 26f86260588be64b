"""
Qualification domains: the lattice algebra that grades derived atoms.

Raw values are plain Python objects so they hash, compare and print cheaply:

* ``B``: ``bool`` (``False`` is bottom, ``True`` is top)
* ``U``: :class:`fractions.Fraction` in ``[0, 1]``
* ``W``: non-negative :class:`fractions.Fraction`, or :data:`INF` (the bottom)
* products: 2-tuples of component values

Every operation validates its arguments against the receiving domain and
raises :class:`QualificationDomainError` on mismatch.
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Any, Iterable, Sequence

from src.models.errors import QualificationDomainError
from src.utilities.helpers import format_rational, to_fraction

QualValue = Any


class _Infinity:
    """The distinguished infinite cost of the weight domain."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "inf"

    def __reduce__(self):
        return (_Infinity, ())


class _AnyThreshold:
    """The ``?`` threshold: satisfied by every qualification value."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "?"

    def __reduce__(self):
        return (_AnyThreshold, ())


INF = _Infinity()
ANY = _AnyThreshold()


class QualDomain(ABC):
    """Bounded lattice with an attenuation operation.

    Subclasses implement the unchecked ``_leq``, ``_glb``, ``_lub`` and
    ``_attenuate``; the public methods validate membership first.
    """

    @property
    @abstractmethod
    def name(self) -> str:
        ...

    @property
    @abstractmethod
    def bottom(self) -> QualValue:
        ...

    @property
    @abstractmethod
    def top(self) -> QualValue:
        ...

    @abstractmethod
    def contains(self, value: QualValue) -> bool:
        ...

    @abstractmethod
    def coerce(self, raw: Any) -> QualValue:
        """Turn a parsed literal into a member of this domain."""

    @abstractmethod
    def _leq(self, d: QualValue, e: QualValue) -> bool:
        ...

    @abstractmethod
    def _glb(self, d: QualValue, e: QualValue) -> QualValue:
        ...

    @abstractmethod
    def _lub(self, d: QualValue, e: QualValue) -> QualValue:
        ...

    @abstractmethod
    def _attenuate(self, d: QualValue, e: QualValue) -> QualValue:
        ...

    def check(self, value: QualValue) -> QualValue:
        if not self.contains(value):
            raise QualificationDomainError(
                f"{value!r} is not a qualification value of domain {self.name}")
        return value

    def is_bottom(self, value: QualValue) -> bool:
        return self.check(value) == self.bottom

    def leq(self, d: QualValue, e: QualValue) -> bool:
        self.check(d)
        self.check(e)
        if d == self.bottom or e == self.top:
            return True
        return self._leq(d, e)

    def lt(self, d: QualValue, e: QualValue) -> bool:
        return d != e and self.leq(d, e)

    def glb(self, d: QualValue, e: QualValue) -> QualValue:
        self.check(d)
        self.check(e)
        return self._glb(d, e)

    def lub(self, d: QualValue, e: QualValue) -> QualValue:
        self.check(d)
        self.check(e)
        return self._lub(d, e)

    def attenuate(self, d: QualValue, e: QualValue) -> QualValue:
        self.check(d)
        self.check(e)
        return self._attenuate(d, e)

    def inf(self, values: Iterable[QualValue]) -> QualValue:
        """Greatest lower bound of a finite set; top for the empty set."""
        return reduce(self.glb, values, self.top)

    def sup(self, values: Iterable[QualValue]) -> QualValue:
        """Least upper bound of a finite set; bottom for the empty set."""
        return reduce(self.lub, values, self.bottom)

    def threshold_ok(self, value: QualValue, threshold: Any) -> bool:
        """``value ⊒? threshold``: identically true for :data:`ANY`."""
        if threshold is ANY:
            self.check(value)
            return True
        return self.leq(threshold, value)

    def check_threshold(self, threshold: Any) -> Any:
        if threshold is ANY:
            return threshold
        if self.is_bottom(threshold):
            raise QualificationDomainError(f"threshold of domain {self.name} must lie above bottom")
        return threshold

    def bound(self, head_degrees: Sequence[QualValue], attenuation: QualValue,
              body_degrees: Sequence[QualValue]) -> QualValue:
        """Upper bound of a clause conclusion: ``⊓ dᵢ ⊓ α ∘ ⊓ eⱼ``."""
        return self.glb(self.inf(head_degrees), self.attenuate(attenuation, self.inf(body_degrees)))

    def maxima(self, values: Iterable[QualValue]) -> tuple:
        """The antichain of maximal elements, in first-seen order."""
        result: list = []
        for value in values:
            if any(self.leq(value, kept) for kept in result):
                continue
            result = [kept for kept in result if not self.leq(kept, value)]
            result.append(value)
        return tuple(result)

    @property
    def leaves(self) -> tuple:
        return (self,)

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class BooleanDomain(QualDomain):
    """Classical truth values: the qualification domain of plain logic programming."""

    @property
    def name(self) -> str:
        return "B"

    @property
    def bottom(self) -> bool:
        return False

    @property
    def top(self) -> bool:
        return True

    def contains(self, value: QualValue) -> bool:
        return isinstance(value, bool)

    def coerce(self, raw: Any) -> bool:
        if isinstance(raw, bool):
            return raw
        if isinstance(raw, (int, Fraction)) and raw in (0, 1):
            return bool(raw)
        raise QualificationDomainError(f"{raw!r} is not a value of domain B")

    def _leq(self, d, e):
        return (not d) or e

    def _glb(self, d, e):
        return d and e

    def _lub(self, d, e):
        return d or e

    def _attenuate(self, d, e):
        return d and e


@dataclass(frozen=True)
class UncertaintyDomain(QualDomain):
    """Certainty degrees in ``[0, 1]``; attenuation is multiplication."""

    @property
    def name(self) -> str:
        return "U"

    @property
    def bottom(self) -> Fraction:
        return Fraction(0)

    @property
    def top(self) -> Fraction:
        return Fraction(1)

    def contains(self, value: QualValue) -> bool:
        return isinstance(value, Fraction) and 0 <= value <= 1

    def coerce(self, raw: Any) -> Fraction:
        try:
            value = to_fraction(raw)
        except (TypeError, ValueError) as exc:
            raise QualificationDomainError(f"{raw!r} is not a value of domain U") from exc
        return self.check(value)

    def _leq(self, d, e):
        return d <= e

    def _glb(self, d, e):
        return min(d, e)

    def _lub(self, d, e):
        return max(d, e)

    def _attenuate(self, d, e):
        return d * e


@dataclass(frozen=True)
class WeightDomain(QualDomain):
    """Proof costs: non-negative rationals ordered in reverse, attenuation is addition.

    Zero is the top and :data:`INF` the bottom, so glb is numerical max.
    """

    @property
    def name(self) -> str:
        return "W"

    @property
    def bottom(self):
        return INF

    @property
    def top(self) -> Fraction:
        return Fraction(0)

    def contains(self, value: QualValue) -> bool:
        return value is INF or (isinstance(value, Fraction) and value >= 0)

    def coerce(self, raw: Any):
        if raw is INF:
            return INF
        try:
            value = to_fraction(raw)
        except (TypeError, ValueError) as exc:
            raise QualificationDomainError(f"{raw!r} is not a value of domain W") from exc
        return self.check(value)

    def _leq(self, d, e):
        if e is INF:
            return d is INF
        return d is INF or d >= e

    def _glb(self, d, e):
        if d is INF or e is INF:
            return INF
        return max(d, e)

    def _lub(self, d, e):
        if d is INF:
            return e
        if e is INF:
            return d
        return min(d, e)

    def _attenuate(self, d, e):
        if d is INF or e is INF:
            return INF
        return d + e


@dataclass(frozen=True)
class ProductDomain(QualDomain):
    """Strict cartesian product: pairs with no bottom component, plus the bottom pair."""

    left: QualDomain
    right: QualDomain

    @property
    def name(self) -> str:
        right = self.right.name
        if isinstance(self.right, ProductDomain):
            right = f"({right})"
        return f"{self.left.name}*{right}"

    @property
    def bottom(self) -> tuple:
        return (self.left.bottom, self.right.bottom)

    @property
    def top(self) -> tuple:
        return (self.left.top, self.right.top)

    def contains(self, value: QualValue) -> bool:
        if not (isinstance(value, tuple) and len(value) == 2):
            return False
        first, second = value
        if not (self.left.contains(first) and self.right.contains(second)):
            return False
        return (first == self.left.bottom) == (second == self.right.bottom)

    def coerce(self, raw: Any) -> tuple:
        if not (isinstance(raw, (tuple, list)) and len(raw) == 2):
            raise QualificationDomainError(f"{raw!r} is not a value of domain {self.name}")
        return self.check((self.left.coerce(raw[0]), self.right.coerce(raw[1])))

    def _collapse(self, first, second) -> tuple:
        if first == self.left.bottom or second == self.right.bottom:
            return self.bottom
        return (first, second)

    def _leq(self, d, e):
        return self.left.leq(d[0], e[0]) and self.right.leq(d[1], e[1])

    def _glb(self, d, e):
        return self._collapse(self.left.glb(d[0], e[0]), self.right.glb(d[1], e[1]))

    def _lub(self, d, e):
        return (self.left.lub(d[0], e[0]), self.right.lub(d[1], e[1]))

    def _attenuate(self, d, e):
        return self._collapse(self.left.attenuate(d[0], e[0]), self.right.attenuate(d[1], e[1]))

    @property
    def leaves(self) -> tuple:
        return self.left.leaves + self.right.leaves


B = BooleanDomain()
U = UncertaintyDomain()
W = WeightDomain()

BASIC_DOMAINS = {"B": B, "U": U, "W": W}


def product(*domains: QualDomain) -> QualDomain:
    """Left-nested strict product, ``product(U, W, B) == (U*W)*B``."""
    if not domains:
        raise QualificationDomainError("a product needs at least one domain")
    return reduce(ProductDomain, domains)


def format_value(value: Any) -> str:
    """Canonical literal text of a qualification or threshold value."""
    if value is ANY:
        return "?"
    if value is INF:
        return "inf"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, tuple):
        return "(" + ", ".join(format_value(part) for part in value) + ")"
    return format_rational(value)
