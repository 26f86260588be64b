"""
Constraint domains: satisfiability, entailment and solved forms.

Two domains are provided. ``H`` (Herbrand) has no primitive predicates and
decides equations by unification with occurs check. ``R`` adds the linear
real primitives ``op_+``, ``op_*``, ``cp_>``, ``cp_>=``, ``cp_<`` and ``cp_<=``
over exact rationals.

Normalisation of a constraint set runs in four stages:

1. Herbrand unification of the equations (variable pairs bind the larger
   name to the smaller one).
2. Linearisation of the primitives into sympy expressions; ``op_*`` is linear
   only once one factor is a known constant.
3. Gaussian elimination of the linear equalities, solving each for its
   greatest-named symbol, retrying pending products as constants appear.
4. Fourier-Motzkin elimination over the remaining inequalities.

Results are three-valued: ``True``/``False`` are exact, ``None`` means the
set left a nonlinear product unresolved.
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple

import sympy

from src.models.errors import ConstraintError, UnsatisfiableError
from src.models.syntax import (
    Apply,
    Atom,
    Basic,
    ConstraintSet,
    Equation,
    PrimitiveAtom,
    Substitution,
    Term,
    Var,
)
from src.utilities.logger import AppLogger

logger = AppLogger()

# (expr, strict) stands for ``expr > 0`` when strict, ``expr >= 0`` otherwise.
Row = Tuple[sympy.Expr, bool]

REAL_PRIMITIVES = (
    ("op_+", 3),
    ("op_*", 3),
    ("cp_>", 2),
    ("cp_>=", 2),
    ("cp_<", 2),
    ("cp_<=", 2),
)


def conjoin(verdicts: Iterable[Optional[bool]]) -> Optional[bool]:
    """Three-valued conjunction: False wins, then unknown."""
    unknown = False
    for verdict in verdicts:
        if verdict is False:
            return False
        if verdict is None:
            unknown = True
    return None if unknown else True


@dataclass(frozen=True)
class SolvedForm:
    """Canonical substitution plus the primitives left after applying it."""

    subst: Substitution
    residual: ConstraintSet


@dataclass(frozen=True, eq=False)
class NormalForm:
    """Everything normalisation learned about one constraint set."""

    status: Optional[bool]
    subst: Substitution = Substitution()
    residual: ConstraintSet = ConstraintSet()
    numeric: FrozenSet[str] = frozenset()
    solution: Tuple[Tuple[sympy.Symbol, sympy.Expr], ...] = ()
    rows: Tuple[Row, ...] = ()
    classes: Tuple[Tuple[str, Tuple[str, ...]], ...] = ()
    nonlinear: bool = False

    @property
    def satisfiable(self) -> Optional[bool]:
        return self.status

    def numeric_expr(self, term: Term) -> Optional[sympy.Expr]:
        """Linear expression of a normalised basic value or numeric variable."""
        if isinstance(term, Basic):
            return _rational(term.value)
        if isinstance(term, Var) and term.name in self.numeric:
            symbol = sympy.Symbol(term.name)
            return dict(self.solution).get(symbol, symbol)
        return None

    @cached_property
    def aliases(self) -> Dict[Term, Tuple[str, ...]]:
        """Normalised term -> the variables the constraint set forces equal to it."""
        found: Dict[Term, List[str]] = {Var(rep): list(names) for rep, names in self.classes}
        for name, image in self.subst.items():
            if not isinstance(image, Var):
                found.setdefault(image, []).append(name)
        return {term: tuple(sorted(names)) for term, names in found.items()}

    def weaken(self, verdict: Optional[bool]) -> Optional[bool]:
        if verdict is False and self.nonlinear:
            return None
        return verdict

    def always_zero(self, expr: sympy.Expr) -> Optional[bool]:
        """Does ``expr == 0`` hold in every solution?"""
        expr = sympy.expand(expr.xreplace(dict(self.solution)))
        if expr == 0:
            return True
        if expr.is_number:
            return self.weaken(False)
        if _feasible(self.rows + ((expr, True),)) or _feasible(self.rows + ((-expr, True),)):
            return self.weaken(False)
        return True


_UNSAT = NormalForm(status=False)


def _rational(value: Fraction) -> sympy.Rational:
    return sympy.Rational(value.numerator, value.denominator)


def _to_fraction(expr: sympy.Expr) -> Fraction:
    return Fraction(int(expr.p), int(expr.q))


def _occurs(name: str, term: Term, bindings: Mapping[str, Term]) -> bool:
    term = _walk(term, bindings)
    if isinstance(term, Var):
        return term.name == name
    if isinstance(term, Apply):
        return any(_occurs(name, arg, bindings) for arg in term.args)
    return False


def _walk(term: Term, bindings: Mapping[str, Term]) -> Term:
    while isinstance(term, Var) and term.name in bindings:
        term = bindings[term.name]
    return term


def _resolve(term: Term, bindings: Mapping[str, Term]) -> Term:
    term = _walk(term, bindings)
    if isinstance(term, Apply) and term.args:
        return Apply(term.name, tuple(_resolve(arg, bindings) for arg in term.args))
    return term


def unify(equations: Iterable[Tuple[Term, Term]]) -> Optional[Substitution]:
    """Most general unifier with occurs check, or None if there is none."""
    bindings: Dict[str, Term] = {}
    stack = list(equations)
    while stack:
        lhs, rhs = stack.pop()
        lhs, rhs = _walk(lhs, bindings), _walk(rhs, bindings)
        if lhs == rhs:
            continue
        if isinstance(lhs, Var) and isinstance(rhs, Var):
            small, large = sorted((lhs, rhs), key=lambda v: v.name)
            bindings[large.name] = small
        elif isinstance(lhs, Var) or isinstance(rhs, Var):
            var, term = (lhs, rhs) if isinstance(lhs, Var) else (rhs, lhs)
            if _occurs(var.name, term, bindings):
                return None
            bindings[var.name] = term
        elif (isinstance(lhs, Apply) and isinstance(rhs, Apply)
              and lhs.name == rhs.name and len(lhs.args) == len(rhs.args)):
            stack.extend(zip(lhs.args, rhs.args))
        else:
            return None
    return Substitution({name: _resolve(Var(name), bindings) for name in bindings})


def _linearize(atoms: Sequence[PrimitiveAtom]):
    equations: List[sympy.Expr] = []
    rows: List[Row] = []
    products: List[Tuple[sympy.Expr, sympy.Expr, sympy.Expr]] = []
    for atom in atoms:
        if any(isinstance(arg, Apply) for arg in atom.args):
            return None
        x = [_rational(a.value) if isinstance(a, Basic) else sympy.Symbol(a.name) for a in atom.args]
        if atom.pred == "op_+":
            equations.append(x[0] + x[1] - x[2])
        elif atom.pred == "op_*":
            if x[0].is_number or x[1].is_number:
                equations.append(x[0] * x[1] - x[2])
            else:
                products.append((x[0], x[1], x[2]))
        elif atom.pred == "cp_>":
            rows.append((x[0] - x[1], True))
        elif atom.pred == "cp_>=":
            rows.append((x[0] - x[1], False))
        elif atom.pred == "cp_<":
            rows.append((x[1] - x[0], True))
        else:
            rows.append((x[1] - x[0], False))
    return equations, rows, products


def _eliminate(equations, products):
    """Gaussian elimination; returns (solution or None if inconsistent, pending products)."""
    solution: Dict[sympy.Symbol, sympy.Expr] = {}
    queue = list(equations)
    pending = list(products)
    while True:
        while queue:
            expr = sympy.expand(queue.pop(0).xreplace(solution))
            if expr.is_number:
                if expr != 0:
                    return None, pending
                continue
            pivot = max(expr.free_symbols, key=lambda s: s.name)
            value = sympy.expand(pivot - expr / expr.coeff(pivot))
            solution = {s: sympy.expand(v.xreplace({pivot: value})) for s, v in solution.items()}
            solution[pivot] = value
        progressed = False
        waiting = []
        for factors in pending:
            a, b, c = (sympy.expand(f.xreplace(solution)) for f in factors)
            if a.is_number or b.is_number:
                queue.append(a * b - c)
                progressed = True
            else:
                waiting.append((a, b, c))
        pending = waiting
        if not progressed:
            return solution, pending


def _split_bounds(rows: Sequence[Row], pivot: sympy.Symbol):
    lower, upper, rest = [], [], []
    for expr, strict in rows:
        coeff = expr.coeff(pivot)
        if coeff == 0:
            rest.append((expr, strict))
            continue
        bound = (pivot * coeff - expr) / coeff
        if coeff > 0:
            lower.append((bound, strict))
        else:
            upper.append((bound, strict))
    return lower, upper, rest


def _feasible(rows: Iterable[Row]) -> bool:
    """Fourier-Motzkin: does the conjunction of rows have a rational solution?"""
    rows = list(rows)
    while True:
        open_rows = []
        for expr, strict in rows:
            expr = sympy.expand(expr)
            if expr.is_number:
                if expr < 0 or (strict and expr == 0):
                    return False
            else:
                open_rows.append((expr, strict))
        if not open_rows:
            return True
        pivot = min(set().union(*(e.free_symbols for e, _ in open_rows)), key=lambda s: s.name)
        lower, upper, rest = _split_bounds(open_rows, pivot)
        rows = rest + [(high - low, s1 or s2) for low, s1 in lower for high, s2 in upper]


@lru_cache(maxsize=8192)
def _normalize(constraints: ConstraintSet) -> NormalForm:
    herbrand = unify((eq.lhs, eq.rhs) for eq in constraints.equations)
    if herbrand is None:
        return _UNSAT
    primitives = [atom.substitute(herbrand) for atom in constraints.primitives]
    linear = _linearize(primitives)
    if linear is None:
        return _UNSAT
    equations, rows, products = linear
    solution, pending = _eliminate(equations, products)
    if solution is None:
        return _UNSAT
    rows = tuple((sympy.expand(e.xreplace(solution)), s) for e, s in rows)
    if not _feasible(rows):
        return _UNSAT

    numeric = frozenset().union(*(atom.variables() for atom in primitives))
    groups: Dict[sympy.Expr, List[str]] = {}
    for name in sorted(numeric):
        symbol = sympy.Symbol(name)
        groups.setdefault(solution.get(symbol, symbol), []).append(name)
    bindings: Dict[str, Term] = {}
    for expr, names in groups.items():
        if expr.is_number:
            bindings.update({name: Basic(_to_fraction(expr)) for name in names})
        else:
            bindings.update({name: Var(names[0]) for name in names[1:]})
    subst = herbrand.compose(Substitution(bindings))

    members: Dict[str, List[str]] = {}
    for name in sorted(constraints.variables()):
        image = subst.get(name, Var(name))
        if isinstance(image, Var):
            members.setdefault(image.name, []).append(name)

    residual = ConstraintSet(
        atom for atom in (p.substitute(subst) for p in primitives) if not atom.is_ground)
    return NormalForm(
        status=None if pending else True,
        subst=subst,
        residual=residual,
        numeric=numeric,
        solution=tuple(solution.items()),
        rows=rows,
        classes=tuple((rep, tuple(names)) for rep, names in members.items()),
        nonlinear=bool(pending),
    )


def _negate(atom: PrimitiveAtom, x: Sequence[sympy.Expr]) -> Row:
    """Row stating that the comparison ``atom`` fails."""
    if atom.pred == "cp_>":
        return (x[1] - x[0], False)
    if atom.pred == "cp_>=":
        return (x[1] - x[0], True)
    if atom.pred == "cp_<":
        return (x[0] - x[1], False)
    return (x[0] - x[1], True)


def _entails_equation(nf: NormalForm, lhs: Term, rhs: Term) -> Optional[bool]:
    unknown = False
    stack = [(lhs, rhs)]
    while stack:
        a, b = stack.pop()
        if a == b:
            continue
        if isinstance(a, Apply) and isinstance(b, Apply):
            if a.name != b.name or len(a.args) != len(b.args):
                return nf.weaken(False)
            stack.extend(zip(a.args, b.args))
            continue
        ea, eb = nf.numeric_expr(a), nf.numeric_expr(b)
        if ea is None or eb is None:
            return nf.weaken(False)
        verdict = nf.always_zero(ea - eb)
        if verdict is False:
            return False
        unknown = unknown or verdict is None
    return None if unknown else True


def _entails_primitive(nf: NormalForm, atom: PrimitiveAtom) -> Optional[bool]:
    if any(isinstance(arg, Apply) for arg in atom.args):
        return nf.weaken(False)
    x = [nf.numeric_expr(arg) for arg in atom.args]
    if any(e is None for e in x):
        return nf.weaken(False)
    if atom.pred == "op_+":
        return nf.always_zero(x[0] + x[1] - x[2])
    if atom.pred == "op_*":
        if x[0].is_number or x[1].is_number:
            return nf.always_zero(sympy.expand(x[0] * x[1] - x[2]))
        if atom in nf.residual:
            return True
        return None
    if _feasible(nf.rows + (_negate(atom, x),)):
        return nf.weaken(False)
    return True


@lru_cache(maxsize=65536)
def _entails(constraints: ConstraintSet, atom: Atom) -> Optional[bool]:
    nf = _normalize(constraints)
    if nf.status is False:
        return True
    atom = atom.substitute(nf.subst)
    if isinstance(atom, Equation):
        return _entails_equation(nf, atom.lhs, atom.rhs)
    return _entails_primitive(nf, atom)


@dataclass(frozen=True)
class ConstraintDomain:
    """A constraint domain descriptor: its name and primitive signature."""

    name: str
    primitives: Tuple[Tuple[str, int], ...] = ()

    def __str__(self) -> str:
        return self.name

    @property
    def signature(self) -> Dict[str, int]:
        return dict(self.primitives)

    def validate(self, atom: Atom) -> Atom:
        if isinstance(atom, Equation):
            return atom
        if not isinstance(atom, PrimitiveAtom):
            raise ConstraintError(f"{atom} is not an atomic constraint")
        arity = self.signature.get(atom.pred)
        if arity is None:
            raise ConstraintError(f"primitive {atom.pred} is not available in domain {self.name}")
        if arity != len(atom.args):
            raise ConstraintError(f"primitive {atom.pred} expects {arity} arguments, got {len(atom.args)}")
        return atom

    def normalize(self, constraints: ConstraintSet) -> NormalForm:
        for atom in constraints:
            self.validate(atom)
        return _normalize(constraints)

    def satisfiable(self, constraints: ConstraintSet) -> Optional[bool]:
        return self.normalize(constraints).status

    def solved_form(self, constraints: ConstraintSet) -> SolvedForm:
        nf = self.normalize(constraints)
        if nf.status is False:
            raise UnsatisfiableError(f"constraint set {constraints} is unsatisfiable")
        return SolvedForm(nf.subst, nf.residual)

    def entails(self, constraints: ConstraintSet, atom: Atom) -> Optional[bool]:
        """``Π ⊨ π``; sound in both directions, None outside the linear fragment."""
        self.normalize(constraints)
        self.validate(atom)
        verdict = _entails(constraints, atom)
        if logger.is_debug():
            logger.debug("Entailment checked",
                         extra_context={"constraints": str(constraints), "atom": str(atom), "verdict": verdict})
        return verdict

    def entails_all(self, constraints: ConstraintSet, atoms: Iterable[Atom]) -> Optional[bool]:
        return conjoin(self.entails(constraints, atom) for atom in atoms)

    def check_primitive(self, constraints: ConstraintSet, atom: PrimitiveAtom) -> Optional[bool]:
        if not isinstance(atom, PrimitiveAtom):
            raise ConstraintError(f"{atom} is not a primitive atom")
        return self.entails(constraints, atom)

    @property
    def has_arithmetic(self) -> bool:
        return bool(self.primitives)


HERBRAND = ConstraintDomain("H")
REAL = ConstraintDomain("R", REAL_PRIMITIVES)

DOMAINS = {"H": HERBRAND, "R": REAL}
