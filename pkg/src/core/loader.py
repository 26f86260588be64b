"""
Turning parsed source into admissible programs and solvable goals.
"""

import time
from typing import Any, Dict, FrozenSet, List, Optional, Set, Tuple, Union

from src.core.constraints import DOMAINS, ConstraintDomain
from src.core.parser import ProximityDecl, SourceProgram, SymbolRef, parse_program
from src.core.proximity import ProximityTable, admissible
from src.core.solver import Goal, GoalItem
from src.models.constants import DEFAULT_CDOM, DEFAULT_QDOM
from src.models.errors import (
    ConstraintError,
    Diagnostic,
    ProgramError,
    QualificationDomainError,
    SqclpError,
)
from src.models.presets import Preset, get_preset, preset_problems
from src.models.qualification import ANY, BASIC_DOMAINS, QualDomain
from src.models.syntax import (
    BodyItem,
    Clause,
    ConstraintSet,
    PrimitiveAtom,
    Program,
    Symbol,
    SymbolKind,
)
from src.utilities.logger import AppLogger

logger = AppLogger()


def _candidates(ref: SymbolRef, signature: Dict[str, Set[Symbol]]) -> List[Symbol]:
    if ref.kind is not None:
        return [Symbol(ref.name, ref.kind, ref.arity or 0)]
    known = [s for s in signature.get(ref.name, ()) if ref.arity is None or s.arity == ref.arity]
    return sorted(known, key=lambda s: (s.kind.value, s.arity))


def _resolve_pair(decl: ProximityDecl, signature: Dict[str, Set[Symbol]],
                  cdom: ConstraintDomain) -> Tuple[Symbol, Symbol]:
    """Symbols of a declaration; kinds come from the program, then from the partner."""
    left, right = _candidates(decl.left, signature), _candidates(decl.right, signature)

    def pick(own: List[Symbol], other: List[Symbol], ref: SymbolRef) -> Symbol:
        if len(own) == 1:
            symbol = own[0]
            if symbol.kind is SymbolKind.PRIMITIVE and ref.arity is None:
                symbol = Symbol(symbol.name, symbol.kind, cdom.signature.get(symbol.name, 0))
            return symbol
        if len(other) == 1:
            partner = other[0]
            matching = [s for s in own if s.kind is partner.kind and s.arity == partner.arity]
            if matching:
                return matching[0]
            if not own:
                arity = partner.arity if ref.arity is None else ref.arity
                return Symbol(ref.name, partner.kind, arity)
        if own:
            raise QualificationDomainError(f"symbol {ref} is ambiguous; write its arity as {ref.name}/N")
        return Symbol(ref.name, SymbolKind.CONSTRUCTOR, ref.arity or 0)

    return pick(left, right, decl.left), pick(right, left, decl.right)


def _signature(clauses: List[Clause]) -> Dict[str, Set[Symbol]]:
    table: Dict[str, Set[Symbol]] = {}
    for clause in clauses:
        for symbol in clause.symbols():
            if symbol.kind is not SymbolKind.VARIABLE:
                table.setdefault(symbol.name, set()).add(symbol)
    return table


def _scheme(source: SourceProgram, preset: Optional[Preset]) -> Tuple[QualDomain, str]:
    qdom_directive = source.directive("qdom")
    cdom_directive = source.directive("cdom")
    if qdom_directive is not None:
        qdom = qdom_directive.value
    elif preset is not None and preset.qdom is not None:
        qdom = preset.qdom
    else:
        qdom = BASIC_DOMAINS[DEFAULT_QDOM]
    if cdom_directive is not None:
        cdom = cdom_directive.value
    elif preset is not None and preset.cdom is not None:
        cdom = preset.cdom
    else:
        cdom = DEFAULT_CDOM
    return qdom, cdom


def load_program(source: Union[str, SourceProgram], preset: Optional[str] = None) -> Program:
    """Check a parsed program against its scheme and build it.

    ``preset`` overrides a ``#preset`` directive. Raises :class:`ProgramError`
    carrying every diagnostic found.
    """
    started = time.perf_counter()
    if isinstance(source, str):
        source = parse_program(source)
    diagnostics: List[Diagnostic] = []

    preset_name = preset
    if preset_name is None and source.directive("preset") is not None:
        preset_name = source.directive("preset").value
    chosen: Optional[Preset] = None
    if preset_name is not None:
        try:
            chosen = get_preset(preset_name)
        except KeyError as exc:
            line = source.directive("preset").line if source.directive("preset") else None
            raise ProgramError("unknown preset", [Diagnostic("preset", str(exc.args[0]), line)]) from None

    qdom, cdom_name = _scheme(source, chosen)
    cdom = DOMAINS[cdom_name]

    clauses: List[Clause] = []
    explicit_lines: List[Optional[int]] = []
    for sc in source.clauses:
        attenuation = qdom.top
        if sc.attenuation is not None:
            explicit_lines.append(sc.line)
            try:
                attenuation = qdom.coerce(sc.attenuation)
            except QualificationDomainError as exc:
                diagnostics.append(Diagnostic("attenuation-domain", str(exc), sc.line))
                continue
            if attenuation == qdom.bottom:
                diagnostics.append(Diagnostic("attenuation-bottom", "attenuation factor must lie above bottom",
                                              sc.line))
                continue
        body = []
        for item in sc.body:
            threshold = ANY
            if item.threshold is not ANY:
                explicit_lines.append(sc.line)
                try:
                    threshold = qdom.check_threshold(qdom.coerce(item.threshold))
                except QualificationDomainError as exc:
                    diagnostics.append(Diagnostic("threshold-domain", str(exc), sc.line))
            if isinstance(item.atom, PrimitiveAtom):
                try:
                    cdom.validate(item.atom)
                except ConstraintError as exc:
                    diagnostics.append(Diagnostic("primitive", str(exc), sc.line))
            body.append(BodyItem(item.atom, threshold))
        clauses.append(Clause(sc.head, attenuation, tuple(body), sc.line))

    signature = _signature(clauses)
    entries: Dict[Tuple[Symbol, Symbol], Any] = {}
    locations: Dict[FrozenSet[Symbol], Optional[int]] = {}
    for decl in source.proximity:
        try:
            x, y = _resolve_pair(decl, signature, cdom)
            value = qdom.coerce(decl.value)
        except QualificationDomainError as exc:
            diagnostics.append(Diagnostic("prox-value", str(exc), decl.line))
            continue
        key = frozenset((x, y))
        if key in locations and entries.get((x, y), entries.get((y, x))) != value:
            diagnostics.append(Diagnostic("prox-conflict", f"~({x}, {y}) is declared twice with "
                                                           f"different values", decl.line))
            continue
        entries[(x, y)] = value
        locations[key] = decl.line
    table = ProximityTable(qdom, entries)
    diagnostics.extend(admissible(table, qdom, cdom, locations).diagnostics)

    if chosen is not None:
        diagnostics.extend(preset_problems(chosen, qdom, cdom_name,
                                           [d.line for d in source.proximity], explicit_lines))

    if diagnostics:
        logger.warning("Program rejected", extra_context={"problems": [str(d) for d in diagnostics]})
        raise ProgramError("program is not admissible", diagnostics)
    program = Program(tuple(clauses), table, qdom, cdom)
    logger.performance("load_program", (time.perf_counter() - started) * 1000,
                       {"clauses": len(clauses), "proximity": len(entries), "qdom": str(qdom), "cdom": cdom_name})
    return program


def load_file(path: str, preset: Optional[str] = None) -> Program:
    with open(path, "r", encoding="utf-8") as f:
        text = f.read()
    try:
        return load_program(text, preset)
    except SqclpError:
        logger.info("Could not load program file", extra_context={"path": path})
        raise


def prepare_constraints(program: Program, constraints: ConstraintSet) -> ConstraintSet:
    """Validate goal constraints against the program's constraint domain."""
    for atom in constraints:
        program.cdom.validate(atom)
    return constraints


def prepare_goal(program: Program, goal: Goal) -> Goal:
    """Interpret the thresholds of a parsed goal in the program's qualification domain."""
    qdom = program.qdom
    items = []
    for item in goal.items:
        threshold = item.threshold
        if threshold is not ANY:
            threshold = qdom.check_threshold(qdom.coerce(threshold))
        if isinstance(item.atom, PrimitiveAtom):
            program.cdom.validate(item.atom)
        items.append(GoalItem(item.atom, item.qvar, threshold))
    return Goal(tuple(items), prepare_constraints(program, goal.constraints))
