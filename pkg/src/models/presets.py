"""
Named instances of the scheme obtained by fixing some of its parameters.

A preset may fix the proximity relation to the identity, the qualification
domain and the constraint domain; a parameter left as ``None`` stays free.
"""

from dataclasses import dataclass
from typing import Dict, Iterable, List, NamedTuple, Optional

from src.models.errors import Diagnostic
from src.models.qualification import ANY, B, U, BooleanDomain, QualDomain
from src.models.syntax import Equation, PrimitiveAtom, Program


@dataclass(frozen=True)
class Preset:
    name: str
    identity_proximity: bool
    qdom: Optional[QualDomain]
    cdom: Optional[str]
    description: str

    @property
    def parameters(self) -> str:
        proximity = "S_id" if self.identity_proximity else "R"
        qdom = self.qdom.name if self.qdom is not None else "Q"
        cdom = self.cdom or "C"
        return f"SQCLP({proximity}, {qdom}, {cdom})"

    def __str__(self) -> str:
        return f"{self.name} := {self.parameters}"


PRESETS: Dict[str, Preset] = {p.name: p for p in (
    Preset("SQCLP", False, None, None,
           "the general scheme: proximity, qualification and constraints"),
    Preset("QCLP", True, None, None,
           "qualified CLP; threshold-free QCLP(U, C) programs are quantitative CLP"),
    Preset("SQLP", False, None, "R",
           "similarity-based qualified LP; originally threshold-free, constraint-free and transitive"),
    Preset("SCLP", False, B, None,
           "proximity-based CLP; attenuations and thresholds are useless"),
    Preset("QLP", True, None, "R",
           "qualified LP; originally threshold-free and constraint-free"),
    Preset("SLP", False, U, "R",
           "similarity-based LP; the threshold-free, attenuation-free, constraint-free fragment is pure Bousi~Prolog"),
    Preset("CLP", True, B, None,
           "classical constraint logic programming"),
    Preset("LP", True, B, "H",
           "pure logic programming over the Herbrand domain"),
)}


class ProgramTraits(NamedTuple):
    threshold_free: bool
    attenuation_free: bool
    constraint_free: bool


def program_traits(program: Program) -> ProgramTraits:
    """Classify a program as threshold-free, attenuation-free and constraint-free."""
    items = [item for clause in program.clauses for item in clause.body]
    return ProgramTraits(
        threshold_free=all(item.threshold is ANY for item in items),
        attenuation_free=all(clause.attenuation == program.qdom.top for clause in program.clauses),
        constraint_free=not any(isinstance(item.atom, (PrimitiveAtom, Equation)) for item in items),
    )


def get_preset(name: str) -> Preset:
    try:
        return PRESETS[name.upper()]
    except KeyError:
        raise KeyError(f"unknown preset {name}; expected one of {', '.join(PRESETS)}") from None


def preset_problems(preset: Preset, qdom: QualDomain, cdom: str, proximity_lines: Iterable[Optional[int]],
                    explicit_values: Iterable[Optional[int]]) -> List[Diagnostic]:
    """Diagnostics for a program that does not fit ``preset``.

    ``proximity_lines`` holds the source line of every proximity declaration,
    ``explicit_values`` the line of every attenuation or threshold written out.
    """
    problems = []
    if preset.qdom is not None and qdom != preset.qdom:
        problems.append(Diagnostic("preset-qdom", f"{preset.name} fixes the qualification domain to "
                                                  f"{preset.qdom}, program uses {qdom}"))
    if preset.cdom is not None and cdom != preset.cdom:
        problems.append(Diagnostic("preset-cdom", f"{preset.name} fixes the constraint domain to "
                                                  f"{preset.cdom}, program uses {cdom}"))
    if preset.identity_proximity:
        for line in proximity_lines:
            problems.append(Diagnostic("preset-proximity",
                                       f"{preset.name} fixes the identity proximity relation", line))
    if isinstance(preset.qdom, BooleanDomain):
        for line in explicit_values:
            problems.append(Diagnostic("preset-useless", f"attenuation and threshold values are useless "
                                                         f"in {preset.name}", line))
    return problems


def fits(preset: Preset, program: Program) -> bool:
    """Whether ``program`` is already an instance of ``preset``."""
    if preset.identity_proximity and not program.proximity.is_identity:
        return False
    if preset.qdom is not None and program.qdom != preset.qdom:
        return False
    if preset.cdom is not None and str(program.cdom) != preset.cdom:
        return False
    if isinstance(preset.qdom, BooleanDomain):
        return program_traits(program).threshold_free
    return True
