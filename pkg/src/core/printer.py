"""
Canonical text of programs, accepted back by :func:`parse_program`.
"""

from typing import List

from src.models.qualification import format_value
from src.models.syntax import Clause, Program


def format_clause(clause: Clause, top) -> str:
    """``head <-α- body`` for a proper attenuation, Prolog form when it is top."""
    body = ", ".join(str(item) for item in clause.body)
    if clause.attenuation != top:
        text = f"{clause.head} <-{format_value(clause.attenuation)}-"
        return f"{text} {body}" if body else text
    return f"{clause.head} :- {body}" if body else str(clause.head)


def print_program(program: Program) -> str:
    lines: List[str] = [f"#qdom {program.qdom}", f"#cdom {program.cdom}"]
    for x, y, value in program.proximity.entries():
        lines.append(f"~({x}, {y}) = {format_value(value)}")
    lines.extend(format_clause(clause, program.qdom.top) for clause in program.clauses)
    return "\n".join(lines) + "\n"
