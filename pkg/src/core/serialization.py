"""
JSON encoding of solutions and proof trees.

Terms, atoms and constraints are stored as canonical source text and
qualification values as canonical literals (``"0.6"``, ``"(0.6, 5)"``,
``"inf"``), so the output is byte-stable and exact.
"""

import json
from typing import Any, Dict, List, Mapping

from src.core.parser import parse_atom, parse_qvalue, parse_term
from src.core.proof import SQDA, SQEA, SQPA, ProofTree
from src.core.semantics import QcAtom
from src.core.solver import Solution
from src.models.errors import ProofError, SqclpError
from src.models.qualification import QualDomain, format_value
from src.models.syntax import ConstraintSet, Program, Substitution


def dumps(data: Any) -> str:
    return json.dumps(data, sort_keys=True, indent=2, ensure_ascii=False)


def qc_atom_to_dict(phi: QcAtom) -> Dict[str, Any]:
    return {
        "atom": str(phi.atom),
        "degree": format_value(phi.degree),
        "constraints": sorted(str(atom) for atom in phi.constraints),
    }


def proof_to_dict(tree: ProofTree) -> Dict[str, Any]:
    data: Dict[str, Any] = {"rule": tree.rule, "conclusion": qc_atom_to_dict(tree.conclusion)}
    if isinstance(tree, SQDA):
        data.update({
            "clause": tree.clause_id,
            "theta": {name: str(term) for name, term in tree.theta.items()},
            "head_degrees": [format_value(d) for d in tree.head_degrees],
            "body_degrees": [format_value(e) for e in tree.body_degrees],
            "children": [proof_to_dict(child) for child in tree.children],
        })
    return data


def solution_to_dict(solution: Solution) -> Dict[str, Any]:
    return {
        "bindings": {name: str(term) for name, term in solution.subst.items()},
        "qualifications": {name: format_value(value) for name, value in solution.qmap},
        "constraints": sorted(str(atom) for atom in solution.constraints),
        "proof": [proof_to_dict(tree) for tree in solution.witness],
    }


def _value(qdom: QualDomain, text: Any) -> Any:
    if not isinstance(text, str):
        raise ProofError(f"qualification value {text!r} must be a string")
    return qdom.coerce(parse_qvalue(text))


def _qc_atom(qdom: QualDomain, data: Mapping[str, Any]) -> QcAtom:
    return QcAtom(parse_atom(data["atom"]), _value(qdom, data["degree"]),
                  ConstraintSet(parse_atom(text) for text in data.get("constraints", ())))


def _tree(program: Program, data: Mapping[str, Any]) -> ProofTree:
    qdom = program.qdom
    rule = data["rule"]
    conclusion = _qc_atom(qdom, data["conclusion"])
    if rule == "SQEA":
        return SQEA(conclusion)
    if rule == "SQPA":
        return SQPA(conclusion)
    if rule != "SQDA":
        raise ProofError(f"unknown inference rule {rule!r}")
    theta = Substitution({name: parse_term(text) for name, text in data.get("theta", {}).items()})
    return SQDA(conclusion, int(data["clause"]), theta,
                tuple(_value(qdom, d) for d in data["head_degrees"]),
                tuple(_value(qdom, e) for e in data["body_degrees"]),
                tuple(_tree(program, child) for child in data.get("children", ())))


def proof_from_dict(program: Program, data: Mapping[str, Any]) -> ProofTree:
    """Rebuild a proof tree; malformed input raises :class:`ProofError`."""
    try:
        return _tree(program, data)
    except ProofError:
        raise
    except (KeyError, TypeError, ValueError, AttributeError, SqclpError) as exc:
        raise ProofError(f"malformed proof tree: {exc}") from exc


def load_proofs(program: Program, text: str) -> List[ProofTree]:
    """Proof trees from JSON text: trees or solution objects, alone or in a list."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProofError(f"proof file is not valid JSON: {exc}") from exc
    if isinstance(data, dict):
        data = [data]
    if not isinstance(data, list):
        raise ProofError("proof file must hold proof trees or solutions")
    trees = []
    for item in data:
        if isinstance(item, dict) and "proof" in item:
            trees.extend(proof_from_dict(program, tree) for tree in item["proof"])
        else:
            trees.append(proof_from_dict(program, item))
    return trees
