"""Named gates from the YAML fixture, and gate/channel documents from JSON or YAML files.

Gate document schema::

    {"gate": "cnot" | {"matrix": [[[re, im], ...4], ...4]},
     "noise": {"type": "depolarized", "p": 0.3}
            | {"type": "mixed_unitary",
               "branches": [{"gate": <gate>, "probability": 0.5}, ...]}}
"""

from __future__ import annotations

import json
from functools import cache
from pathlib import Path
from typing import Any

import numpy as np
import yaml

from .channels import ChannelSpec, Depolarized, mixed_unitary
from .exceptions import GateSpecError
from .qmath import TAU_UNIT, Operator, check_unitary

FIXTURE_PATH = Path(__file__).resolve().parent / "fixtures" / "gates.yaml"


@cache
def _gate_library() -> dict[str, dict[str, Any]]:
    with open(FIXTURE_PATH, "r", encoding="utf-8") as f:
        entries = yaml.safe_load(f)
    return {entry["name"]: entry for entry in entries}


def gate_names() -> list[str]:
    return sorted(_gate_library())


def gate_description(name: str) -> str | None:
    entry = _gate_library().get(name.lower())
    return None if entry is None else entry.get("description", "")


def parse_matrix(rows: Any, *, tol: float = TAU_UNIT) -> Operator:
    """[[[re, im] x4] x4] -> checked 4x4 unitary."""
    try:
        matrix = np.array([[complex(re, im) for re, im in row] for row in rows], dtype=complex)
    except (TypeError, ValueError) as e:
        raise GateSpecError(f"matrix entries must be [re, im] pairs: {e}") from e
    return check_unitary(matrix, 4, tol=tol)


def named_gate(name: str) -> Operator:
    library = _gate_library()
    try:
        entry = library[name.lower()]
    except KeyError:
        raise GateSpecError(
            f"unknown gate '{name}'. Known gates: {', '.join(gate_names())}"
        ) from None
    return parse_matrix(entry["matrix"])


def load_gate_document(file_path: str | Path) -> dict[str, Any]:
    """Load a gate document from YAML or JSON file"""
    file_path = Path(file_path)
    if file_path.is_dir():
        raise GateSpecError(f"{file_path} is a directory, not a gate file")
    if not file_path.is_file():
        raise GateSpecError(f"File not found: {file_path}")
    with open(file_path, "r", encoding="utf-8") as f:
        try:
            if file_path.suffix.lower() in [".yaml", ".yml"]:
                document = yaml.safe_load(f)
            elif file_path.suffix.lower() == ".json":
                document = json.load(f)
            else:
                raise GateSpecError("Unsupported file format. Use .yaml, .yml, or .json")
        except (json.JSONDecodeError, yaml.YAMLError) as e:
            raise GateSpecError(f"could not parse {file_path}: {e}") from e
    if not isinstance(document, dict) or "gate" not in document:
        raise GateSpecError(f"{file_path}: expected a mapping with a 'gate' field")
    return document


def gate_from_value(value: Any, *, tol: float = TAU_UNIT) -> Operator:
    """A gate name, a {"matrix": ...} mapping, or a nested list of [re, im] rows."""
    if isinstance(value, str):
        return named_gate(value)
    if isinstance(value, dict) and "matrix" in value:
        return parse_matrix(value["matrix"], tol=tol)
    if isinstance(value, list):
        return parse_matrix(value, tol=tol)
    raise GateSpecError(f"cannot interpret gate value {value!r}")


def resolve_gate(spec: str, *, tol: float = TAU_UNIT) -> tuple[Operator, dict[str, Any] | None]:
    """Resolve ``--gate``: a known name, else a path to a gate document.

    Returns the gate and, for documents, the parsed document.
    """
    path = Path(spec)
    if spec.lower() in _gate_library() or (not path.exists() and not path.suffix):
        return named_gate(spec), None
    document = load_gate_document(path)
    return gate_from_value(document["gate"], tol=tol), document


def channel_from_document(
    document: dict[str, Any] | None, gate: Operator, default_p: float
) -> ChannelSpec:
    """The noisy counterpart described by ``document['noise']``; depolarized by default."""
    noise = (document or {}).get("noise")
    if noise is None:
        return Depolarized(gate, default_p)
    if not isinstance(noise, dict):
        raise GateSpecError("'noise' must be a mapping")

    kind = noise.get("type")
    if kind == "depolarized":
        p = noise.get("p", default_p)
        if p is None:
            raise GateSpecError("depolarized noise needs a 'p' field or --p")
        return Depolarized(gate, p)
    if kind == "mixed_unitary":
        branches = noise.get("branches")
        if not isinstance(branches, list) or not branches:
            raise GateSpecError("mixed_unitary noise needs a non-empty 'branches' list")
        try:
            entries = [(b["gate"], float(b["probability"])) for b in branches]
        except (KeyError, TypeError, ValueError) as e:
            raise GateSpecError(f"each branch needs 'gate' and a numeric 'probability': {e}") from e
        return mixed_unitary([(gate_from_value(value), prob) for value, prob in entries])
    raise GateSpecError(f"unknown noise type {kind!r}; use 'depolarized' or 'mixed_unitary'")
