"""Scenario file format: one JSON document per scenario.

Complex numbers are always two-element [re, im] arrays. Field layout:

    {
      "name": "...",
      "blocks": [{"label": "...", "dim": 2}, ...],
      "operators": [{"label": "...", "matrix": [[[re, im], ...], ...]}, ...],
      "targets": [[[re, im], ...], ...],          # blocks x operators
      "reference_pre":  [[re, im], ...],          # optional, total dim
      "reference_post": [[re, im], ...]           # optional, total dim
    }
"""
from __future__ import annotations

import json

import numpy as np

from .linalg import BlockSpace
from .problem import Observable, SeparationProblem, TargetPattern
from .scenarios import NamedScenario


class ScenarioFormatError(Exception):
    """Malformed scenario document; message carries the offending field."""


def _c2pair(z) -> list[float]:
    z = complex(z)
    return [float(z.real), float(z.imag)]


def _pair2c(value, where: str) -> complex:
    if (not isinstance(value, (list, tuple)) or len(value) != 2
            or not all(isinstance(x, (int, float)) and not isinstance(x, bool)
                       for x in value)):
        raise ScenarioFormatError(f"{where}: expected [re, im] pair, got {value!r}")
    return complex(value[0], value[1])


def scenario_to_dict(scenario: NamedScenario) -> dict:
    problem = scenario.problem
    doc = {
        "name": scenario.name,
        "blocks": [
            {"label": label, "dim": int(dim)}
            for label, dim in zip(problem.space.labels, problem.space.dims)
        ],
        "operators": [
            {
                "label": obs.label,
                "matrix": [[_c2pair(z) for z in row] for row in obs.matrix],
            }
            for obs in problem.observables
        ],
        "targets": [[_c2pair(z) for z in row] for row in problem.target.rows],
    }
    if scenario.reference_pre is not None:
        doc["reference_pre"] = [_c2pair(z) for z in scenario.reference_pre]
    if scenario.reference_post is not None:
        doc["reference_post"] = [_c2pair(z) for z in scenario.reference_post]
    return doc


def dumps(scenario: NamedScenario) -> str:
    return json.dumps(scenario_to_dict(scenario), indent=2) + "\n"


def _require(doc: dict, key: str, kind, where: str = "document"):
    if key not in doc:
        raise ScenarioFormatError(f"{where}: missing field {key!r}")
    value = doc[key]
    if not isinstance(value, kind):
        raise ScenarioFormatError(
            f"{where}.{key}: expected {kind.__name__}, got {type(value).__name__}"
        )
    return value


def scenario_from_dict(doc) -> NamedScenario:
    if not isinstance(doc, dict):
        raise ScenarioFormatError("document: expected a JSON object")
    name = _require(doc, "name", str)
    blocks = _require(doc, "blocks", list)
    if not blocks:
        raise ScenarioFormatError("blocks: must be nonempty")
    labels, dims = [], []
    for i, blk in enumerate(blocks):
        if not isinstance(blk, dict):
            raise ScenarioFormatError(f"blocks[{i}]: expected object")
        labels.append(_require(blk, "label", str, f"blocks[{i}]"))
        dim = _require(blk, "dim", int, f"blocks[{i}]")
        if dim < 1:
            raise ScenarioFormatError(f"blocks[{i}].dim: must be >= 1")
        dims.append(dim)
    try:
        space = BlockSpace(labels=tuple(labels), dims=tuple(dims))
    except ValueError as exc:
        raise ScenarioFormatError(f"blocks: {exc}") from exc

    operators = _require(doc, "operators", list)
    if not operators:
        raise ScenarioFormatError("operators: must be nonempty")
    observables = []
    for j, op in enumerate(operators):
        if not isinstance(op, dict):
            raise ScenarioFormatError(f"operators[{j}]: expected object")
        label = _require(op, "label", str, f"operators[{j}]")
        matrix = _require(op, "matrix", list, f"operators[{j}]")
        rows = []
        for k, row in enumerate(matrix):
            if not isinstance(row, list) or len(row) != len(matrix):
                raise ScenarioFormatError(
                    f"operators[{j}].matrix[{k}]: matrix must be square"
                )
            rows.append([_pair2c(z, f"operators[{j}].matrix[{k}][{l}]")
                         for l, z in enumerate(row)])
        observables.append(Observable(label, np.array(rows, dtype=np.complex128)))

    targets = _require(doc, "targets", list)
    if len(targets) != len(blocks):
        raise ScenarioFormatError(
            f"targets: expected {len(blocks)} rows, got {len(targets)}"
        )
    target_rows = []
    for b, row in enumerate(targets):
        if not isinstance(row, list) or len(row) != len(operators):
            raise ScenarioFormatError(
                f"targets[{b}]: expected {len(operators)} entries"
            )
        target_rows.append([_pair2c(z, f"targets[{b}][{j}]")
                            for j, z in enumerate(row)])

    problem = SeparationProblem(
        space=space,
        observables=tuple(observables),
        target=TargetPattern(np.array(target_rows, dtype=np.complex128)),
        name=name,
    )

    refs = {}
    for key in ("reference_pre", "reference_post"):
        if key in doc:
            vec = _require(doc, key, list)
            if len(vec) != space.total_dim:
                raise ScenarioFormatError(
                    f"{key}: expected {space.total_dim} entries, got {len(vec)}"
                )
            refs[key] = np.array(
                [_pair2c(z, f"{key}[{i}]") for i, z in enumerate(vec)],
                dtype=np.complex128,
            )

    return NamedScenario(
        name=name,
        problem=problem,
        reference_pre=refs.get("reference_pre"),
        reference_post=refs.get("reference_post"),
    )


def loads(text: str) -> NamedScenario:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioFormatError(f"invalid JSON: {exc}") from exc
    return scenario_from_dict(doc)


def load_path(path) -> NamedScenario:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ScenarioFormatError(f"cannot read {path}: {exc}") from exc
    return loads(text)
