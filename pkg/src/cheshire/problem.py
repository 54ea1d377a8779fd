"""Declarative model of a property-separation task.

A :class:`SeparationProblem` names the block structure, the observables
applied per block, and the target pattern of unnormalized bilinear values
each observable should take in each block.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import BlockSpace, as_cmatrix


@dataclass(frozen=True)
class Observable:
    label: str
    matrix: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "matrix", as_cmatrix(self.matrix))
        if self.matrix.shape[0] != self.matrix.shape[1]:
            raise ValueError(f"observable {self.label!r} must be square")


@dataclass(frozen=True)
class TargetPattern:
    """rows[b, j]: desired unnormalized bilinear value of observable j in block b."""

    rows: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.rows, dtype=np.complex128)
        if arr.ndim != 2:
            raise ValueError("target pattern must be a blocks x observables array")
        object.__setattr__(self, "rows", arr)

    @property
    def num_blocks(self) -> int:
        return self.rows.shape[0]

    @property
    def num_observables(self) -> int:
        return self.rows.shape[1]


def delta_target(m: int, amplitudes=None) -> TargetPattern:
    """Kronecker-delta pattern: observable b has amplitude[b] in block b only."""
    if m < 1:
        raise ValueError("m must be >= 1")
    if amplitudes is None:
        amplitudes = [1.0] * m
    amps = np.asarray(amplitudes, dtype=np.complex128)
    if amps.shape != (m,):
        raise ValueError(f"need exactly {m} amplitudes")
    if np.any(amps == 0):
        raise ValueError("amplitudes must be nonzero")
    return TargetPattern(np.diag(amps))


@dataclass(frozen=True)
class SeparationProblem:
    space: BlockSpace
    observables: tuple[Observable, ...]
    target: TargetPattern
    name: str = "unnamed"

    def __post_init__(self):
        object.__setattr__(self, "observables", tuple(self.observables))


def validate(problem: SeparationProblem) -> list[str]:
    """Return every invariant violation (empty list iff well-formed)."""
    violations = []
    q = len(problem.observables)
    if q < 1:
        violations.append("problem has no observables")
    for j, obs in enumerate(problem.observables):
        for b, dim in enumerate(problem.space.dims):
            if obs.matrix.shape[0] != dim:
                violations.append(
                    f"observable {j} ({obs.label!r}) is {obs.matrix.shape[0]}-dim "
                    f"but block {b} has dim {dim}"
                )
    t = problem.target
    if t.num_blocks != problem.space.num_blocks:
        violations.append(
            f"target has {t.num_blocks} rows but space has "
            f"{problem.space.num_blocks} blocks"
        )
    if q and t.num_observables != q:
        violations.append(
            f"target has {t.num_observables} columns but there are {q} observables"
        )
    if t.rows.size and not np.any(t.rows):
        violations.append("target pattern is identically zero (degenerate)")
    return violations
