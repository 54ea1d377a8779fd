"""Weak-value evaluation, delta-pattern verification, calibration maps."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .factorize import SelectionPair
from .linalg import BlockedState, as_cmatrix, as_cvector, embed_block_operator, inner
from .problem import SeparationProblem

DEFAULT_PATTERN_TOL = 1e-7
DEFAULT_OVERLAP_TOL = 1e-9


class PostSelectionOrthogonal(Exception):
    """Pre- and post-selection overlap is (numerically) zero."""


def weak_value(post, pre, operator, overlap_tol: float = DEFAULT_OVERLAP_TOL) -> complex:
    """inner(post, O pre) / inner(post, pre); post is a co-vector."""
    post = as_cvector(post)
    pre = as_cvector(pre)
    op = as_cmatrix(operator)
    overlap = inner(post, pre)
    if abs(overlap) <= overlap_tol:
        raise PostSelectionOrthogonal(
            f"|<post|pre>| = {abs(overlap):.3e} <= {overlap_tol:.1e}"
        )
    return complex(inner(post, op @ pre) / overlap)


@dataclass(frozen=True)
class WeakValueReport:
    """weak_values[b, j]: weak value of observable j block-embedded in block b."""

    weak_values: np.ndarray
    bilinears: np.ndarray  # unnormalized values inner(post, O_embedded pre)
    amplitudes: tuple[complex | None, ...]  # per block: first on-target weak value
    pattern_ok: bool
    tol: float
    overlap: complex
    imag_warnings: tuple[tuple[int, int], ...] = ()


def verify_disembodiment(selection: SelectionPair, problem: SeparationProblem,
                         tol: float = DEFAULT_PATTERN_TOL) -> WeakValueReport:
    """Evaluate every block-embedded weak value and check the target pattern.

    pattern_ok requires every zero-target entry to vanish within tol and
    every nonzero-target entry to stay above tol in magnitude.
    """
    space = problem.space
    post = selection.post.to_flat()
    pre = selection.pre.to_flat()
    overlap = inner(post, pre)
    if abs(overlap) <= DEFAULT_OVERLAP_TOL:
        raise PostSelectionOrthogonal(f"|<post|pre>| = {abs(overlap):.3e}")

    p = space.num_blocks
    q = len(problem.observables)
    bilinears = np.zeros((p, q), dtype=np.complex128)
    for b in range(p):
        for j, obs in enumerate(problem.observables):
            op = embed_block_operator(obs.matrix, b, space)
            bilinears[b, j] = inner(post, op @ pre)
    weak_values = bilinears / overlap

    target = problem.target.rows
    on_pattern = target != 0
    pattern_ok = True
    amplitudes: list[complex | None] = []
    imag_warnings: list[tuple[int, int]] = []
    for b in range(p):
        amp = None
        for j in range(q):
            w = weak_values[b, j]
            if on_pattern[b, j]:
                if amp is None:
                    amp = complex(w)
                if abs(w) <= tol:
                    pattern_ok = False
                if abs(w.imag) > tol:
                    imag_warnings.append((b, j))
            elif abs(w) > tol:
                pattern_ok = False
        amplitudes.append(amp)

    return WeakValueReport(
        weak_values=weak_values,
        bilinears=bilinears,
        amplitudes=tuple(amplitudes),
        pattern_ok=pattern_ok,
        tol=tol,
        overlap=complex(overlap),
        imag_warnings=tuple(imag_warnings),
    )


@dataclass(frozen=True)
class CalibrationMap:
    """Stationary preparation/detection imperfections as invertible maps."""

    pre_transform: np.ndarray
    post_transform: np.ndarray

    def __post_init__(self):
        for name in ("pre_transform", "post_transform"):
            m = as_cmatrix(getattr(self, name))
            object.__setattr__(self, name, m)
            s = np.linalg.svd(m, compute_uv=False)
            if m.shape[0] != m.shape[1] or s[-1] <= 1e-12 * s[0]:
                raise ValueError(f"{name} must be square and invertible")

    def inverse(self) -> "CalibrationMap":
        return CalibrationMap(
            pre_transform=np.linalg.inv(self.pre_transform),
            post_transform=np.linalg.inv(self.post_transform),
        )


def apply_calibration(selection: SelectionPair, cal: CalibrationMap) -> SelectionPair:
    """pre -> A pre; post co-vector -> post B (composition on the right)."""
    space = selection.pre.space
    pre = cal.pre_transform @ selection.pre.to_flat()
    post = selection.post.to_flat() @ cal.post_transform
    overlap = inner(post, pre)
    return SelectionPair(
        pre=BlockedState.from_flat(space, pre),
        post=BlockedState.from_flat(space, post),
        overlap=complex(overlap),
        scales=selection.scales,
    )
