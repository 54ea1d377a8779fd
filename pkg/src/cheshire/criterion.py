"""Linear feasibility of the separation pattern.

Each block of dimension n yields a q x n^2 coefficient matrix whose row j
is the row-major flattening of observable j; the bilinear conditions become
the linear system M v = e in the unknowns v[(k,l)] = x^k y^l with column
index k*n + l (0-based).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import DEFAULT_RANK_TOL, rank
from .problem import Observable, SeparationProblem, validate

FEASIBILITY_RESIDUAL_TOL = 1e-9


@dataclass(frozen=True)
class CoefficientMatrix:
    """Full q x n^2 coefficient matrix for one block."""

    matrix: np.ndarray
    block_dim: int

    def compressed(self) -> tuple[np.ndarray, np.ndarray]:
        """Drop identically-zero columns (display view).

        Returns (submatrix, kept column indices).
        """
        keep = np.where(np.any(self.matrix != 0, axis=0))[0]
        return self.matrix[:, keep], keep


@dataclass(frozen=True)
class AffineSolutionSet:
    """Minimum-norm particular solution plus orthonormal null-space basis."""

    particular: np.ndarray
    nullspace: np.ndarray  # shape (r, n^2), orthonormal rows
    residual: float


@dataclass(frozen=True)
class FeasibilityVerdict:
    block_index: int
    feasible: bool
    rank_m: int
    rank_augmented: int
    solution: AffineSolutionSet | None


def build_M(observables) -> CoefficientMatrix:
    """Stack the row-major flattenings of the observables on one block."""
    obs = [o.matrix if isinstance(o, Observable) else np.asarray(o, complex)
           for o in observables]
    if not obs:
        raise ValueError("at least one observable required")
    n = obs[0].shape[0]
    for o in obs:
        if o.shape != (n, n):
            raise ValueError("mixed observable dimensions")
    m = np.vstack([o.reshape(-1) for o in obs]).astype(np.complex128)
    return CoefficientMatrix(matrix=m, block_dim=n)


def feasibility(coeff: CoefficientMatrix, e, rel_tol: float = DEFAULT_RANK_TOL,
                block_index: int = 0) -> FeasibilityVerdict:
    """Augmented-rank feasibility test with min-norm solution on success."""
    m = coeff.matrix
    e = np.asarray(e, dtype=np.complex128).reshape(-1)
    if e.shape[0] != m.shape[0]:
        raise ValueError(f"target length {e.shape[0]} != row count {m.shape[0]}")
    rank_m = rank(m, rel_tol)
    rank_aug = rank(np.hstack([m, e[:, None]]), rel_tol)
    feasible = rank_aug == rank_m

    solution = None
    if feasible:
        u, s, vh = np.linalg.svd(m, full_matrices=True)
        cutoff = rel_tol * s[0] if s.size and s[0] > 0 else 0.0
        r = int(np.count_nonzero(s > cutoff))
        # Min-norm solution via truncated pseudoinverse; lies in the row space,
        # hence orthogonal to the null-space basis below.
        s_inv = np.zeros_like(s)
        s_inv[:r] = 1.0 / s[:r]
        particular = vh.conj().T[:, : s.size] @ (s_inv * (u.conj().T @ e)[: s.size])
        nullspace = vh[r:].conj()
        residual = float(np.linalg.norm(m @ particular - e))
        solution = AffineSolutionSet(
            particular=particular, nullspace=nullspace, residual=residual
        )
    return FeasibilityVerdict(
        block_index=block_index,
        feasible=feasible,
        rank_m=rank_m,
        rank_augmented=rank_aug,
        solution=solution,
    )


def solve_all_blocks(problem: SeparationProblem,
                     rel_tol: float = DEFAULT_RANK_TOL) -> list[FeasibilityVerdict]:
    """One feasibility verdict per block (zero target rows included)."""
    violations = validate(problem)
    if violations:
        raise ValueError("invalid problem: " + "; ".join(violations))
    verdicts = []
    for b in range(problem.space.num_blocks):
        coeff = build_M([o.matrix for o in problem.observables])
        verdicts.append(
            feasibility(coeff, problem.target.rows[b], rel_tol, block_index=b)
        )
    return verdicts
