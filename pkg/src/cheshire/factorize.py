"""Rank-1 (product-form) search inside affine solution sets.

A linear solution v only yields actual selection states when its n x n
reshape factors as an outer product x y^T. This module searches the affine
set particular + span(nullspace) for such a point by multi-start local
descent on the relative rank-1 defect, fixes the gauge, and assembles the
global pre/post-selection pair.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .criterion import AffineSolutionSet, FeasibilityVerdict, solve_all_blocks
from .linalg import BlockSpace, BlockedState, inner
from .problem import SeparationProblem


class OrthogonalSelections(Exception):
    """Raised when no rescaling makes the global overlap nonzero."""


@dataclass(frozen=True)
class SearchConfig:
    rank1_tol: float = 1e-8
    starts: int = 64
    max_iter: int = 500
    seed: int = 0
    overlap_tol: float = 1e-9

    def __post_init__(self):
        if min(self.rank1_tol, self.starts, self.max_iter, self.overlap_tol) <= 0:
            raise ValueError("search parameters must be positive")


@dataclass(frozen=True)
class Rank1Factor:
    """Gauge-fixed factors: ||x|| = 1, first nonzero x entry real positive.

    residual is the relative second singular value sigma2/sigma1 of the best
    point found; the factorization succeeded iff residual <= rank1_tol.
    """

    x: np.ndarray
    y: np.ndarray
    residual: float


class BlockStatus(enum.Enum):
    LINEAR_INFEASIBLE = "LINEAR_INFEASIBLE"
    RANK1_NOT_FOUND = "RANK1_NOT_FOUND"
    SOLVED = "SOLVED"


@dataclass(frozen=True)
class SelectionPair:
    pre: BlockedState
    post: BlockedState
    overlap: complex
    # Per-block scalar applied to the pre component during assembly
    # (1 unless the anti-cancellation rescue fired).
    scales: tuple[complex, ...] = ()


@dataclass(frozen=True)
class SolveReport:
    problem: SeparationProblem
    verdicts: list[FeasibilityVerdict]
    factors: list[Rank1Factor | None]
    statuses: list[BlockStatus]
    selection: SelectionPair | None = None

    @property
    def solved(self) -> bool:
        return all(s is BlockStatus.SOLVED for s in self.statuses)


def reshape_square(v) -> np.ndarray:
    """Invert the row-major flattening: V[k, l] = v[k*n + l]."""
    v = np.asarray(v, dtype=np.complex128).reshape(-1)
    n = int(round(np.sqrt(v.size)))
    if n * n != v.size:
        raise ValueError(f"length {v.size} is not a perfect square")
    return v.reshape(n, n)


def gauge_fix(x, y) -> tuple[np.ndarray, np.ndarray]:
    """Normalize ||x|| = 1 with first nonzero x entry real positive; keep x y^T."""
    x = np.asarray(x, dtype=np.complex128).copy()
    y = np.asarray(y, dtype=np.complex128).copy()
    nrm = np.linalg.norm(x)
    if nrm == 0:
        return x, y
    x /= nrm
    y *= nrm
    nz = np.flatnonzero(np.abs(x) > 1e-14)
    if nz.size:
        phase = x[nz[0]] / abs(x[nz[0]])
        x /= phase
        y *= phase
    return x, y


def _rank1_defect(v_flat: np.ndarray, n: int):
    """Relative tail energy 1 - sigma1^2/||V||_F^2 and its complex gradient wrt v."""
    V = v_flat.reshape(n, n)
    u, s, wh = np.linalg.svd(V)
    fro2 = float(np.sum(s * s))
    if fro2 == 0.0:
        return 0.0, np.zeros(n * n, dtype=np.complex128)
    f = 1.0 - (s[0] * s[0]) / fro2
    # d f / d conj(V) = (sigma1^2 V - fro2 * sigma1 u1 w1^H) / fro2^2
    G = (s[0] * s[0] * V - fro2 * s[0] * np.outer(u[:, 0], wh[0])) / (fro2 * fro2)
    return f, G.reshape(-1)


def _split_factor(V: np.ndarray) -> tuple[np.ndarray, np.ndarray, float]:
    """Best rank-1 outer-product factors of V and the relative defect sigma2/sigma1."""
    u, s, wh = np.linalg.svd(V)
    if s[0] == 0.0:
        return np.zeros(V.shape[0], complex), np.zeros(V.shape[1], complex), 0.0
    residual = float(s[1] / s[0]) if s.size > 1 else 0.0
    x = u[:, 0]
    y = s[0] * wh[0]
    x, y = gauge_fix(x, y)
    return x, y, residual


def find_rank1(sol: AffineSolutionSet, config: SearchConfig = SearchConfig()) -> Rank1Factor:
    """Search particular + span(nullspace) for a rank-1 point.

    Multi-start local descent (t = 0 first, then seeded pseudo-random
    complex starts) minimizing the scale-free defect 1 - sigma1^2/||V||^2.
    Deterministic given config.seed. With an empty null space the verdict
    is exact: the single point either factors or it does not.
    """
    p = np.asarray(sol.particular, dtype=np.complex128)
    n = int(round(np.sqrt(p.size)))
    if n * n != p.size:
        raise ValueError("solution length is not a perfect square")
    N = np.asarray(sol.nullspace, dtype=np.complex128).reshape(-1, p.size)
    r = N.shape[0]

    if r == 0 or n == 1:
        x, y, residual = _split_factor(p.reshape(n, n))
        return Rank1Factor(x=x, y=y, residual=residual)

    def objective(z: np.ndarray):
        t = z[:r] + 1j * z[r:]
        v = p + t @ N
        f, g_v = _rank1_defect(v, n)
        g_t = N.conj() @ g_v  # d f / d conj(t)
        return f, np.concatenate([2.0 * g_t.real, 2.0 * g_t.imag])

    def polish(v: np.ndarray) -> np.ndarray:
        # Alternate rank-1 truncation with projection back onto the affine
        # set; squeezes the descent result down to machine precision.
        for _ in range(50):
            V = v.reshape(n, n)
            u, s, wh = np.linalg.svd(V)
            if s[0] == 0 or s[1] / s[0] < 1e-15:
                break
            trunc = (s[0] * np.outer(u[:, 0], wh[0])).reshape(-1)
            v = p + (N.conj() @ (trunc - p)) @ N
        return v

    rng = np.random.default_rng(config.seed)
    scale = max(1.0, float(np.linalg.norm(p)))
    best: tuple[float, int, np.ndarray] | None = None
    for start in range(config.starts):
        if start == 0:
            z0 = np.zeros(2 * r)
        else:
            z0 = rng.standard_normal(2 * r) * scale
        res = minimize(objective, z0, jac=True, method="L-BFGS-B",
                       options={"maxiter": config.max_iter,
                                "ftol": 1e-18, "gtol": 1e-12})
        t = res.x[:r] + 1j * res.x[r:]
        V = polish(p + t @ N).reshape(n, n)
        s = np.linalg.svd(V, compute_uv=False)
        residual = float(s[1] / s[0]) if s[0] > 0 else 0.0
        if best is None or residual < best[0]:
            best = (residual, start, V)
        if residual <= config.rank1_tol:
            break

    residual, _, V = best
    x, y, _ = _split_factor(V)
    return Rank1Factor(x=x, y=y, residual=residual)


def assemble(factors, space: BlockSpace,
             config: SearchConfig = SearchConfig()) -> SelectionPair:
    """Concatenate per-block factors into a global selection pair.

    If the per-block bilinears cancel to a (near-)zero global overlap, one
    block's pre component is rescaled by a deterministic ladder of constants
    (2, then 3) until the overlap clears overlap_tol; rescaling a block
    preserves the zero/nonzero pattern of every per-block bilinear value.
    """
    factors = list(factors)
    if len(factors) != space.num_blocks:
        raise ValueError("one factor per block required")
    xs = [f.x for f in factors]
    ys = [f.y for f in factors]
    scales = [complex(1.0)] * len(factors)

    def overlap_of(ys_trial):
        return sum(inner(x, y) for x, y in zip(xs, ys_trial))

    overlap = overlap_of(ys)
    if abs(overlap) <= config.overlap_tol:
        done = False
        for c in (2.0, 3.0):
            for b in range(space.num_blocks):
                trial = list(ys)
                trial[b] = ys[b] * c
                ov = overlap_of(trial)
                if abs(ov) > config.overlap_tol:
                    ys, overlap, done = trial, ov, True
                    scales[b] = complex(c)
                    break
            if done:
                break
        if not done:
            raise OrthogonalSelections(
                "global overlap stays below tolerance under all rescalings"
            )
    post = BlockedState(space, xs)
    pre = BlockedState(space, ys)
    return SelectionPair(pre=pre, post=post, overlap=complex(overlap),
                         scales=tuple(scales))


def solve_problem(problem: SeparationProblem,
                  config: SearchConfig = SearchConfig()) -> SolveReport:
    """Full pipeline: linear feasibility, per-block rank-1 search, assembly."""
    verdicts = solve_all_blocks(problem)
    factors: list[Rank1Factor | None] = []
    statuses: list[BlockStatus] = []
    n_by_block = list(problem.space.dims)
    for b, verdict in enumerate(verdicts):
        if not verdict.feasible:
            factors.append(None)
            statuses.append(BlockStatus.LINEAR_INFEASIBLE)
            continue
        if not np.any(problem.target.rows[b]):
            # Unconstrained block: zero component satisfies every condition.
            n = n_by_block[b]
            factors.append(Rank1Factor(x=np.zeros(n, complex),
                                       y=np.zeros(n, complex), residual=0.0))
            statuses.append(BlockStatus.SOLVED)
            continue
        factor = find_rank1(verdict.solution, config)
        factors.append(factor)
        statuses.append(BlockStatus.SOLVED if factor.residual <= config.rank1_tol
                        else BlockStatus.RANK1_NOT_FOUND)

    selection = None
    if all(s is BlockStatus.SOLVED for s in statuses):
        selection = assemble([f for f in factors], problem.space, config)
    return SolveReport(problem=problem, verdicts=verdicts, factors=factors,
                       statuses=statuses, selection=selection)
