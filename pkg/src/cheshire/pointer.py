"""Von Neumann weak-measurement simulator with a Gaussian pointer.

The ancilla is the pointer momentum operator, so the impulsive coupling
exp(-i g O p) displaces the pointer position by g*lambda on each eigenbranch
of O. The post-selected pointer state is a superposition of displaced
Gaussians whose moments have closed forms in the Gaussian overlap integrals;
no grid discretization is involved.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import as_cmatrix, as_cvector
from .weakvalue import PostSelectionOrthogonal, weak_value

_PROB_UNDERFLOW = 1e-300
_HERMITIAN_TOL = 1e-10


@dataclass(frozen=True)
class PointerConfig:
    sigma: float  # pointer position spread
    g: float      # coupling strength

    def __post_init__(self):
        if not (self.sigma > 0 and np.isfinite(self.sigma) and np.isfinite(self.g)):
            raise ValueError("sigma must be positive and g finite")


@dataclass(frozen=True)
class PointerOutcome:
    mean_position_shift: float
    mean_momentum_shift: float
    postselection_probability: float


def _eigensystem(op: np.ndarray):
    """Eigenvalues and branch amplitudes factory for a diagonalizable operator."""
    op = as_cmatrix(op)
    if op.shape[0] != op.shape[1]:
        raise ValueError("operator must be square")
    herm_defect = np.linalg.norm(op - op.conj().T)
    scale = max(1.0, np.linalg.norm(op))
    if herm_defect <= _HERMITIAN_TOL * scale:
        lam, vecs = np.linalg.eigh(op)
        inv = vecs.conj().T
        return lam.astype(float), vecs, inv
    lam, vecs = np.linalg.eig(op)
    if np.linalg.cond(vecs) > 1e12:
        raise ValueError("operator is not (numerically) diagonalizable")
    if np.max(np.abs(lam.imag)) > _HERMITIAN_TOL * max(1.0, np.max(np.abs(lam))):
        raise ValueError("operator spectrum must be real for the Gaussian pointer model")
    return lam.real, vecs, np.linalg.inv(vecs)


def simulate(post, pre, operator, cfg: PointerConfig) -> PointerOutcome:
    """Exact post-selected pointer moments after one impulsive weak coupling."""
    post = as_cvector(post)
    pre = as_cvector(pre)
    lam, vecs, inv = _eigensystem(operator)

    # Branch amplitudes: c_k = inner(post, |k>) * (<k|-row applied to pre).
    c = (post @ vecs) * (inv @ pre)
    centers = cfg.g * lam
    diff = centers[:, None] - centers[None, :]
    # Overlap of unit Gaussians (variance sigma^2) displaced by a and b.
    s_kl = np.exp(-(diff ** 2) / (8.0 * cfg.sigma ** 2))
    cc = np.outer(c, c.conj())

    norm = float(np.real(np.sum(cc * s_kl)))
    if norm < _PROB_UNDERFLOW:
        raise PostSelectionOrthogonal("post-selection probability underflow")
    mean_x = float(np.real(np.sum(cc * s_kl * (centers[:, None] + centers[None, :]) / 2.0))) / norm
    mean_p = float(np.real(np.sum(cc * s_kl * (-1j * diff / (4.0 * cfg.sigma ** 2))))) / norm
    prob = norm / float((np.linalg.norm(post) ** 2) * (np.linalg.norm(pre) ** 2))
    return PointerOutcome(
        mean_position_shift=mean_x,
        mean_momentum_shift=mean_p,
        postselection_probability=prob,
    )


def simulate_joint(post, pre, op1, op2, g1: float, g2: float,
                   cfg: PointerConfig) -> PointerOutcome:
    """Single-ancilla coupling to g1*O1 + g2*O2 (unit overall coupling)."""
    combined = g1 * as_cmatrix(op1) + g2 * as_cmatrix(op2)
    return simulate(post, pre, combined, PointerConfig(sigma=cfg.sigma, g=1.0))


@dataclass(frozen=True)
class ConvergenceRow:
    g: float
    shift: float
    shift_over_g: float
    error: float  # |shift/g - Re(weak value)|


def weak_limit_check(post, pre, operator, cfg: PointerConfig,
                     g_ladder) -> list[ConvergenceRow]:
    """Pointer shift vs weak value over a decreasing ladder of couplings."""
    gs = [float(g) for g in g_ladder]
    if any(g <= 0 for g in gs) or any(b >= a for a, b in zip(gs, gs[1:])):
        raise ValueError("g ladder must be strictly decreasing and positive")
    w = weak_value(post, pre, operator)
    rows = []
    for g in gs:
        out = simulate(post, pre, operator, PointerConfig(sigma=cfg.sigma, g=g))
        ratio = out.mean_position_shift / g
        rows.append(ConvergenceRow(g=g, shift=out.mean_position_shift,
                                   shift_over_g=ratio, error=abs(ratio - w.real)))
    return rows
