"""Complex linear algebra substrate and block-structured state spaces.

All vectors and matrices are plain numpy complex128 arrays. Post-selection
states are stored as co-vectors whose entries pair *bilinearly* with kets
(no conjugation in :func:`inner`); use :func:`covector_from_ket` to convert
a ket into its co-vector.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DEFAULT_RANK_TOL = 1e-10


def as_cvector(v) -> np.ndarray:
    """Coerce input to a finite 1-d complex128 array."""
    arr = np.asarray(v, dtype=np.complex128)
    if arr.ndim != 1:
        raise ValueError(f"expected a 1-d vector, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("vector contains non-finite entries")
    return arr


def as_cmatrix(m) -> np.ndarray:
    """Coerce input to a finite 2-d complex128 array."""
    arr = np.asarray(m, dtype=np.complex128)
    if arr.ndim != 2:
        raise ValueError(f"expected a 2-d matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("matrix contains non-finite entries")
    return arr


def inner(bra, ket) -> complex:
    """Bilinear pairing sum_k bra_k * ket_k (no conjugation).

    The bra argument is a co-vector: its entries are used as stored.
    """
    b = as_cvector(bra)
    k = as_cvector(ket)
    if b.shape != k.shape:
        raise ValueError(f"dimension mismatch: {b.shape[0]} vs {k.shape[0]}")
    return complex(np.dot(b, k))


def covector_from_ket(ket) -> np.ndarray:
    """Entry-wise conjugation: the co-vector representing <ket|."""
    return np.conj(as_cvector(ket))


def svd_singular_values(m) -> np.ndarray:
    """Singular values of m in nonincreasing order."""
    return np.linalg.svd(as_cmatrix(m), compute_uv=False)


def rank(m, rel_tol: float = DEFAULT_RANK_TOL) -> int:
    """Numerical rank: singular values above rel_tol * sigma_max."""
    if rel_tol <= 0:
        raise ValueError("rel_tol must be positive")
    s = svd_singular_values(m)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.count_nonzero(s > rel_tol * s[0]))


def tensor(a, b) -> np.ndarray:
    """Kronecker product with a-index major (row-major convention)."""
    return np.kron(as_cmatrix(a), as_cmatrix(b))


@dataclass(frozen=True)
class BlockSpace:
    """Direct sum of labeled blocks (paths / path configurations)."""

    labels: tuple[str, ...]
    dims: tuple[int, ...]

    def __post_init__(self):
        if len(self.labels) != len(self.dims) or not self.labels:
            raise ValueError("labels and dims must be nonempty and equal length")
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("block labels must be unique")
        if any(d < 1 for d in self.dims):
            raise ValueError("block dimensions must be >= 1")

    @property
    def num_blocks(self) -> int:
        return len(self.dims)

    @property
    def total_dim(self) -> int:
        return sum(self.dims)

    def offset(self, block_index: int) -> int:
        if not 0 <= block_index < self.num_blocks:
            raise IndexError(f"block index {block_index} out of range")
        return sum(self.dims[:block_index])

    def block_slice(self, block_index: int) -> slice:
        off = self.offset(block_index)
        return slice(off, off + self.dims[block_index])


def embed_block_operator(op, block_index: int, space: BlockSpace) -> np.ndarray:
    """Embed a per-block operator into the total space (zero elsewhere)."""
    o = as_cmatrix(op)
    if o.shape[0] != o.shape[1]:
        raise ValueError("block operator must be square")
    sl = space.block_slice(block_index)
    if o.shape[0] != space.dims[block_index]:
        raise ValueError(
            f"operator dim {o.shape[0]} != block dim {space.dims[block_index]}"
        )
    total = np.zeros((space.total_dim, space.total_dim), dtype=np.complex128)
    total[sl, sl] = o
    return total


class BlockedState:
    """A state split into per-block components on a BlockSpace.

    Used both for pre-selection kets and post-selection co-vectors; the
    interpretation is fixed by the caller, the storage is identical.
    """

    def __init__(self, space: BlockSpace, components):
        comps = tuple(as_cvector(c) for c in components)
        if len(comps) != space.num_blocks:
            raise ValueError("one component per block required")
        for c, d in zip(comps, space.dims):
            if c.shape[0] != d:
                raise ValueError(f"component dim {c.shape[0]} != block dim {d}")
        if all(np.all(c == 0) for c in comps):
            raise ValueError("blocked state must not be identically zero")
        self.space = space
        self.components = comps

    @classmethod
    def from_flat(cls, space: BlockSpace, flat) -> "BlockedState":
        v = as_cvector(flat)
        if v.shape[0] != space.total_dim:
            raise ValueError(f"flat dim {v.shape[0]} != total dim {space.total_dim}")
        return cls(space, [v[space.block_slice(i)] for i in range(space.num_blocks)])

    def to_flat(self) -> np.ndarray:
        return np.concatenate(self.components)

    def __repr__(self):
        return f"BlockedState({self.to_flat()!r})"
