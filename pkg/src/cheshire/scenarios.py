"""Built-in worked scenarios and random generators for property tests.

Each built-in carries an ``expected`` table of checkable facts; every entry
is tagged with its provenance ("PUBLISHED" for published values, "DERIVED" for
values recomputed with an independent oracle, "TRIVIAL" for direct reads).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .linalg import BlockSpace
from .problem import Observable, SeparationProblem, TargetPattern, delta_target

PAULI_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)
IDENTITY_2 = np.eye(2, dtype=np.complex128)


@dataclass(frozen=True)
class Expectation:
    value: object
    tag: str  # PUBLISHED | DERIVED | TRIVIAL


@dataclass(frozen=True)
class NamedScenario:
    name: str
    problem: SeparationProblem
    reference_pre: np.ndarray | None = None
    reference_post: np.ndarray | None = None
    expected: dict = field(default_factory=dict)


def example_one() -> NamedScenario:
    """Photon number vs polarization-z in two paths (original Cheshire-cat case)."""
    space = BlockSpace(labels=("path1", "path2"), dims=(2, 2))
    problem = SeparationProblem(
        space=space,
        observables=(Observable("n", IDENTITY_2), Observable("sz", PAULI_Z)),
        target=delta_target(2),
        name="cheshire",
    )
    return NamedScenario(
        name="cheshire",
        problem=problem,
        reference_post=np.array([0.5, 0.5, 0.5, 0.5], dtype=np.complex128),
        reference_pre=np.array([0.5, 0.5, 0.5, -0.5], dtype=np.complex128),
        expected={
            "rank_M": Expectation(2, "PUBLISHED"),
            "all_blocks_feasible": Expectation(True, "PUBLISHED"),
            "all_blocks_solved": Expectation(True, "PUBLISHED"),
            # Weak values on the reference selection, [block][observable].
            "weak_value_table": Expectation(np.eye(2, dtype=complex), "DERIVED"),
            "reference_pattern_ok": Expectation(True, "DERIVED"),
            "reference_overlap": Expectation(0.5 + 0j, "DERIVED"),
        },
    )


def example_two() -> NamedScenario:
    """Photon number plus all three Pauli axes in four paths.

    The linear stage is uniquely solvable (det M = -4i) but none of the
    unique per-path solutions factors into a product, so the pipeline must
    report RANK1_NOT_FOUND everywhere and the quoted reference states fail
    the pattern check (sigma-x acquires weak value 1/2 in path 1).
    """
    space = BlockSpace(labels=("path1", "path2", "path3", "path4"), dims=(2, 2, 2, 2))
    problem = SeparationProblem(
        space=space,
        observables=(
            Observable("n", IDENTITY_2),
            Observable("sx", PAULI_X),
            Observable("sy", PAULI_Y),
            Observable("sz", PAULI_Z),
        ),
        target=delta_target(4),
        name="four-pauli",
    )
    return NamedScenario(
        name="four-pauli",
        problem=problem,
        reference_post=np.ones(8, dtype=np.complex128),
        reference_pre=np.array([1, 1, 1, 1, 1j, -1j, 1, -1], dtype=np.complex128),
        expected={
            "det_M": Expectation(-4j, "PUBLISHED"),
            "rank_M": Expectation(4, "PUBLISHED"),
            # Unique path-3 solution, flat (k*n+l) indexing.
            "path3_solution": Expectation(
                np.array([0, 0.5j, -0.5j, 0], dtype=complex), "PUBLISHED"
            ),
            "path1_solution": Expectation(
                np.array([0.5, 0, 0, 0.5], dtype=complex), "PUBLISHED"
            ),
            "all_blocks_feasible": Expectation(True, "PUBLISHED"),
            "rank1_found_any": Expectation(False, "DERIVED"),
            "rank1_residuals": Expectation(np.ones(4), "DERIVED"),
            "reference_pattern_ok": Expectation(False, "DERIVED"),
            "reference_sx_path1_weak_value": Expectation(0.5 + 0j, "DERIVED"),
        },
    )


# Diagonals of the eight two-photon observables on the 8-dim basis
# {|1H3V>, |1H4V>, |1V3H>, |1V4H>, |2H3V>, |2H4V>, |2V3H>, |2V4H>}.
_PAIR_DIAGONALS = {
    "n1A": [1, 1, 1, 1, 0, 0, 0, 0],
    "n2A": [0, 0, 0, 0, 1, 1, 1, 1],
    "n3B": [1, 0, 1, 0, 1, 0, 1, 0],
    "n4B": [0, 1, 0, 1, 0, 1, 0, 1],
    "s1A": [1, 1, -1, -1, 0, 0, 0, 0],
    "s2A": [0, 0, 0, 0, 1, 1, -1, -1],
    "s3B": [-1, 0, 1, 0, -1, 0, 1, 0],
    "s4B": [0, -1, 0, 1, 0, -1, 0, 1],
}

ENTANGLED_TARGET_MINUS = np.array([1, 0, 0, 1, 1, 0, 0, -1], dtype=np.complex128)
ENTANGLED_TARGET_PLUS = np.array([1, 0, 0, 1, 1, 0, 0, 1], dtype=np.complex128)


def entangled_pair(target: str = "minus") -> NamedScenario:
    """Polarization-entangled photon pair, one 8-dim block, 8 diagonal observables.

    target="minus" asks opposite polarization correlations in the two
    occupied path pairs (achievable); target="plus" asks equal signs
    (linearly infeasible).
    """
    if target not in ("minus", "plus"):
        raise ValueError("target must be 'minus' or 'plus'")
    e = ENTANGLED_TARGET_MINUS if target == "minus" else ENTANGLED_TARGET_PLUS
    space = BlockSpace(labels=("pair",), dims=(8,))
    observables = tuple(
        Observable(label, np.diag(np.asarray(d, dtype=np.complex128)))
        for label, d in _PAIR_DIAGONALS.items()
    )
    problem = SeparationProblem(
        space=space,
        observables=observables,
        target=TargetPattern(e.reshape(1, -1)),
        name=f"entangled-{target}",
    )
    compressed = np.array(list(_PAIR_DIAGONALS.values()), dtype=np.complex128)
    return NamedScenario(
        name=f"entangled-{target}",
        problem=problem,
        expected={
            "compressed_M": Expectation(compressed, "PUBLISHED"),
            # Row dependencies of the compressed matrix.
            "row_dependency_sums_zero": Expectation(
                ((0, 1, 2, 3), (1, 1, -1, -1), (4, 5, 6, 7), (1, 1, 1, 1)), "TRIVIAL"
            ),
            "feasible": Expectation(target == "minus", "PUBLISHED"),
            "solved": Expectation(target == "minus", "PUBLISHED"),
            # The two targeted polarization weak values carry opposite signs.
            "opposite_polarization_signs": Expectation(target == "minus", "PUBLISHED"),
        },
    )


def random_scenario(seed: int, p_blocks: int = 2, n: int = 2, q: int = 2,
                    planted: bool = True) -> NamedScenario:
    """Small random instance; when planted, a product solution is guaranteed."""
    if not (1 <= p_blocks <= 4 and 1 <= n <= 3 and 1 <= q <= 4):
        raise ValueError("bounds: p_blocks <= 4, n <= 3, q <= 4")
    rng = np.random.default_rng(seed)

    def cnormal(*shape):
        return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)

    observables = tuple(
        Observable(f"O{j}", cnormal(n, n)) for j in range(q)
    )
    space = BlockSpace(
        labels=tuple(f"block{b}" for b in range(p_blocks)),
        dims=(n,) * p_blocks,
    )
    rows = np.zeros((p_blocks, q), dtype=np.complex128)
    if planted:
        for b in range(p_blocks):
            for _ in range(100):
                x = cnormal(n)
                x /= np.linalg.norm(x)
                y = cnormal(n)
                e_row = np.array([x @ o.matrix @ y for o in observables])
                if np.min(np.abs(e_row)) > 1e-3:
                    rows[b] = e_row
                    break
            else:  # pragma: no cover - vanishingly unlikely
                raise RuntimeError("failed to plant a well-separated target")
    else:
        rows = cnormal(p_blocks, q)
    problem = SeparationProblem(
        space=space,
        observables=observables,
        target=TargetPattern(rows),
        name=f"random-{seed}",
    )
    return NamedScenario(
        name=problem.name,
        problem=problem,
        expected={"planted": Expectation(planted, "TRIVIAL")},
    )


BUILTIN_SCENARIOS = {
    "cheshire": example_one,
    "four-pauli": example_two,
    "entangled-minus": lambda: entangled_pair("minus"),
    "entangled-plus": lambda: entangled_pair("plus"),
}
