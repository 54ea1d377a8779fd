import numpy as np
import pytest

from cheshire.linalg import BlockSpace
from cheshire.problem import (
    Observable,
    SeparationProblem,
    TargetPattern,
    delta_target,
    validate,
)
from cheshire.scenarios import example_one


def test_delta_target_two_blocks():
    t = delta_target(2)
    np.testing.assert_array_equal(t.rows, np.eye(2))


def test_delta_target_four_blocks_identity_pattern():
    t = delta_target(4)
    np.testing.assert_array_equal(t.rows, np.eye(4))


def test_delta_target_complex_amplitude():
    t = delta_target(1, [2 + 1j])
    np.testing.assert_array_equal(t.rows, [[2 + 1j]])


def test_delta_target_identity_for_all_m():
    for m in range(1, 7):
        np.testing.assert_array_equal(delta_target(m).rows, np.eye(m))


def test_delta_target_rejects_zero_amplitude():
    with pytest.raises(ValueError, match="nonzero"):
        delta_target(2, [1, 0])


def test_validate_builtin_is_clean():
    assert validate(example_one().problem) == []


def test_validate_dimension_mismatch():
    space = BlockSpace(("p1",), (2,))
    problem = SeparationProblem(
        space=space,
        observables=(Observable("o", np.eye(3)),),
        target=TargetPattern(np.array([[1.0]])),
    )
    violations = validate(problem)
    assert len(violations) == 1
    assert "3-dim" in violations[0] and "dim 2" in violations[0]


def test_validate_degenerate_target():
    space = BlockSpace(("p1",), (2,))
    problem = SeparationProblem(
        space=space,
        observables=(Observable("o", np.eye(2)),),
        target=TargetPattern(np.zeros((1, 1))),
    )
    violations = validate(problem)
    assert any("zero" in v for v in violations)


def test_validate_is_order_stable():
    space = BlockSpace(("p1",), (2,))
    problem = SeparationProblem(
        space=space,
        observables=(Observable("o", np.eye(3)),),
        target=TargetPattern(np.zeros((1, 1))),
    )
    assert validate(problem) == validate(problem)


def test_observable_must_be_square():
    with pytest.raises(ValueError, match="square"):
        Observable("bad", np.ones((2, 3)))
