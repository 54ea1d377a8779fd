import numpy as np
import pytest

import cheshire as ch
from cheshire.criterion import build_M, solve_all_blocks
from cheshire.factorize import BlockStatus
from cheshire.problem import validate
from cheshire.scenarios import (
    BUILTIN_SCENARIOS,
    entangled_pair,
    example_one,
    example_two,
    random_scenario,
)

VALID_TAGS = {"PUBLISHED", "DERIVED", "TRIVIAL"}


@pytest.mark.parametrize("name", sorted(BUILTIN_SCENARIOS))
def test_builtins_validate_clean(name):
    scenario = BUILTIN_SCENARIOS[name]()
    assert validate(scenario.problem) == []
    assert all(e.tag in VALID_TAGS for e in scenario.expected.values())


class TestExampleOne:
    def test_expected_rank(self):
        scenario = example_one()
        coeff = build_M([o.matrix for o in scenario.problem.observables])
        assert ch.rank(coeff.matrix) == scenario.expected["rank_M"].value

    def test_reference_verifies(self):
        scenario = example_one()
        sel = _reference_selection(scenario)
        report = ch.verify_disembodiment(sel, scenario.problem)
        assert report.pattern_ok == scenario.expected["reference_pattern_ok"].value
        np.testing.assert_allclose(
            report.weak_values,
            scenario.expected["weak_value_table"].value,
            atol=1e-12,
        )
        assert report.overlap == pytest.approx(
            scenario.expected["reference_overlap"].value
        )

    def test_solves(self):
        scenario = example_one()
        report = ch.solve_problem(scenario.problem)
        assert report.solved == scenario.expected["all_blocks_solved"].value


class TestExampleTwo:
    def test_det_and_rank(self):
        scenario = example_two()
        coeff = build_M([o.matrix for o in scenario.problem.observables])
        det = np.linalg.det(coeff.matrix)
        assert det == pytest.approx(scenario.expected["det_M"].value, abs=1e-10)
        assert ch.rank(coeff.matrix) == scenario.expected["rank_M"].value

    def test_unique_solutions(self):
        scenario = example_two()
        verdicts = solve_all_blocks(scenario.problem)
        np.testing.assert_allclose(
            verdicts[2].solution.particular,
            scenario.expected["path3_solution"].value,
            atol=1e-10,
        )

    def test_rank1_residuals(self):
        scenario = example_two()
        report = ch.solve_problem(scenario.problem)
        residuals = np.array([f.residual for f in report.factors])
        np.testing.assert_allclose(
            residuals, scenario.expected["rank1_residuals"].value, atol=1e-12
        )

    def test_reference_fails_with_leaking_sigma_x(self):
        scenario = example_two()
        sel = _reference_selection(scenario)
        report = ch.verify_disembodiment(sel, scenario.problem)
        assert not report.pattern_ok
        assert report.weak_values[0, 1] == pytest.approx(
            scenario.expected["reference_sx_path1_weak_value"].value, abs=1e-12
        )


class TestEntangledPair:
    def test_compressed_matrix_reproduced(self):
        scenario = entangled_pair()
        coeff = build_M([o.matrix for o in scenario.problem.observables])
        compressed, _ = coeff.compressed()
        np.testing.assert_array_equal(
            compressed, scenario.expected["compressed_M"].value
        )

    def test_row_dependencies_exactly_zero(self):
        scenario = entangled_pair()
        compressed = scenario.expected["compressed_M"].value
        for idx, coeffs in (
            ((0, 1, 2, 3), (1, 1, -1, -1)),
            ((4, 5, 6, 7), (1, 1, 1, 1)),
        ):
            combo = sum(c * compressed[i] for i, c in zip(idx, coeffs))
            np.testing.assert_array_equal(combo, np.zeros(8))

    @pytest.mark.parametrize("target,solved", [("minus", True), ("plus", False)])
    def test_feasibility_split(self, target, solved):
        scenario = entangled_pair(target)
        report = ch.solve_problem(scenario.problem)
        assert report.solved == solved

    def test_opposite_polarization_signs(self):
        scenario = entangled_pair("minus")
        report = ch.solve_problem(scenario.problem)
        wv = ch.verify_disembodiment(report.selection, scenario.problem)
        labels = [o.label for o in scenario.problem.observables]
        w_first = wv.weak_values[0, labels.index("s1A")]
        w_last = wv.weak_values[0, labels.index("s4B")]
        assert w_first.real * w_last.real < 0

    def test_bad_target_name(self):
        with pytest.raises(ValueError):
            entangled_pair("sideways")


class TestRandomScenario:
    def test_deterministic(self):
        a = random_scenario(17, p_blocks=3, n=2, q=3)
        b = random_scenario(17, p_blocks=3, n=2, q=3)
        np.testing.assert_array_equal(a.problem.target.rows, b.problem.target.rows)
        for oa, ob in zip(a.problem.observables, b.problem.observables):
            np.testing.assert_array_equal(oa.matrix, ob.matrix)

    def test_planted_solves(self):
        scenario = random_scenario(5, p_blocks=2, n=2, q=2, planted=True)
        report = ch.solve_problem(scenario.problem, ch.SearchConfig(seed=5))
        assert report.solved

    def test_overdetermined_random_targets_infeasible(self):
        # q > n^2 makes random targets generically unsolvable.
        infeasible = 0
        for seed in range(10):
            scenario = random_scenario(seed, p_blocks=1, n=1, q=4, planted=False)
            verdicts = solve_all_blocks(scenario.problem)
            infeasible += not verdicts[0].feasible
        assert infeasible == 10

    def test_bounds_enforced(self):
        with pytest.raises(ValueError, match="bounds"):
            random_scenario(0, p_blocks=5)


def _reference_selection(scenario):
    space = scenario.problem.space
    return ch.SelectionPair(
        pre=ch.BlockedState.from_flat(space, scenario.reference_pre),
        post=ch.BlockedState.from_flat(space, scenario.reference_post),
        overlap=complex(scenario.reference_post @ scenario.reference_pre),
    )
