#tests/test_evolution.py
"""
Implicit Euler, the discrete Duhamel split and the mild formula.

Usage:
    pytest tests/test_evolution.py
"""

import math

import numpy as np
import pytest

from src.accretive.banach import TimeGrid, norm
from src.accretive.errors import DimensionMismatchError, GridMismatchError, InvalidParameterError
from src.accretive.evolution import (
    ForcingTerm,
    compare_euler_duhamel,
    discrete_duhamel_decompose,
    implicit_euler,
    l1_stability,
    mild_duhamel,
)
from src.accretive.operators import AbsSubdifferential, LinearMatrix, LinearScalar, WeightedPLaplace1D, ZeroOperator
from src.accretive.semigroup import SemigroupEvaluator, exponential_formula

SPECS = [
    (LinearScalar(a=1.0), [0.8]),
    (LinearMatrix(matrix=np.array([[2.0, -1.0], [-1.0, 2.0]])), [1.0, -0.5]),
    (AbsSubdifferential(), [0.6, -0.2, 0.0]),
    (WeightedPLaplace1D(p=3.0, dim=6), [0.2, -0.1, 0.4, 0.0, 0.1, -0.3]),
]
SPEC_IDS = ["scalar", "matrix", "abs", "plaplace"]


def _wavy_forcing(dim, grid):
    phases = np.arange(dim)
    return ForcingTerm.sample(lambda t: 1.5 * np.sin(4.0 * t + phases), grid)


class TestForcingTerm:
    def test_sample_count_must_match_grid(self):
        with pytest.raises(DimensionMismatchError):
            ForcingTerm(TimeGrid(1.0, 4), np.zeros((3, 1)))

    def test_value_at_prefers_the_source(self):
        grid = TimeGrid(1.0, 4)
        f = ForcingTerm.sample(lambda t: [t], grid)
        assert f.value_at(0.3)[0] == pytest.approx(0.3)
        plain = ForcingTerm(grid, f.samples)
        assert plain.value_at(0.3)[0] == pytest.approx(0.25)

    def test_l1_norm_is_a_left_sum(self):
        f = ForcingTerm.sample(lambda t: [t], TimeGrid(1.0, 4))
        assert f.l1_norm() == pytest.approx(0.25 * (0.0 + 0.25 + 0.5 + 0.75))


class TestImplicitEuler:
    def test_linear_scalar_against_closed_form(self):
        grid = TimeGrid(1.0, 1000)
        u = implicit_euler(LinearScalar(a=1.0), [0.0], ForcingTerm.constant([1.0], grid), grid)
        exact = 1.0 - np.exp(-grid.nodes)
        assert np.max(np.abs(u.values[:, 0] - exact)) <= 5e-3

    def test_zero_operator_integrates_the_forcing(self):
        grid = TimeGrid(2.0, 8)
        u = implicit_euler(ZeroOperator(), [1.0], ForcingTerm.constant([2.0], grid), grid)
        np.testing.assert_allclose(u.values[:, 0], 1.0 + 2.0 * grid.nodes, atol=1e-14)

    def test_grid_and_dimension_checks(self):
        grid = TimeGrid(1.0, 10)
        with pytest.raises(GridMismatchError):
            implicit_euler(LinearScalar(), [0.0], ForcingTerm.constant([1.0], TimeGrid(1.0, 20)), grid)
        with pytest.raises(DimensionMismatchError):
            implicit_euler(LinearScalar(), [0.0, 1.0], ForcingTerm.constant([1.0], grid), grid)


    @pytest.mark.parametrize("spec,u0", SPECS, ids=SPEC_IDS)
    def test_homogeneous_run_is_the_exponential_formula(self, spec, u0):
        grid = TimeGrid(0.8, 32)
        run = implicit_euler(spec, u0, ForcingTerm.zeros(grid, len(u0)), grid)
        expected = exponential_formula(spec, grid.horizon, u0, grid.steps).components
        np.testing.assert_allclose(run.values[-1], expected, atol=1e-10)

    @pytest.mark.parametrize("spec,u0", SPECS, ids=SPEC_IDS)
    def test_distance_to_the_free_run_grows_by_at_most_the_forcing(self, spec, u0):
        grid = TimeGrid(1.0, 40)
        f = _wavy_forcing(len(u0), grid)
        forced = implicit_euler(spec, u0, f, grid)
        free = implicit_euler(spec, u0, ForcingTerm.zeros(grid, len(u0)), grid)
        gaps = (forced - free).node_norms()
        pushes = grid.step * norm(f.samples[:-1], forced.norm)
        assert np.all(gaps[1:] <= gaps[:-1] + pushes + 1e-9)

    @pytest.mark.parametrize("spec,u0", SPECS, ids=SPEC_IDS)
    def test_states_stay_bounded_by_data_and_forcing(self, spec, u0):
        grid = TimeGrid(1.0, 40)
        f = _wavy_forcing(len(u0), grid)
        run = implicit_euler(spec, u0, f, grid)
        budget = norm(np.asarray(u0, dtype=float), run.norm) + np.concatenate(
            [[0.0], np.cumsum(grid.step * norm(f.samples[:-1], run.norm))])
        assert np.all(run.node_norms() <= budget + 1e-8)


class TestDuhamelDecomposition:
    @pytest.mark.parametrize("spec,u0", [
        (LinearScalar(a=1.0), [1.0]),
        (LinearMatrix(matrix=np.array([[2.0, -1.0], [-1.0, 2.0]])), [1.0, -1.0]),
        (AbsSubdifferential(), [0.3]),
        (WeightedPLaplace1D(p=3.0, dim=6), [0.2, -0.1, 0.4, 0.0, 0.1, -0.3]),
    ], ids=["scalar", "matrix", "abs", "plaplace"])
    def test_telescoping_is_exact(self, spec, u0):
        grid = TimeGrid(1.0, 16)
        f = ForcingTerm.constant(np.full(len(u0), 0.5), grid)
        split = discrete_duhamel_decompose(spec, u0, f, grid)
        assert split.telescoping_defect() <= 1e-11

    def test_linear_case_has_no_linearity_gap(self):
        grid = TimeGrid(1.0, 16)
        split = discrete_duhamel_decompose(LinearScalar(a=1.0), [1.0], ForcingTerm.constant([1.0], grid), grid)
        assert split.linearity_gap() <= 1e-12

    def test_local_errors_and_residual_for_the_scalar_problem(self):
        grid = TimeGrid(1.0, 20)
        lam = grid.step
        split = discrete_duhamel_decompose(LinearScalar(a=1.0), [0.0], ForcingTerm.constant([1.0], grid), grid)
        np.testing.assert_allclose(split.local_error_norms(), lam / (1.0 + lam), rtol=1e-12)
        expected = lam * (1.0 - (1.0 + lam) ** -grid.steps)
        assert np.max(split.residual_norms()) == pytest.approx(expected, rel=1e-10)

    def test_residual_is_first_order(self):
        peaks = []
        for n in (20, 40):
            grid = TimeGrid(1.0, n)
            split = discrete_duhamel_decompose(LinearScalar(a=1.0), [0.0], ForcingTerm.constant([1.0], grid), grid)
            peaks.append(np.max(split.residual_norms()))
        assert 0.4 <= peaks[1] / peaks[0] <= 0.6


    @pytest.mark.parametrize("spec,u0", SPECS, ids=SPEC_IDS)
    def test_local_errors_are_bounded_by_the_forcing(self, spec, u0):
        grid = TimeGrid(1.0, 24)
        f = _wavy_forcing(len(u0), grid)
        split = discrete_duhamel_decompose(spec, u0, f, grid)
        limits = grid.step * norm(f.samples[:-1], split.norm)
        assert np.all(split.local_error_norms() <= limits + 1e-9)


class TestMildDuhamel:
    def test_zero_operator_example(self):
        grid = TimeGrid(1.0, 10)
        value = mild_duhamel(ZeroOperator(), [0.0], ForcingTerm.constant([2.0], grid), 0.5, 10)
        np.testing.assert_allclose(value.components, [1.0])

    def test_linear_scalar_against_closed_form(self):
        grid = TimeGrid(1.0, 10)
        ev = SemigroupEvaluator(LinearScalar(a=1.0), tolerance=1e-5)
        value = mild_duhamel(LinearScalar(a=1.0), [0.0], ForcingTerm.constant([1.0], grid), 1.0, 400, ev)
        assert value.components[0] == pytest.approx(1.0 - math.exp(-1.0), abs=5e-3)

    def test_time_zero_and_invalid_arguments(self):
        grid = TimeGrid(1.0, 10)
        f = ForcingTerm.constant([1.0], grid)
        np.testing.assert_array_equal(mild_duhamel(LinearScalar(), [0.5], f, 0.0, 4).components, [0.5])
        with pytest.raises(InvalidParameterError):
            mild_duhamel(LinearScalar(), [0.5], f, 2.0, 4)
        with pytest.raises(InvalidParameterError):
            mild_duhamel(LinearScalar(), [0.5], f, 0.5, 0)


class TestCompareEulerDuhamel:
    def test_discrepancy_is_small(self):
        grid = TimeGrid(1.0, 200)
        ev = SemigroupEvaluator(LinearScalar(a=1.0), tolerance=1e-4)
        report = compare_euler_duhamel(LinearScalar(a=1.0), [0.0], ForcingTerm.constant([1.0], grid), grid, 400,
                                       evaluator=ev, nodes=[0, 100, 200], measure_order=True)
        assert report.discrepancy <= 2e-2
        assert [row.node for row in report.nodes] == [0, 100, 200]
        assert report.coarse_discrepancy is not None

    def test_additive_formula_misses_the_nonlinear_limit(self):
        # u' + sign(u) = 1/2 from u = 1: Euler gives 1 - t/2, the additive formula 1 - t + (t - 1/2)^2/2 past t = 1/2
        grid = TimeGrid(1.0, 400)
        ev = SemigroupEvaluator(AbsSubdifferential(), tolerance=1e-8)
        report = compare_euler_duhamel(AbsSubdifferential(), [1.0], ForcingTerm.constant([0.5], grid), grid, 400,
                                       evaluator=ev, nodes=[100, 200, 300, 400], measure_order=True)
        final = report.nodes[-1]
        assert final.euler[0] == pytest.approx(0.5, abs=1e-12)
        assert final.mild[0] == pytest.approx(0.124375, abs=1e-9)
        assert report.discrepancy == pytest.approx(0.375625, abs=1e-9)
        assert report.coarse_discrepancy == pytest.approx(0.37625, abs=1e-9)

    def test_linear_gap_shrinks_with_the_grid(self):
        ev = SemigroupEvaluator(LinearScalar(a=1.0), tolerance=1e-5)
        gaps = []
        for n in (50, 200):
            grid = TimeGrid(1.0, n)
            report = compare_euler_duhamel(LinearScalar(a=1.0), [0.0], ForcingTerm.constant([1.0], grid), grid,
                                           2 * n, evaluator=ev, nodes=[n])
            gaps.append(report.discrepancy)
        assert gaps[1] < 0.5 * gaps[0]
        assert gaps[1] <= 2e-2

    def test_threads_do_not_change_the_result(self):
        grid = TimeGrid(1.0, 40)
        f = ForcingTerm.constant([1.0], grid)
        ev = SemigroupEvaluator(LinearScalar(a=1.0), tolerance=1e-4)
        serial = compare_euler_duhamel(LinearScalar(a=1.0), [0.0], f, grid, 40, evaluator=ev, nodes=[10, 20, 40])
        pooled = compare_euler_duhamel(LinearScalar(a=1.0), [0.0], f, grid, 40, evaluator=ev, nodes=[10, 20, 40],
                                       threads=3)
        assert serial.discrepancy == pooled.discrepancy
        assert [row.node for row in pooled.nodes] == [10, 20, 40]


class TestL1Stability:
    @pytest.mark.parametrize("spec", [LinearScalar(a=1.0), AbsSubdifferential(), ZeroOperator()],
                             ids=["scalar", "abs", "zero"])
    def test_change_is_bounded_by_the_perturbation(self, spec):
        grid = TimeGrid(1.0, 50)
        f = ForcingTerm.sample(lambda t: [math.sin(3.0 * t)], grid)
        g = ForcingTerm.constant([0.5], grid)
        report = l1_stability(spec, [0.2], f, g, grid)
        assert report.holds
        assert report.perturbation_l1 == pytest.approx(0.5)
