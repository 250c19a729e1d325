#tests/test_semigroup.py
"""
Exponential formula and the adaptive semigroup evaluator.

Usage:
    pytest tests/test_semigroup.py
"""

import math

import numpy as np
import pytest

from src.accretive.banach import NormKind, norm
from src.accretive.errors import InvalidParameterError
from src.accretive.operators import AbsSubdifferential, LinearMatrix, LinearScalar, WeightedPLaplace1D
from src.accretive.semigroup import SemigroupEvaluator, exponential_formula, semigroup, semigroup_batch
from scipy.linalg import expm


class TestExponentialFormula:
    def test_four_steps(self):
        value = exponential_formula(LinearScalar(a=1.0), 1.0, [1.0], 4).components[0]
        assert value == pytest.approx(0.4096)

    def test_error_decreases_monotonically(self):
        spec = LinearScalar(a=1.0)
        errors = [abs(exponential_formula(spec, 1.0, [1.0], n).components[0] - math.exp(-1.0))
                  for n in (16, 64, 256, 1024, 4096)]
        assert all(later < earlier for earlier, later in zip(errors, errors[1:]))
        assert errors[-1] < 1e-3

    def test_abs_shrinkage_is_exact(self):
        x = np.array([1.0, -0.3, 0.2, -2.0])
        value = exponential_formula(AbsSubdifferential(), 0.5, x, 64).components
        expected = np.sign(x) * np.maximum(np.abs(x) - 0.5, 0.0)
        np.testing.assert_allclose(value, expected, atol=1e-12)

    def test_zero_time_returns_the_state(self):
        np.testing.assert_array_equal(exponential_formula(LinearScalar(), 0.0, [3.0], 8).components, [3.0])

    @pytest.mark.parametrize("spec,dim", [
        (AbsSubdifferential(), 4),
        (LinearMatrix(matrix=np.array([[1.0, 3.0], [-3.0, 1.0]])), 2),
        (WeightedPLaplace1D(p=3.0, dim=6), 6),
    ], ids=["abs", "skewed", "plaplace"])
    def test_contraction(self, spec, dim, rng):
        kind = NormKind.l2()
        for _ in range(10):
            x, y = rng.uniform(-1.0, 1.0, size=(2, dim))
            gap = exponential_formula(spec, 0.6, x, 32).components - exponential_formula(spec, 0.6, y, 32).components
            assert norm(gap, kind) <= norm(x - y, kind) + 1e-8

    def test_semigroup_law_at_fine_resolution(self):
        spec = LinearScalar(a=1.0)
        t, s, n = 0.4, 0.7, 4096
        direct = exponential_formula(spec, t + s, [1.5], n).components
        composed = exponential_formula(spec, t, exponential_formula(spec, s, [1.5], n).components, n).components
        assert abs(direct[0] - composed[0]) <= 1e-3

    @pytest.mark.parametrize("t,n", [(-0.1, 4), (1.0, 0), (1.0, 2.5)])
    def test_invalid_arguments(self, t, n):
        with pytest.raises(InvalidParameterError):
            exponential_formula(LinearScalar(), t, [1.0], n)


class TestSemigroupEvaluator:
    def test_adaptive_value_and_estimate(self):
        result = semigroup(SemigroupEvaluator(LinearScalar(a=1.0), tolerance=1e-4), 1.0, [1.0])
        assert result.converged
        assert result.error_estimate < 1e-4
        assert result.value.components[0] == pytest.approx(math.exp(-1.0), abs=1e-3)

    def test_matrix_generator_matches_expm(self):
        M = np.array([[2.0, -1.0], [-1.0, 2.0]])
        result = semigroup(SemigroupEvaluator(LinearMatrix(matrix=M), tolerance=1e-5), 0.5, [1.0, 0.0])
        np.testing.assert_allclose(result.value.components, expm(-0.5 * M) @ [1.0, 0.0], atol=1e-3)

    def test_doubling_limit_is_flagged_not_raised(self):
        ev = SemigroupEvaluator(LinearScalar(a=1.0), initial_steps=2, max_doublings=0)
        result = semigroup(ev, 1.0, [1.0])
        assert not result.converged
        assert result.steps == 2

    def test_plaplace_preserves_constants(self):
        spec = WeightedPLaplace1D(p=3.0, dim=8)
        result = semigroup(SemigroupEvaluator(spec, tolerance=1e-6), 1.0, np.full(8, 0.7))
        np.testing.assert_allclose(result.value.components, 0.7, atol=1e-10)

    def test_batch_mixes_zero_and_positive_times(self):
        ev = SemigroupEvaluator(LinearScalar(a=1.0), tolerance=1e-5)
        out = semigroup_batch(ev, [0.0, 1.0], [[2.0], [1.0]])
        assert out.values[0, 0] == 2.0
        assert out.values[1, 0] == pytest.approx(math.exp(-1.0), abs=1e-3)

    def test_batch_rejects_mismatched_sizes_and_negative_times(self):
        ev = SemigroupEvaluator(LinearScalar())
        with pytest.raises(InvalidParameterError):
            semigroup_batch(ev, [1.0], [[1.0], [2.0]])
        with pytest.raises(InvalidParameterError):
            semigroup_batch(ev, [-1.0], [[1.0]])

    @pytest.mark.parametrize("kwargs", [{"initial_steps": 0}, {"max_doublings": -1}, {"tolerance": 0.0}])
    def test_invalid_settings(self, kwargs):
        with pytest.raises(InvalidParameterError):
            SemigroupEvaluator(LinearScalar(), **kwargs)
