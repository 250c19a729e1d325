#tests/test_operators.py
"""
Operator variants and their resolvents.

Usage:
    pytest tests/test_operators.py
"""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import optimize

from src.accretive.banach import NormKind, norm
from src.accretive.errors import DimensionMismatchError, InvalidParameterError, MultivaluedPointError
from src.accretive.operators import (
    AbsSubdifferential,
    DampingStrategy,
    LinearMatrix,
    LinearScalar,
    ResolventSolverConfig,
    WeightedPLaplace1D,
    ZeroOperator,
    apply_batch,
    apply_single_valued,
    is_accretive_sample,
    plaplace_energy,
    resolvent,
    resolvent_batch,
    resolvent_constant,
)

SYMMETRIC = np.array([[2.0, -1.0], [-1.0, 2.0]])
SKEWED = np.array([[1.0, 3.0], [-3.0, 1.0]])

coords = st.floats(min_value=-5.0, max_value=5.0, allow_nan=False)
pairs = st.tuples(st.lists(coords, min_size=2, max_size=2), st.lists(coords, min_size=2, max_size=2))


class TestLinearVariants:
    def test_zero_operator_resolvent_is_identity(self):
        np.testing.assert_array_equal(resolvent(ZeroOperator(), 0.7, [1.0, -2.0]).components, [1.0, -2.0])

    def test_linear_scalar_example(self):
        np.testing.assert_allclose(resolvent(LinearScalar(a=1.0), 1.0, [2.0]).components, [1.0])

    def test_linear_scalar_rejects_negative_coefficient(self):
        with pytest.raises(InvalidParameterError):
            LinearScalar(a=-0.5)

    def test_linear_matrix_solves_the_resolvent_equation(self):
        spec = LinearMatrix(matrix=SKEWED)
        x = np.array([1.0, 2.0])
        y = resolvent(spec, 0.3, x).components
        np.testing.assert_allclose(y + 0.3 * SKEWED @ y, x, atol=1e-12)

    def test_linear_matrix_rejects_non_accretive(self):
        with pytest.raises(InvalidParameterError):
            LinearMatrix(matrix=np.array([[-1.0, 0.0], [0.0, 1.0]]))
        with pytest.raises(InvalidParameterError):
            LinearMatrix(matrix=np.ones((2, 3)))

    def test_linear_matrix_dimension_is_enforced(self):
        with pytest.raises(DimensionMismatchError):
            resolvent(LinearMatrix(matrix=SYMMETRIC), 0.1, [1.0, 2.0, 3.0])

    def test_per_row_steps_match_single_calls(self):
        spec = LinearMatrix(matrix=SYMMETRIC)
        X = np.array([[1.0, 0.0], [0.5, -1.0], [2.0, 2.0]])
        steps = np.array([0.1, 0.5, 2.0])
        batch = resolvent_batch(spec, steps, X)
        for row, step, x in zip(batch, steps, X):
            np.testing.assert_allclose(row, resolvent(spec, step, x).components, atol=1e-14)

    def test_nonpositive_step_rejected(self):
        with pytest.raises(InvalidParameterError):
            resolvent(LinearScalar(), 0.0, [1.0])

    def test_resolvent_constant(self):
        c = resolvent_constant(LinearScalar(a=1.0), 0.1, [[1.0], [-0.5]])
        assert c == pytest.approx(1.0 / 1.1)

    @pytest.mark.parametrize("spec,dim", [
        (ZeroOperator(), 3),
        (LinearMatrix(matrix=SKEWED), 2),
        (AbsSubdifferential(), 4),
        (WeightedPLaplace1D(p=3.0, dim=6), 6),
    ], ids=["zero", "skewed", "abs", "plaplace"])
    def test_sampled_accretivity(self, spec, dim):
        report = is_accretive_sample(spec, dim, samples=40)
        assert report.holds
        assert report.worst_ratio <= 1.0 + 1e-8
        assert report.witness is None


class TestAbsSubdifferential:
    def test_soft_threshold(self):
        y = resolvent(AbsSubdifferential(), 0.5, [2.0, -0.3, 0.0, -1.0]).components
        np.testing.assert_allclose(y, [1.5, 0.0, 0.0, -0.5])

    def test_single_value_away_from_zero(self):
        np.testing.assert_array_equal(apply_single_valued(AbsSubdifferential(), [2.0, -3.0]).components, [1.0, -1.0])

    def test_multivalued_at_zero(self):
        with pytest.raises(MultivaluedPointError):
            apply_single_valued(AbsSubdifferential(), [1.0, 0.0])

    @pytest.mark.parametrize("lam", [0.05, 0.3, 1.7])
    def test_two_steps_equal_one_double_step(self, lam):
        spec = AbsSubdifferential()
        x = np.array([2.0, -0.45, 0.08, -1.2, 0.0, 0.7])
        twice = resolvent(spec, lam, resolvent(spec, lam, x).components).components
        np.testing.assert_allclose(twice, resolvent(spec, 2.0 * lam, x).components, atol=1e-12)

    @given(pair=pairs, lam=st.floats(min_value=1e-3, max_value=3.0))
    @settings(max_examples=80, deadline=None)
    def test_nonexpansive_in_every_lp(self, pair, lam):
        x, y = np.array(pair[0]), np.array(pair[1])
        spec = AbsSubdifferential()
        for kind in (NormKind.sup(), NormKind.l1(), NormKind.l2()):
            gap = norm(resolvent(spec, lam, x).components - resolvent(spec, lam, y).components, kind)
            assert gap <= norm(x - y, kind) + 1e-12


class TestWeightedPLaplace:
    def test_rejects_bad_parameters(self):
        with pytest.raises(InvalidParameterError):
            WeightedPLaplace1D(p=1.0, dim=8)
        with pytest.raises(InvalidParameterError):
            WeightedPLaplace1D(p=3.0, dim=1)

    def test_weights_vanish_towards_the_ends(self):
        spec = WeightedPLaplace1D(p=3.0, dim=11)
        assert spec.edge_weights[0] < spec.edge_weights[5]
        assert np.all(spec.edge_weights > 0)
        assert spec.spacing == pytest.approx(0.2)

    def test_energy_is_zero_on_constants_and_p_homogeneous(self):
        spec = WeightedPLaplace1D(p=3.0, dim=9)
        assert plaplace_energy(spec, np.full(9, 0.4)) == 0.0
        v = np.sin(spec.nodes)
        assert plaplace_energy(spec, -2.0 * v) == pytest.approx(8.0 * plaplace_energy(spec, v))

    def test_constants_are_fixed_points(self):
        spec = WeightedPLaplace1D(p=3.0, dim=12)
        np.testing.assert_allclose(resolvent(spec, 0.5, np.full(12, -0.2)).components, -0.2, atol=1e-12)

    @pytest.mark.parametrize("p", [2.0, 3.0, 4.0])
    def test_residual_of_the_resolvent_equation(self, p):
        spec = WeightedPLaplace1D(p=p, dim=16)
        x = 1.0 - spec.nodes ** 2 + 0.3 * spec.nodes
        y = resolvent(spec, 0.1, x).components
        residual = y + 0.1 * apply_single_valued(spec, y).components - x
        assert np.max(np.abs(residual)) <= 1e-8

    def test_quadratic_case_matches_a_direct_solve(self):
        spec = WeightedPLaplace1D(p=2.0, dim=10)
        h = spec.spacing
        D = (np.eye(10, k=1) - np.eye(10))[:-1]
        L = D.T @ np.diag(spec.edge_weights) @ D / h
        x = np.cos(3.0 * spec.nodes)
        expected = np.linalg.solve(np.eye(10) + 0.2 * L, x)
        np.testing.assert_allclose(resolvent(spec, 0.2, x).components, expected, atol=1e-9)

    def test_matches_an_independent_minimiser(self):
        spec = WeightedPLaplace1D(p=3.0, dim=8)
        lam = 0.2
        x = np.array([0.3, -0.1, 0.5, 0.2, -0.4, 0.0, 0.6, -0.2])

        def objective(v):
            return 0.5 * np.sum((v - x) ** 2) + lam * plaplace_energy(spec, v)

        def gradient(v):
            return v - x + lam * apply_batch(spec, v)

        reference = optimize.minimize(objective, x, jac=gradient, method="BFGS",
                                      options={"gtol": 1e-12, "maxiter": 2000}).x
        np.testing.assert_allclose(resolvent(spec, lam, x).components, reference, atol=1e-6)

    def test_batch_and_per_row_steps(self):
        spec = WeightedPLaplace1D(p=3.0, dim=8)
        X = np.vstack([np.linspace(-1, 1, 8), np.linspace(1, -1, 8) ** 2])
        batch = resolvent_batch(spec, [0.05, 0.3], X)
        np.testing.assert_allclose(batch[0], resolvent(spec, 0.05, X[0]).components, atol=1e-10)
        np.testing.assert_allclose(batch[1], resolvent(spec, 0.3, X[1]).components, atol=1e-10)

    def test_damping_can_be_switched_off(self):
        spec = WeightedPLaplace1D(p=3.0, dim=8)
        x = np.linspace(-0.5, 0.5, 8)
        plain = resolvent(spec, 0.1, x, ResolventSolverConfig(damping=DampingStrategy.NONE)).components
        np.testing.assert_allclose(plain, resolvent(spec, 0.1, x).components, atol=1e-9)

    @given(pair=st.tuples(st.lists(coords, min_size=6, max_size=6), st.lists(coords, min_size=6, max_size=6)))
    @settings(max_examples=25, deadline=None)
    def test_nonexpansive(self, pair):
        spec = WeightedPLaplace1D(p=3.0, dim=6)
        x, y = np.array(pair[0]), np.array(pair[1])
        gap = norm(resolvent(spec, 0.1, x).components - resolvent(spec, 0.1, y).components)
        assert gap <= norm(x - y) + 1e-8


class TestSingleValuedAccretivity:
    @pytest.mark.parametrize("spec,dim", [
        (LinearScalar(a=2.0), 3),
        (LinearMatrix(matrix=SKEWED), 2),
        (WeightedPLaplace1D(p=3.0, dim=7), 7),
        (WeightedPLaplace1D(p=2.0, dim=5), 5),
    ], ids=["scalar", "skewed", "plaplace3", "plaplace2"])
    @pytest.mark.parametrize("lam", [0.1, 1.0, 10.0])
    def test_step_never_shrinks_the_gap(self, spec, dim, lam, rng):
        kind = NormKind.l2()
        for _ in range(50):
            x, y = rng.uniform(-2.0, 2.0, size=(2, dim))
            moved = (x - y) + lam * (apply_single_valued(spec, x).components - apply_single_valued(spec, y).components)
            assert norm(moved, kind) >= norm(x - y, kind) - 1e-9
