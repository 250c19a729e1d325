#tests/test_majorant.py
"""
Scalar majorants: kernels, the Psi transform, horizons and the IE solver.

Usage:
    pytest tests/test_majorant.py
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.accretive.banach import TimeGrid
from src.accretive.errors import (
    AmbiguousSolutionError,
    BlowUpError,
    GridMismatchError,
    HorizonExceededError,
    InvalidParameterError,
)
from src.accretive.majorant import (
    Gauge,
    PhiFunction,
    PsiTransform,
    ScalarCurve,
    ThetaFunction,
    closed_form_psi,
    gauge_majorant,
    gronwall_bound,
    horizon,
    log_kernel_closed_forms,
    null_envelope,
    power_solution,
    solve_scalar_ie,
    uniqueness_majorant,
    z_space_ratio,
)

IDENTITY_TRANSFORM = PsiTransform(ThetaFunction.identity(), 1.0)
SQRT_TRANSFORM = PsiTransform(ThetaFunction.power(0.5), 1.0)


class TestKernels:
    def test_values(self):
        assert ThetaFunction.identity()(2.5) == 2.5
        assert ThetaFunction.power(2.0)(3.0) == 9.0
        assert ThetaFunction.log_osgood()(0.1) == pytest.approx(0.1 * math.log(10.0))
        assert ThetaFunction.log_osgood()(5.0) == pytest.approx(math.exp(-1.0))
        assert ThetaFunction.log_growth()(0.5) == 0.0
        assert ThetaFunction.table([1.0, 2.0], [2.0, 4.0])(0.5) == pytest.approx(1.0)

    def test_scaling_and_label(self):
        theta = ThetaFunction.power(2.0).scaled(3.0)
        assert theta(2.0) == 12.0
        assert theta.label == "3*power(2)"

    def test_invalid_kernels(self):
        with pytest.raises(InvalidParameterError):
            ThetaFunction.power(0.0)
        with pytest.raises(InvalidParameterError):
            ThetaFunction.table([0.0, 1.0], [1.0, 2.0])
        with pytest.raises(InvalidParameterError):
            ThetaFunction.table([1.0, 2.0], [2.0, 1.0])
        with pytest.raises(InvalidParameterError):
            ThetaFunction.parse("table")

    def test_tail_integral(self):
        assert ThetaFunction.power(2.0).tail_integral(2.0) == pytest.approx(0.5)
        assert math.isinf(ThetaFunction.identity().tail_integral(1.0))


class TestPhiFunction:
    def test_constant_integral_and_norms(self):
        phi = PhiFunction.constant(2.0, TimeGrid(1.0, 4))
        assert phi.integral(0.3) == pytest.approx(0.6)
        assert phi.lp_norm(2.0) == pytest.approx(2.0)
        assert phi.lp_norm(math.inf) == 2.0

    def test_sampled_integral_is_left_endpoint(self):
        phi = PhiFunction.sample(lambda t: t, TimeGrid(1.0, 4))
        assert phi.integral(1.0) == pytest.approx(0.25 * (0.0 + 0.25 + 0.5 + 0.75))
        assert phi.integral(0.375) == pytest.approx(0.125 * 0.25)

    def test_negative_samples_rejected(self):
        with pytest.raises(InvalidParameterError):
            PhiFunction.sample(lambda t: t - 0.5, TimeGrid(1.0, 4))
        with pytest.raises(GridMismatchError):
            PhiFunction(TimeGrid(1.0, 4), [1.0, 1.0])


class TestClosedForms:
    def test_gronwall(self):
        phi = PhiFunction.constant(1.0, TimeGrid(1.0, 10))
        assert gronwall_bound(phi, 1.0, 1.0) == pytest.approx(math.e)

    @pytest.mark.parametrize("m,t", [(2.0, 0.5), (3.0, 0.375)])
    def test_power_solution(self, m, t):
        phi = PhiFunction.constant(1.0, TimeGrid(1.0, 10))
        assert power_solution(m, phi, 1.0, t) == pytest.approx(2.0)

    def test_power_solution_past_the_horizon(self):
        phi = PhiFunction.constant(1.0, TimeGrid(1.0, 10))
        with pytest.raises(HorizonExceededError):
            power_solution(2.0, phi, 2.0, 0.6)

    def test_horizon(self):
        grid = TimeGrid(1.0, 10)
        assert horizon(ThetaFunction.power(2.0), PhiFunction.constant(1.0, grid), 2.0) == pytest.approx(0.5)
        assert math.isinf(horizon(ThetaFunction.identity(), PhiFunction.constant(1.0, grid), 2.0))
        sampled = PhiFunction.sample(lambda t: 2.0, grid)
        assert horizon(ThetaFunction.power(2.0), sampled, 1.0) == pytest.approx(0.5)


class TestPsiTransform:
    def test_power_example(self):
        assert PsiTransform(ThetaFunction.power(2.0), 1.0).psi(2.0) == pytest.approx(0.5, abs=1e-10)

    @pytest.mark.parametrize("theta,U0,U", [
        (ThetaFunction.identity(), 1.0, 50.0),
        (ThetaFunction.power(0.5), 1.0, 9.0),
        (ThetaFunction.power(2.0), 0.5, 4.0),
        (ThetaFunction.log_growth(), 2.0, 100.0),
        (ThetaFunction.log_osgood(), 1e-6, 1e-2),
    ], ids=["identity", "sqrt", "square", "log_growth", "log_osgood"])
    def test_quadrature_matches_closed_form(self, theta, U0, U):
        expected = closed_form_psi(theta, U0, U)
        assert PsiTransform(theta, U0).psi(U) == pytest.approx(expected, rel=1e-9)

    @given(U=st.floats(min_value=1.0, max_value=1e3))
    @settings(max_examples=50, deadline=None)
    def test_inverse_round_trip(self, U):
        for transform in (IDENTITY_TRANSFORM, SQRT_TRANSFORM):
            assert transform.psi_inverse(transform.psi(U)) == pytest.approx(U, rel=1e-8)

    def test_inverse_beyond_the_limit(self):
        transform = PsiTransform(ThetaFunction.power(2.0), 1.0)
        assert transform.limit == pytest.approx(1.0)
        with pytest.raises(HorizonExceededError):
            transform.psi_inverse(1.0)

    def test_domain_checks(self):
        with pytest.raises(InvalidParameterError):
            PsiTransform(ThetaFunction.identity(), 0.0)
        with pytest.raises(InvalidParameterError):
            IDENTITY_TRANSFORM.psi(0.5)
        with pytest.raises(InvalidParameterError):
            IDENTITY_TRANSFORM.psi_inverse(-1.0)


class TestScalarSolver:
    def test_identity_reaches_e(self):
        grid = TimeGrid(1.0, 100)
        curve = solve_scalar_ie(PhiFunction.constant(1.0, grid), ThetaFunction.identity(), 1.0, grid)
        assert curve.values[-1] == pytest.approx(math.e, abs=1e-6)
        assert curve.error_estimate < 1e-6

    @pytest.mark.parametrize("theta,T", [
        (ThetaFunction.identity(), 1.0),
        (ThetaFunction.power(0.5), 1.0),
        (ThetaFunction.power(2.0), 0.4),
    ], ids=["identity", "sqrt", "square"])
    def test_agrees_with_psi(self, theta, T):
        grid = TimeGrid(T, 100)
        phi = PhiFunction.constant(1.0, grid)
        curve = solve_scalar_ie(phi, theta, 1.0, grid)
        transform = PsiTransform(theta, 1.0)
        expected = [transform.psi_inverse(t) for t in grid.nodes]
        np.testing.assert_allclose(curve.values, expected, rtol=1e-5)

    def test_blow_up_is_detected_near_the_horizon(self):
        grid = TimeGrid(2.0, 400)
        with pytest.raises(BlowUpError) as info:
            solve_scalar_ie(PhiFunction.constant(1.0, grid), ThetaFunction.power(2.0), 2.0, grid)
        assert info.value.horizon == pytest.approx(0.5, abs=0.01)
        assert info.value.partial.size <= 102

    def test_zero_start(self):
        grid = TimeGrid(1.0, 20)
        phi = PhiFunction.constant(1.0, grid)
        assert np.all(solve_scalar_ie(phi, ThetaFunction.identity(), 0.0, grid).values == 0.0)
        with pytest.raises(AmbiguousSolutionError):
            solve_scalar_ie(phi, ThetaFunction.power(0.5), 0.0, grid)

    def test_offset_is_added(self):
        grid = TimeGrid(1.0, 50)
        zero = PhiFunction.constant(0.0, grid)
        curve = solve_scalar_ie(zero, ThetaFunction.identity(), 1.0, grid, offset=PhiFunction.constant(2.0, grid))
        np.testing.assert_allclose(curve.values, 1.0 + 2.0 * grid.nodes, atol=1e-12)

    def test_uniqueness_majorant_is_linear_in_eps(self):
        grid = TimeGrid(1.0, 50)
        phi = PhiFunction.constant(1.0, grid)
        small = uniqueness_majorant(ThetaFunction.identity(), phi, 1e-3, grid)
        assert small.values[-1] == pytest.approx(1e-3 * math.e, rel=1e-6)
        with pytest.raises(InvalidParameterError):
            uniqueness_majorant(ThetaFunction.identity(), phi, -1.0, grid)

    @pytest.mark.parametrize("lower, upper, U0", [
        (ThetaFunction.identity(), ThetaFunction.identity().scaled(2.0), 1.0),
        (ThetaFunction.power(0.5), ThetaFunction.identity(), 1.0),
        (ThetaFunction.identity(), ThetaFunction.log_osgood(), 1e-3),
    ], ids=["identity<2identity", "sqrt<identity", "identity<log"])
    def test_larger_kernel_gives_a_larger_majorant(self, lower, upper, U0):
        grid = TimeGrid(1.0, 100)
        phi = PhiFunction.sample(lambda t: 1.0 + math.sin(3.0 * t) ** 2, grid)
        small = solve_scalar_ie(phi, lower, U0, grid)
        large = solve_scalar_ie(phi, upper, U0, grid)
        assert np.all(small.values <= large.values + 1e-8)

    def test_larger_weight_gives_a_larger_majorant(self):
        grid = TimeGrid(1.0, 100)
        theta = ThetaFunction.power(0.5)
        small = solve_scalar_ie(PhiFunction.constant(0.5, grid), theta, 0.2, grid)
        large = solve_scalar_ie(PhiFunction.sample(lambda t: 0.5 + t, grid), theta, 0.2, grid)
        assert np.all(small.values <= large.values + 1e-8)
        assert large.values[-1] > small.values[-1]


class TestEnvelopesAndGauges:
    def test_null_envelope_collapses_for_osgood_kernels(self):
        grid = TimeGrid(1.0, 50)
        phi = PhiFunction.constant(1.0, grid)
        for theta in (ThetaFunction.identity(), ThetaFunction.log_osgood()):
            assert np.max(null_envelope(theta, phi, grid).values) <= 1e-10

    def test_null_envelope_stays_open_without_osgood(self):
        grid = TimeGrid(1.0, 50)
        envelope = null_envelope(ThetaFunction.power(0.5), PhiFunction.constant(1.0, grid), grid)
        assert envelope.values[-1] > 0.2

    def test_log_kernel_prefers_the_decay_form(self):
        comparison = log_kernel_closed_forms(1e-3, 1.0, TimeGrid(1.0, 100))
        assert comparison.preferred == "decay"
        assert comparison.decay_error < 1e-5
        assert comparison.growth_error > 0.5
        with pytest.raises(InvalidParameterError):
            log_kernel_closed_forms(0.5, 1.0, TimeGrid(1.0, 10))

    def test_gauge(self):
        with pytest.raises(InvalidParameterError):
            Gauge(exponent=1.5)
        g = Gauge(0.5)
        assert g(4.0) == pytest.approx(2.0)
        assert g.derivative(4.0) == pytest.approx(0.25)

    def test_gauge_majorant(self):
        assert gauge_majorant(ThetaFunction.identity(), Gauge.linear(), 1.0, 1.0) == pytest.approx(math.e, rel=1e-8)
        assert math.isinf(gauge_majorant(ThetaFunction.power(2.0), Gauge.linear(), 1.0, 2.0))

    def test_z_space_ratio(self):
        grid = TimeGrid(1.0, 4)
        curve = ScalarCurve(grid, grid.nodes ** 2)
        np.testing.assert_allclose(z_space_ratio(curve, Gauge.linear()), grid.nodes[1:])
