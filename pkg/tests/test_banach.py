#tests/test_banach.py
"""
State space, grids, trajectories and their norms.

Usage:
    pytest tests/test_banach.py
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.accretive.banach import (
    NormKind,
    NormTag,
    StateVector,
    TimeGrid,
    Trajectory,
    bielecki_norm,
    norm,
    running_sup,
    sup_time_norm,
)
from src.accretive.errors import DimensionMismatchError, GridMismatchError, InvalidParameterError

finite = st.floats(min_value=-1e6, max_value=1e6, allow_nan=False, allow_infinity=False)
vectors = st.lists(finite, min_size=3, max_size=3)
KINDS = [NormKind.sup(), NormKind.l1(), NormKind.l2(), NormKind.weighted_l2([1.0, 2.0, 0.5])]


class TestNorms:
    def test_basic_values(self):
        x = [3.0, -4.0]
        assert norm(x, NormKind.sup()) == 4.0
        assert norm(x, NormKind.l1()) == 7.0
        assert norm(x, NormKind.l2()) == 5.0

    def test_weighted_example(self):
        assert norm([1.0, 1.0], NormKind.weighted_l2([4.0, 9.0])) == pytest.approx(math.sqrt(13.0))

    def test_batch_returns_one_norm_per_row(self):
        values = norm(np.array([[3.0, 4.0], [0.0, 1.0]]), NormKind.l2())
        np.testing.assert_allclose(values, [5.0, 1.0])

    def test_weight_count_must_match_dimension(self):
        with pytest.raises(DimensionMismatchError):
            norm([1.0, 2.0, 3.0], NormKind.weighted_l2([1.0, 1.0]))

    def test_weight_validation(self):
        with pytest.raises(InvalidParameterError):
            NormKind.weighted_l2([1.0, 0.0])
        with pytest.raises(InvalidParameterError):
            NormKind(NormTag.WEIGHTED_L2)
        with pytest.raises(InvalidParameterError):
            NormKind(NormTag.SUP, (1.0,))

    def test_parse(self):
        assert NormKind.parse("SUP") == NormKind.sup()
        assert NormKind.parse("weighted_l2", [2.0]).weights == (2.0,)

    @pytest.mark.parametrize("kind", KINDS, ids=lambda k: k.tag.value)
    @given(x=vectors, y=vectors)
    @settings(max_examples=60, deadline=None)
    def test_triangle_inequality(self, kind, x, y):
        lhs = norm(np.add(x, y), kind)
        assert lhs <= norm(x, kind) + norm(y, kind) + 1e-9 * (1.0 + lhs)

    @pytest.mark.parametrize("kind", KINDS, ids=lambda k: k.tag.value)
    @given(x=vectors, c=finite)
    @settings(max_examples=40, deadline=None)
    def test_absolute_homogeneity(self, kind, x, c):
        assert norm(np.multiply(c, x), kind) == pytest.approx(abs(c) * norm(x, kind), rel=1e-9, abs=1e-9)


class TestStateVector:
    def test_components_are_read_only(self):
        v = StateVector.of([1.0, 2.0])
        with pytest.raises(ValueError):
            v.components[0] = 5.0

    def test_rejects_non_finite_and_empty(self):
        with pytest.raises(InvalidParameterError):
            StateVector(np.array([1.0, np.nan]))
        with pytest.raises(InvalidParameterError):
            StateVector(np.array([]))

    def test_array_conversion(self):
        v = StateVector.zeros(3)
        assert v.dim == 3 and len(v) == 3
        np.testing.assert_array_equal(np.asarray(v), np.zeros(3))


class TestTimeGrid:
    def test_nodes_and_step(self):
        grid = TimeGrid(2.0, 4)
        assert grid.step == 0.5
        np.testing.assert_allclose(grid.nodes, [0.0, 0.5, 1.0, 1.5, 2.0])
        assert len(grid) == 5

    @pytest.mark.parametrize("horizon,steps", [(0.0, 4), (-1.0, 4), (1.0, 0), (1.0, 2.5)])
    def test_invalid(self, horizon, steps):
        with pytest.raises(InvalidParameterError):
            TimeGrid(horizon, steps)

    def test_index_of_is_left_continuous(self):
        grid = TimeGrid(1.0, 4)
        assert grid.index_of(0.0) == 0
        assert grid.index_of(0.25) == 1
        assert grid.index_of(0.49) == 1
        assert grid.index_of(1.0) == 4
        with pytest.raises(InvalidParameterError):
            grid.index_of(1.5)

    def test_check_same(self):
        TimeGrid(1.0, 10).check_same(TimeGrid(1.0, 10))
        with pytest.raises(GridMismatchError):
            TimeGrid(1.0, 10).check_same(TimeGrid(1.0, 20))


class TestTrajectory:
    def test_shape_is_checked(self):
        with pytest.raises(GridMismatchError):
            Trajectory(TimeGrid(1.0, 4), np.zeros((3, 2)))

    def test_running_sup_and_time_norm(self):
        grid = TimeGrid(1.0, 4)
        u = Trajectory(grid, np.array([[1.0], [3.0], [2.0], [-4.0], [0.0]]))
        np.testing.assert_allclose(running_sup(u), [1.0, 3.0, 3.0, 4.0, 4.0])
        assert sup_time_norm(u, 2) == 3.0
        assert sup_time_norm(u) == 4.0
        with pytest.raises(InvalidParameterError):
            sup_time_norm(u, 7)

    def test_bielecki_norm(self):
        grid = TimeGrid(1.0, 2)
        u = Trajectory(grid, np.array([[0.0], [0.0], [math.e]]))
        assert bielecki_norm(u, 1.0) == pytest.approx(1.0)
        with pytest.raises(InvalidParameterError):
            bielecki_norm(u, 0.0)

    @given(values=st.lists(finite, min_size=10, max_size=10), gamma=st.floats(min_value=1e-3, max_value=20.0))
    @settings(max_examples=60, deadline=None)
    def test_bielecki_norm_never_exceeds_the_time_norm(self, values, gamma):
        u = Trajectory(TimeGrid(2.0, 4), np.array(values).reshape(5, 2))
        assert bielecki_norm(u, gamma) <= sup_time_norm(u) * (1.0 + 1e-15)

    def test_difference_requires_same_grid(self):
        a = Trajectory.constant(TimeGrid(1.0, 4), [1.0])
        b = Trajectory.constant(TimeGrid(1.0, 8), [1.0])
        with pytest.raises(GridMismatchError):
            a - b
        diff = a - Trajectory.constant(TimeGrid(1.0, 4), [0.25])
        np.testing.assert_allclose(diff.node_norms(), 0.75)
