import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from gffv import (Field, LimiterParams, NumericsError, build_grid, minmod,
                  reconstruct_states)


class TestMinmod:
    def test_all_positive(self):
        assert minmod(1.0, 2.0, 3.0) == 1.0

    def test_all_negative(self):
        assert minmod(-1.0, -2.0, -3.0) == -1.0

    def test_mixed_signs(self):
        assert minmod(1.0, -2.0, 3.0) == 0.0

    def test_zero_argument(self):
        assert minmod(0.0, 1.0, 2.0) == 0.0


def faces_of(values, theta=2.0, order=2, dx=1.0):
    n = len(values)
    g = build_grid((0.0, n * dx), n)
    return reconstruct_states(Field(g, np.asarray(values, dtype=float)),
                              LimiterParams(theta, order))


class TestReconstruct1D:
    def test_constant_field(self):
        s = faces_of([0.7] * 6)
        assert np.all(s.east == 0.7) and np.all(s.west == 0.7)

    def test_isolated_bump_no_limiting(self):
        # centered slope at the middle cell of (0, 1, 0) vanishes
        s = faces_of([0.0, 1.0, 0.0])
        assert s.east[1] == 1.0 and s.west[1] == 1.0

    def test_limited_cell_hand_value(self):
        # (0, 0.1, 4), dx=1: centered slope 2 makes west -0.9 < 0, so the
        # theta=2 minmod slope min(0.2, 2, 7.8) = 0.2 applies
        s = faces_of([0.0, 0.1, 4.0])
        assert s.west[1] == pytest.approx(0.0, abs=1e-16)
        assert s.east[1] == pytest.approx(0.2, rel=1e-14)

    def test_first_order_returns_averages(self):
        vals = [0.3, 1.7, 0.01, 2.4]
        s = faces_of(vals, order=1)
        assert np.array_equal(s.east, vals)
        assert np.array_equal(s.west, vals)

    def test_negative_input_rejected(self):
        with pytest.raises(NumericsError):
            faces_of([0.1, -0.2, 0.3])

    def test_second_order_accuracy_smooth(self):
        # rho = sin(x) + 2 via exact cell averages; no limiting triggers
        errs = []
        for n in (32, 64, 128):
            g = build_grid((0.0, 2 * np.pi), n)
            edges = g.edges
            avg = (np.cos(edges[:-1]) - np.cos(edges[1:])) / g.dx + 2.0
            s = reconstruct_states(Field(g, avg))
            exact_east = np.sin(edges[1:]) + 2.0
            errs.append(np.max(np.abs(s.east[1:-1] - exact_east[1:-1])))
        assert errs[1] == pytest.approx(errs[0] / 4, rel=0.2)
        assert errs[2] == pytest.approx(errs[1] / 4, rel=0.2)


@settings(max_examples=150, deadline=None)
@given(vals=hnp.arrays(np.float64, st.integers(3, 200),
                       elements=st.floats(0.0, 1e6)),
       theta=st.floats(1.0, 2.0))
def test_property_faces_nonnegative_and_mean_consistent_1d(vals, theta):
    s = faces_of(list(vals), theta=theta)
    assert np.all(s.east >= 0.0)
    assert np.all(s.west >= 0.0)
    scale = np.maximum(np.abs(vals), 1.0)
    assert np.all(np.abs(s.east + s.west - 2.0 * vals) <= 4e-16 * scale * 2)


@settings(max_examples=50, deadline=None)
@given(vals=hnp.arrays(np.float64, st.tuples(st.integers(3, 24),
                                             st.integers(3, 24)),
                       elements=st.floats(0.0, 1e6)),
       theta=st.floats(1.0, 2.0))
def test_property_faces_nonnegative_and_mean_consistent_2d(vals, theta):
    nx, ny = vals.shape
    g = build_grid(((0.0, 1.0 * nx), (0.0, 1.0 * ny)), (nx, ny))
    s = reconstruct_states(Field(g, vals), LimiterParams(theta, 2))
    for arr in (s.east, s.west, s.north, s.south):
        assert np.all(arr >= 0.0)
    scale = np.maximum(np.abs(vals), 1.0) * 2
    assert np.all(np.abs(s.east + s.west - 2.0 * vals) <= 4e-16 * scale)
    assert np.all(np.abs(s.north + s.south - 2.0 * vals) <= 4e-16 * scale)


def test_2d_directions_limited_independently():
    # steep gradient in x forces x-limiting; y stays centered
    g = build_grid(((0.0, 3.0), (0.0, 3.0)), (3, 3))
    vals = np.array([[0.0, 0.0, 0.0],
                     [0.1, 0.1, 0.1],
                     [4.0, 4.0, 4.0]])
    s = reconstruct_states(Field(g, vals))
    assert s.west[1, 1] == pytest.approx(0.0, abs=1e-16)
    assert s.east[1, 1] == pytest.approx(0.2, rel=1e-14)
    assert s.north[1, 1] == 0.1 and s.south[1, 1] == 0.1


def test_limiter_params_validation():
    from gffv import ConfigurationError
    with pytest.raises(ConfigurationError):
        LimiterParams(theta=2.5)
    with pytest.raises(ConfigurationError):
        LimiterParams(order=3)
