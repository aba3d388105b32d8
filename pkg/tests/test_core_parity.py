"""Compiled extension vs pure-NumPy fallback: the reconstruction and flux
kernels must agree bit for bit (the extension builds with FP contraction
off); the direct convolutions agree to rounding (different summation
orders)."""

import numpy as np
import pytest

from gffv import _fvcore_py as pyimpl

cyimpl = pytest.importorskip("gffv._fvcore",
                             reason="compiled extension not built")


@pytest.fixture
def fields(rng):
    vals = rng.random(257)
    vals[rng.random(257) < 0.3] = 0.0
    return vals


def test_compiled_flag():
    assert cyimpl.COMPILED and not pyimpl.COMPILED


@pytest.mark.parametrize("theta", [1.0, 1.3, 2.0])
@pytest.mark.parametrize("order", [1, 2])
def test_faces_1d_bitwise(fields, theta, order):
    e1, w1 = pyimpl.faces_1d(fields, theta, order)
    e2, w2 = cyimpl.faces_1d(fields, theta, order)
    assert np.array_equal(e1, e2)
    assert np.array_equal(w1, w2)


def test_faces_2d_bitwise(rng):
    vals = rng.random((33, 41))
    vals[rng.random((33, 41)) < 0.3] = 0.0
    a = pyimpl.faces_2d(vals, 2.0, 2)
    b = cyimpl.faces_2d(vals, 2.0, 2)
    for x, y in zip(a, b):
        assert np.array_equal(x, y)


def test_upwind_1d_bitwise(rng):
    n = 129
    east, west = rng.random(n), rng.random(n)
    u = rng.standard_normal(n - 1)
    u[rng.random(n - 1) < 0.2] = 0.0
    r1, f1 = pyimpl.upwind_rhs_1d(east, west, u, 0.03)
    r2, f2 = cyimpl.upwind_rhs_1d(east, west, u, 0.03)
    assert np.array_equal(r1, r2)
    assert np.array_equal(f1, f2)


def test_upwind_2d_bitwise(rng):
    nx, ny = 17, 23
    E, W = rng.random((nx, ny)), rng.random((nx, ny))
    N, S = rng.random((nx, ny)), rng.random((nx, ny))
    u = rng.standard_normal((nx - 1, ny))
    v = rng.standard_normal((nx, ny - 1))
    a = pyimpl.upwind_rhs_2d(E, W, N, S, u, v, 0.1, 0.2)
    b = cyimpl.upwind_rhs_2d(E, W, N, S, u, v, 0.1, 0.2)
    for x, y in zip(a, b):
        assert np.array_equal(x, y)


def test_convolve_direct_1d_close(rng):
    n = 64
    w = rng.standard_normal(2 * n - 1)
    w = 0.5 * (w + w[::-1])
    rho = rng.random(n)
    a = pyimpl.convolve_direct_1d(w, rho, 0.05)
    b = cyimpl.convolve_direct_1d(w, rho, 0.05)
    assert np.allclose(a, b, rtol=1e-13, atol=1e-15)


def test_convolve_direct_2d_close(rng):
    nx, ny = 12, 9
    w = rng.standard_normal((2 * nx - 1, 2 * ny - 1))
    rho = rng.random((nx, ny))
    a = pyimpl.convolve_direct_2d(w, rho, 0.01)
    b = cyimpl.convolve_direct_2d(w, rho, 0.01)
    assert np.allclose(a, b, rtol=1e-13, atol=1e-15)


def test_selected_backend_is_compiled():
    import os
    if os.environ.get("GFFV_PURE_PYTHON") == "1":
        pytest.skip("fallback forced via environment")
    from gffv import core
    assert core.COMPILED
