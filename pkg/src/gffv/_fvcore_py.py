"""Pure-NumPy implementations of the hot kernels (reconstruction, upwind
fluxes, direct convolution).

The compiled extension gffv._fvcore implements the same functions with the
same operation order; the limiter/flux kernels are bit-identical between the
two (the extension is built with FP contraction off), which test_core_parity
asserts.  Either module can back gffv.core.
"""

from __future__ import annotations

import numpy as np

COMPILED = False


def _minmod3(a, b, c):
    """min if all positive, max if all negative, else 0 (elementwise)."""
    pos = (a > 0.0) & (b > 0.0) & (c > 0.0)
    neg = (a < 0.0) & (b < 0.0) & (c < 0.0)
    return np.where(pos, np.minimum(np.minimum(a, b), c),
                    np.where(neg, np.maximum(np.maximum(a, b), c), 0.0))


def faces_1d(rho, theta, order):
    """One-sided face values (east, west) of the positivity-preserving
    piecewise-linear reconstruction.

    Slopes start as centered differences; any cell whose face value goes
    negative is re-limited with the theta-minmod slope.  Out-of-domain
    neighbor averages are taken equal to the boundary cell average
    (zero-gradient extension).  order == 1 forces zero slopes.
    Slopes are carried as (slope * dx), so dx cancels throughout.
    """
    rho = np.asarray(rho, dtype=np.float64)
    n = rho.shape[0]
    if order == 1:
        return rho.copy(), rho.copy()
    ext = np.empty(n + 2)
    ext[1:-1] = rho
    ext[0] = rho[0]
    ext[-1] = rho[-1]
    ctr = 0.5 * (ext[2:] - ext[:-2])
    east = rho + 0.5 * ctr
    west = rho - 0.5 * ctr
    bad = (east < 0.0) | (west < 0.0)
    if np.any(bad):
        fwd = ext[2:][bad] - rho[bad]
        bwd = rho[bad] - ext[:-2][bad]
        lim = _minmod3(theta * fwd, ctr[bad], theta * bwd)
        east[bad] = rho[bad] + 0.5 * lim
        west[bad] = rho[bad] - 0.5 * lim
    return east, west


def faces_2d(rho, theta, order):
    """2D analogue of faces_1d: (east, west, north, south), each the shape of
    rho.  The x and y slopes are limited independently, each only when its
    own pair of face values goes negative."""
    rho = np.asarray(rho, dtype=np.float64)
    nx, ny = rho.shape
    if order == 1:
        r = rho.copy()
        return r, r.copy(), r.copy(), r.copy()

    extx = np.empty((nx + 2, ny))
    extx[1:-1, :] = rho
    extx[0, :] = rho[0, :]
    extx[-1, :] = rho[-1, :]
    ctr = 0.5 * (extx[2:, :] - extx[:-2, :])
    east = rho + 0.5 * ctr
    west = rho - 0.5 * ctr
    bad = (east < 0.0) | (west < 0.0)
    if np.any(bad):
        fwd = extx[2:, :][bad] - rho[bad]
        bwd = rho[bad] - extx[:-2, :][bad]
        lim = _minmod3(theta * fwd, ctr[bad], theta * bwd)
        east[bad] = rho[bad] + 0.5 * lim
        west[bad] = rho[bad] - 0.5 * lim

    exty = np.empty((nx, ny + 2))
    exty[:, 1:-1] = rho
    exty[:, 0] = rho[:, 0]
    exty[:, -1] = rho[:, -1]
    ctr = 0.5 * (exty[:, 2:] - exty[:, :-2])
    north = rho + 0.5 * ctr
    south = rho - 0.5 * ctr
    bad = (north < 0.0) | (south < 0.0)
    if np.any(bad):
        fwd = exty[:, 2:][bad] - rho[bad]
        bwd = rho[bad] - exty[:, :-2][bad]
        lim = _minmod3(theta * fwd, ctr[bad], theta * bwd)
        north[bad] = rho[bad] + 0.5 * lim
        south[bad] = rho[bad] - 0.5 * lim
    return east, west, north, south


def upwind_rhs_1d(east, west, u, dx):
    """Upwind fluxes and flux divergence on a 1D grid.

    u holds the n-1 interior interface velocities; boundary fluxes are zero
    (no-flux box).  Returns (rhs, F) with F of length n+1 including the zero
    boundary entries.
    """
    n = east.shape[0]
    F = np.zeros(n + 1)
    F[1:-1] = np.where(u > 0.0, u * east[:-1],
                       np.where(u < 0.0, u * west[1:], 0.0))
    rhs = (F[:-1] - F[1:]) / dx
    return rhs, F


def upwind_rhs_2d(east, west, north, south, u, v, dx, dy):
    """2D upwind fluxes and unsplit divergence.  u: (nx-1, ny) interior
    x-interface velocities; v: (nx, ny-1).  Returns (rhs, Fx, Fy)."""
    nx, ny = east.shape
    Fx = np.zeros((nx + 1, ny))
    Fx[1:-1, :] = np.where(u > 0.0, u * east[:-1, :],
                           np.where(u < 0.0, u * west[1:, :], 0.0))
    Fy = np.zeros((nx, ny + 1))
    Fy[:, 1:-1] = np.where(v > 0.0, v * north[:, :-1],
                           np.where(v < 0.0, v * south[:, 1:], 0.0))
    rhs = (Fx[:-1, :] - Fx[1:, :]) / dx + (Fy[:, :-1] - Fy[:, 1:]) / dy
    return rhs, Fx, Fy


def convolve_direct_1d(wfull, rho, dx):
    """Direct O(n^2) evaluation of s_j = dx * sum_i w[j-i] rho_i.  wfull has
    length 2n-1, offset m stored at index m + n - 1."""
    n = rho.shape[0]
    return dx * np.convolve(rho, wfull, mode="full")[n - 1:2 * n - 1]


def convolve_direct_2d(wfull, rho, cellvol):
    """Direct O(n^2 m^2) 2D discrete convolution with a (2nx-1, 2ny-1)
    weight table."""
    nx, ny = rho.shape
    rev = rho[::-1, ::-1]
    win = np.lib.stride_tricks.sliding_window_view(wfull, (nx, ny))
    return cellvol * np.einsum("jkil,il->jk", win, rev)
