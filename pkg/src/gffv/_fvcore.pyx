# cython: boundscheck=False, wraparound=False, cdivision=True
# cython: initializedcheck=False
"""Compiled hot-loop kernels: limited reconstruction, upwind fluxes and
direct convolution.  Mirrors gffv._fvcore_py operation-for-operation; the
reconstruction and flux kernels are bit-identical to the NumPy fallback
(build uses -ffp-contract=off)."""

import numpy as np
cimport numpy as cnp

cnp.import_array()

COMPILED = True


cdef inline double _minmod3_s(double a, double b, double c) nogil:
    cdef double m
    if a > 0.0 and b > 0.0 and c > 0.0:
        m = a if a < b else b
        return m if m < c else c
    if a < 0.0 and b < 0.0 and c < 0.0:
        m = a if a > b else b
        return m if m > c else c
    return 0.0


def faces_1d(double[::1] rho, double theta, int order):
    cdef Py_ssize_t n = rho.shape[0]
    cdef cnp.ndarray east_a = np.empty(n)
    cdef cnp.ndarray west_a = np.empty(n)
    cdef double[::1] east = east_a
    cdef double[::1] west = west_a
    cdef Py_ssize_t j
    cdef double rl, rc, rr, ctr, e, w, fwd, bwd, lim
    if order == 1:
        for j in range(n):
            east[j] = rho[j]
            west[j] = rho[j]
        return east_a, west_a
    with nogil:
        for j in range(n):
            rc = rho[j]
            rl = rho[j - 1] if j > 0 else rho[0]
            rr = rho[j + 1] if j < n - 1 else rho[n - 1]
            ctr = 0.5 * (rr - rl)
            e = rc + 0.5 * ctr
            w = rc - 0.5 * ctr
            if e < 0.0 or w < 0.0:
                fwd = rr - rc
                bwd = rc - rl
                lim = _minmod3_s(theta * fwd, ctr, theta * bwd)
                e = rc + 0.5 * lim
                w = rc - 0.5 * lim
            east[j] = e
            west[j] = w
    return east_a, west_a


def faces_2d(double[:, ::1] rho, double theta, int order):
    cdef Py_ssize_t nx = rho.shape[0]
    cdef Py_ssize_t ny = rho.shape[1]
    cdef cnp.ndarray east_a = np.empty((nx, ny))
    cdef cnp.ndarray west_a = np.empty((nx, ny))
    cdef cnp.ndarray north_a = np.empty((nx, ny))
    cdef cnp.ndarray south_a = np.empty((nx, ny))
    cdef double[:, ::1] east = east_a
    cdef double[:, ::1] west = west_a
    cdef double[:, ::1] north = north_a
    cdef double[:, ::1] south = south_a
    cdef Py_ssize_t i, j
    cdef double rl, rc, rr, ctr, e, w, fwd, bwd, lim
    if order == 1:
        for i in range(nx):
            for j in range(ny):
                rc = rho[i, j]
                east[i, j] = rc
                west[i, j] = rc
                north[i, j] = rc
                south[i, j] = rc
        return east_a, west_a, north_a, south_a
    with nogil:
        for i in range(nx):
            for j in range(ny):
                rc = rho[i, j]
                rl = rho[i - 1, j] if i > 0 else rho[0, j]
                rr = rho[i + 1, j] if i < nx - 1 else rho[nx - 1, j]
                ctr = 0.5 * (rr - rl)
                e = rc + 0.5 * ctr
                w = rc - 0.5 * ctr
                if e < 0.0 or w < 0.0:
                    fwd = rr - rc
                    bwd = rc - rl
                    lim = _minmod3_s(theta * fwd, ctr, theta * bwd)
                    e = rc + 0.5 * lim
                    w = rc - 0.5 * lim
                east[i, j] = e
                west[i, j] = w
                rl = rho[i, j - 1] if j > 0 else rho[i, 0]
                rr = rho[i, j + 1] if j < ny - 1 else rho[i, ny - 1]
                ctr = 0.5 * (rr - rl)
                e = rc + 0.5 * ctr
                w = rc - 0.5 * ctr
                if e < 0.0 or w < 0.0:
                    fwd = rr - rc
                    bwd = rc - rl
                    lim = _minmod3_s(theta * fwd, ctr, theta * bwd)
                    e = rc + 0.5 * lim
                    w = rc - 0.5 * lim
                north[i, j] = e
                south[i, j] = w
    return east_a, west_a, north_a, south_a


def upwind_rhs_1d(double[::1] east, double[::1] west, double[::1] u,
                  double dx):
    cdef Py_ssize_t n = east.shape[0]
    cdef cnp.ndarray F_a = np.zeros(n + 1)
    cdef cnp.ndarray rhs_a = np.empty(n)
    cdef double[::1] F = F_a
    cdef double[::1] rhs = rhs_a
    cdef Py_ssize_t j
    cdef double uj
    with nogil:
        for j in range(n - 1):
            uj = u[j]
            if uj > 0.0:
                F[j + 1] = uj * east[j]
            elif uj < 0.0:
                F[j + 1] = uj * west[j + 1]
        for j in range(n):
            rhs[j] = (F[j] - F[j + 1]) / dx
    return rhs_a, F_a


def upwind_rhs_2d(double[:, ::1] east, double[:, ::1] west,
                  double[:, ::1] north, double[:, ::1] south,
                  double[:, ::1] u, double[:, ::1] v,
                  double dx, double dy):
    cdef Py_ssize_t nx = east.shape[0]
    cdef Py_ssize_t ny = east.shape[1]
    cdef cnp.ndarray Fx_a = np.zeros((nx + 1, ny))
    cdef cnp.ndarray Fy_a = np.zeros((nx, ny + 1))
    cdef cnp.ndarray rhs_a = np.empty((nx, ny))
    cdef double[:, ::1] Fx = Fx_a
    cdef double[:, ::1] Fy = Fy_a
    cdef double[:, ::1] rhs = rhs_a
    cdef Py_ssize_t i, j
    cdef double w_
    with nogil:
        for i in range(nx - 1):
            for j in range(ny):
                w_ = u[i, j]
                if w_ > 0.0:
                    Fx[i + 1, j] = w_ * east[i, j]
                elif w_ < 0.0:
                    Fx[i + 1, j] = w_ * west[i + 1, j]
        for i in range(nx):
            for j in range(ny - 1):
                w_ = v[i, j]
                if w_ > 0.0:
                    Fy[i, j + 1] = w_ * north[i, j]
                elif w_ < 0.0:
                    Fy[i, j + 1] = w_ * south[i, j + 1]
        for i in range(nx):
            for j in range(ny):
                rhs[i, j] = (Fx[i, j] - Fx[i + 1, j]) / dx \
                    + (Fy[i, j] - Fy[i, j + 1]) / dy
    return rhs_a, Fx_a, Fy_a


def convolve_direct_1d(double[::1] wfull, double[::1] rho, double dx):
    cdef Py_ssize_t n = rho.shape[0]
    cdef cnp.ndarray out_a = np.empty(n)
    cdef double[::1] out = out_a
    cdef Py_ssize_t j, i
    cdef double acc
    with nogil:
        for j in range(n):
            acc = 0.0
            for i in range(n):
                acc += rho[i] * wfull[j - i + n - 1]
            out[j] = dx * acc
    return out_a


def convolve_direct_2d(double[:, ::1] wfull, double[:, ::1] rho,
                       double cellvol):
    cdef Py_ssize_t nx = rho.shape[0]
    cdef Py_ssize_t ny = rho.shape[1]
    cdef cnp.ndarray out_a = np.empty((nx, ny))
    cdef double[:, ::1] out = out_a
    cdef Py_ssize_t j, k, i, l
    cdef double acc
    with nogil:
        for j in range(nx):
            for k in range(ny):
                acc = 0.0
                for i in range(nx):
                    for l in range(ny):
                        acc += rho[i, l] * wfull[j - i + nx - 1,
                                                 k - l + ny - 1]
                out[j, k] = cellvol * acc
    return out_a
