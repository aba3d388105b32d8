"""Kernel weight tables and the discrete nonlocal term.

The table stores cell-average approximations of the kernel at every integer
offset, W_{j-i} in 1D and W_{j-i,k-l} in 2D.  The convolution
s_j = dx * sum_i W_{j-i} rho_i is evaluated either by direct summation or by
zero-padded FFT; the two paths agree to ~1e-12 relative and serve as each
other's oracle in the tests.  Tables are built once per run: the kernel is
time-independent.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import core
from .errors import ConfigurationError
from .mesh import Field, Grid
from .models import Kernel, Model, kernel_cell_average_1d

# 4-point Gauss-Legendre nodes/weights on [-1, 1].  All nodes are interior
# and nonzero, so a tensor rule never evaluates the kernel at the origin.
_G4_NODES = np.array([-0.8611363115940526, -0.3399810435848563,
                      0.3399810435848563, 0.8611363115940526])
_G4_WEIGHTS = np.array([0.3478548451374538, 0.6521451548625461,
                        0.6521451548625461, 0.3478548451374538])


class QuadratureRule(str, enum.Enum):
    MIDPOINT = "midpoint"
    TRAPEZOID = "trapezoid"
    EXACT_INTEGRAL = "exact_integral"
    GAUSS_TENSOR4 = "gauss_tensor4"


@dataclass
class WeightTable:
    """Kernel coefficients on all integer offsets.

    1D: values[m + n - 1] = W_m for m in -(n-1)..(n-1); 2D analogously with
    shape (2 nx - 1, 2 ny - 1).  Symmetric by construction: the negative
    half is mirrored from the computed nonnegative half, so w[-m] == w[m]
    exactly.
    """

    values: np.ndarray
    dx: float
    dy: Optional[float]
    rule: QuadratureRule

    @property
    def ndim(self) -> int:
        return self.values.ndim

    @property
    def cell_volume(self) -> float:
        return self.dx if self.dy is None else self.dx * self.dy

    @property
    def n_cells(self) -> tuple:
        if self.ndim == 1:
            return ((self.values.shape[0] + 1) // 2,)
        return ((self.values.shape[0] + 1) // 2,
                (self.values.shape[1] + 1) // 2)


def _check_rule(kernel: Kernel, rule: QuadratureRule, ndim: int) -> None:
    kernel.validate_for_dim(ndim)
    if rule in (QuadratureRule.MIDPOINT, QuadratureRule.TRAPEZOID) \
            and kernel.singular_at_origin:
        raise ConfigurationError(
            f"{rule.value} rule cannot handle a kernel singular at the "
            "origin; use exact_integral (1D) or gauss_tensor4 (2D)")
    if rule is QuadratureRule.EXACT_INTEGRAL and ndim != 1:
        raise ConfigurationError("exact_integral weights are 1D only")
    if rule is QuadratureRule.GAUSS_TENSOR4 and ndim != 2:
        raise ConfigurationError("gauss_tensor4 is the 2D rule")


def build_weight_table(kernel: Kernel, grid: Grid,
                       rule: QuadratureRule) -> WeightTable:
    """Precompute W at every offset of a static grid under the given rule."""
    rule = QuadratureRule(rule)
    _check_rule(kernel, rule, grid.ndim)

    if grid.ndim == 1:
        n, dx = grid.n, grid.dx
        m = np.arange(n)  # nonnegative offsets
        if rule is QuadratureRule.MIDPOINT:
            half = kernel.radial(m * dx)
        elif rule is QuadratureRule.TRAPEZOID:
            half = 0.5 * (kernel.radial(np.abs(m - 0.5) * dx)
                          + kernel.radial((m + 0.5) * dx))
        else:  # exact integral of the antiderivative
            half = np.array([kernel_cell_average_1d(kernel, int(k), dx)
                             for k in m])
        full = np.concatenate([half[:0:-1], half])
        if not np.all(np.isfinite(full)):
            raise ConfigurationError("weight table has non-finite entries")
        return WeightTable(full, dx, None, rule)

    nx, ny, dx, dy = grid.nx, grid.ny, grid.dx, grid.dy
    mx = np.arange(nx)
    my = np.arange(ny)
    if rule is QuadratureRule.MIDPOINT:
        R = np.hypot.outer(mx * dx, my * dy)
        quad = kernel.radial(R)
    elif rule is QuadratureRule.TRAPEZOID:
        # tensor-corner average
        quad = np.zeros((nx, ny))
        for sx in (-0.5, 0.5):
            for sy in (-0.5, 0.5):
                R = np.hypot.outer(np.abs(mx + sx) * dx, np.abs(my + sy) * dy)
                quad += 0.25 * kernel.radial(R)
    else:  # GAUSS_TENSOR4: cell-average by a 4x4 tensor Gauss rule
        xg = mx[:, None] * dx + 0.5 * dx * _G4_NODES[None, :]  # (nx, 4)
        yg = my[:, None] * dy + 0.5 * dy * _G4_NODES[None, :]
        R = np.hypot(xg[:, None, :, None], yg[None, :, None, :])
        vals = kernel.radial(R)
        w2 = np.outer(_G4_WEIGHTS, _G4_WEIGHTS) * 0.25
        quad = np.einsum("gh,jkgh->jk", w2, vals)
    full = np.empty((2 * nx - 1, 2 * ny - 1))
    full[nx - 1:, ny - 1:] = quad
    full[nx - 1:, :ny - 1] = quad[:, :0:-1]
    full[:nx - 1, :] = full[2 * nx - 2:nx - 1:-1, :]
    if not np.all(np.isfinite(full)):
        raise ConfigurationError(
            "weight table has non-finite entries (singular kernel needs "
            "gauss_tensor4)")
    return WeightTable(full, dx, dy, rule)


def _good_fft_size(n: int) -> int:
    """Smallest 5-smooth integer >= n."""
    while True:
        m = n
        for p in (2, 3, 5):
            while m % p == 0:
                m //= p
        if m == 1:
            return n
        n += 1


class ConvolutionOperator:
    """Caches the padded kernel transform so repeated convolutions against a
    fixed table cost two FFTs each.  path: 'auto' | 'direct' | 'fft'.

    auto switches to FFT at 128 cells in 1D; in 2D the direct sum is
    O((nx ny)^2), so the measured crossover sits near 16x16 cells and auto
    switches to FFT at 256 total cells."""

    AUTO_FFT_THRESHOLD_1D = 128
    AUTO_FFT_THRESHOLD_2D = 256  # total cells

    def __init__(self, table: WeightTable, path: str = "auto"):
        if path not in ("auto", "direct", "fft"):
            raise ConfigurationError(f"unknown convolution path {path!r}")
        self.table = table
        if path == "auto":
            if table.ndim == 1:
                big = table.n_cells[0] >= self.AUTO_FFT_THRESHOLD_1D
            else:
                big = (table.n_cells[0] * table.n_cells[1]
                       >= self.AUTO_FFT_THRESHOLD_2D)
            path = "fft" if big else "direct"
        self.path = path
        self._plan = None

    def _fft_plan(self):
        if self._plan is None:
            t = self.table
            if t.ndim == 1:
                (n,) = t.n_cells
                L = _good_fft_size(3 * n - 2)
                self._plan = (L, np.fft.rfft(t.values, L))
            else:
                nx, ny = t.n_cells
                L = (_good_fft_size(3 * nx - 2), _good_fft_size(3 * ny - 2))
                self._plan = (L, np.fft.rfft2(t.values, L))
        return self._plan

    def direct(self, values: np.ndarray) -> np.ndarray:
        t = self.table
        if t.ndim == 1:
            return core.convolve_direct_1d(t.values, values, t.dx)
        return core.convolve_direct_2d(t.values, values, t.cell_volume)

    def fft(self, values: np.ndarray) -> np.ndarray:
        t = self.table
        L, what = self._fft_plan()
        if t.ndim == 1:
            (n,) = t.n_cells
            conv = np.fft.irfft(np.fft.rfft(values, L) * what, L)
            return t.dx * conv[n - 1:2 * n - 1]
        nx, ny = t.n_cells
        conv = np.fft.irfft2(np.fft.rfft2(values, L) * what, L)
        return t.cell_volume * conv[nx - 1:2 * nx - 1, ny - 1:2 * ny - 1]

    def __call__(self, values: np.ndarray) -> np.ndarray:
        return self.fft(values) if self.path == "fft" else self.direct(values)


def convolve_direct(table: WeightTable, field_values: np.ndarray) -> np.ndarray:
    """s_j = cellvol * sum_i w[j-i] rho_i by direct summation."""
    return ConvolutionOperator(table, "direct").direct(
        np.asarray(field_values, dtype=np.float64))


def convolve_fft(table: WeightTable, field_values: np.ndarray) -> np.ndarray:
    """Same values as convolve_direct via zero-padded linear FFT convolution."""
    return ConvolutionOperator(table, "fft").fft(
        np.asarray(field_values, dtype=np.float64))


def assemble_xi(model: Model, table: Optional[WeightTable], f: Field,
                conv: Optional[ConvolutionOperator] = None) -> np.ndarray:
    """Discrete variational derivative per cell:
    xi_j = (W conv rho)_j + H'(rho_j) + V(x_j)."""
    g = f.grid
    xi = model.internal.prime(f.values)
    if not model.external.is_trivial:
        if g.ndim == 1:
            xi = xi + model.external.value(g.centers)
        else:
            X, Y = g.center_mesh()
            xi = xi + model.external.value(X, Y)
    if model.kernel is not None:
        if table is None:
            raise ConfigurationError("model has a kernel but no weight table")
        op = conv if conv is not None else ConvolutionOperator(table)
        xi = xi + op(f.values)
    return xi


def dump_table_csv(table: WeightTable, path) -> None:
    """Debug dump: one row per offset (offset[, offset_y], weight)."""
    with open(path, "w") as fh:
        if table.ndim == 1:
            (n,) = table.n_cells
            fh.write("offset,weight\n")
            for m in range(-(n - 1), n):
                fh.write(f"{m},{table.values[m + n - 1]:.17g}\n")
        else:
            nx, ny = table.n_cells
            fh.write("offset_x,offset_y,weight\n")
            for mx in range(-(nx - 1), nx):
                for my in range(-(ny - 1), ny):
                    fh.write(f"{mx},{my},"
                             f"{table.values[mx + nx - 1, my + ny - 1]:.17g}\n")
