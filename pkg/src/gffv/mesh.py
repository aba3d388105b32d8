"""Uniform cell-centered grids, cell-average fields and initial-data projection.

The solver state is the vector of cell averages of the density over a uniform
partition of a box.  Grids are 1D or 2D, cell-centered, with no ghost storage;
all boundary handling (no-flux) lives in the flux assembly.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Sequence, Union

import numpy as np

from .errors import ConfigurationError

log = logging.getLogger("gffv")

# 3-point Gauss-Legendre on [-1, 1]; exact through degree 5.
_GAUSS3_NODES = np.array([-np.sqrt(3.0 / 5.0), 0.0, np.sqrt(3.0 / 5.0)])
_GAUSS3_WEIGHTS = np.array([5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0])


@dataclass(frozen=True)
class Grid1D:
    """Uniform partition of [x_min, x_max] into n cells of width dx."""

    x_min: float
    x_max: float
    n: int

    def __post_init__(self):
        if self.n < 2:
            raise ConfigurationError(f"need at least 2 cells, got {self.n}")
        if not self.x_max > self.x_min:
            raise ConfigurationError(
                f"invalid bounds [{self.x_min}, {self.x_max}]")

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / self.n

    @property
    def ndim(self) -> int:
        return 1

    @property
    def cell_volume(self) -> float:
        return self.dx

    @property
    def shape(self) -> tuple:
        return (self.n,)

    @cached_property
    def centers(self) -> np.ndarray:
        """Cell centers x_j = x_min + (j + 1/2) dx."""
        return self.x_min + (np.arange(self.n) + 0.5) * self.dx

    @cached_property
    def edges(self) -> np.ndarray:
        return self.x_min + np.arange(self.n + 1) * self.dx


@dataclass(frozen=True)
class Grid2D:
    """Uniform Cartesian partition of a box into nx*ny cells."""

    x_min: float
    x_max: float
    nx: int
    y_min: float
    y_max: float
    ny: int

    def __post_init__(self):
        if self.nx < 2 or self.ny < 2:
            raise ConfigurationError(
                f"need at least 2 cells per axis, got {self.nx}x{self.ny}")
        if not (self.x_max > self.x_min and self.y_max > self.y_min):
            raise ConfigurationError("invalid 2D bounds")

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / self.nx

    @property
    def dy(self) -> float:
        return (self.y_max - self.y_min) / self.ny

    @property
    def ndim(self) -> int:
        return 2

    @property
    def cell_volume(self) -> float:
        return self.dx * self.dy

    @property
    def shape(self) -> tuple:
        return (self.nx, self.ny)

    @cached_property
    def x_centers(self) -> np.ndarray:
        return self.x_min + (np.arange(self.nx) + 0.5) * self.dx

    @cached_property
    def y_centers(self) -> np.ndarray:
        return self.y_min + (np.arange(self.ny) + 0.5) * self.dy

    def center_mesh(self) -> tuple:
        """(X, Y) arrays of shape (nx, ny), indexed [ix, iy]."""
        return np.meshgrid(self.x_centers, self.y_centers, indexing="ij")


Grid = Union[Grid1D, Grid2D]


@dataclass
class Field:
    """Cell averages of a density on a grid.  values[j] in 1D,
    values[jx, jy] in 2D."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        self.values = np.ascontiguousarray(self.values, dtype=np.float64)
        if self.values.shape != self.grid.shape:
            raise ConfigurationError(
                f"field shape {self.values.shape} does not match grid "
                f"{self.grid.shape}")

    def copy(self) -> "Field":
        return Field(self.grid, self.values.copy())

    def with_values(self, values: np.ndarray) -> "Field":
        return Field(self.grid, values)


def build_grid(bounds, n_cells) -> Grid:
    """Build a 1D or 2D uniform grid.

    bounds: (lo, hi) for 1D, ((x_lo, x_hi), (y_lo, y_hi)) for 2D.
    n_cells: int for 1D, (nx, ny) for 2D.
    """
    if np.isscalar(n_cells) or (hasattr(n_cells, "__len__") and len(n_cells) == 1):
        n = int(n_cells if np.isscalar(n_cells) else n_cells[0])
        lo, hi = bounds
        return Grid1D(float(lo), float(hi), n)
    (xb, yb) = bounds
    nx, ny = (int(v) for v in n_cells)
    return Grid2D(float(xb[0]), float(xb[1]), nx, float(yb[0]), float(yb[1]), ny)


@dataclass(frozen=True)
class BoxIndicator:
    """Indicator-of-box initial datum h * chi_B; projected by exact overlap
    fractions, so aligned boxes project without any quadrature error."""

    bounds: Sequence  # (a, b) in 1D, ((ax, bx), (ay, by)) in 2D
    height: float = 1.0


def _overlap_fraction(edges: np.ndarray, a: float, b: float) -> np.ndarray:
    """Per-cell fraction of [a, b] covering each cell."""
    lo = np.maximum(edges[:-1], a)
    hi = np.minimum(edges[1:], b)
    w = edges[1] - edges[0]
    return np.clip(hi - lo, 0.0, None) / w


def project_initial_data(grid: Grid, datum) -> Field:
    """Project an initial density onto cell averages.

    * BoxIndicator: exact overlap fraction per cell.
    * callable rho0: fixed 3-point Gauss rule per axis per cell; negative
      evaluations are clamped to zero (counted and logged).

    Callables receive x (1D) or x, y (2D) arrays and must broadcast.
    """
    if isinstance(datum, BoxIndicator):
        if grid.ndim == 1:
            a, b = datum.bounds
            frac = _overlap_fraction(grid.edges, float(a), float(b))
            return Field(grid, datum.height * frac)
        (ax, bx), (ay, by) = datum.bounds
        ex = grid.x_min + np.arange(grid.nx + 1) * grid.dx
        ey = grid.y_min + np.arange(grid.ny + 1) * grid.dy
        fx = _overlap_fraction(ex, float(ax), float(bx))
        fy = _overlap_fraction(ey, float(ay), float(by))
        return Field(grid, datum.height * np.outer(fx, fy))

    if not callable(datum):
        raise ConfigurationError(f"cannot project initial datum {datum!r}")

    if grid.ndim == 1:
        # nodes[k, j]: k-th Gauss node inside cell j
        nodes = grid.centers[None, :] + 0.5 * grid.dx * _GAUSS3_NODES[:, None]
        vals = np.asarray(datum(nodes), dtype=np.float64)
        n_neg = int(np.count_nonzero(vals < 0.0))
        if n_neg:
            log.warning("initial data: clamped %d negative evaluations", n_neg)
            vals = np.maximum(vals, 0.0)
        avg = 0.5 * np.einsum("k,kj->j", _GAUSS3_WEIGHTS, vals)
        return Field(grid, avg)

    xn = grid.x_centers[None, :] + 0.5 * grid.dx * _GAUSS3_NODES[:, None]
    yn = grid.y_centers[None, :] + 0.5 * grid.dy * _GAUSS3_NODES[:, None]
    # tensor nodes: [kx, ky, jx, jy]
    X = xn[:, None, :, None]
    Y = yn[None, :, None, :]
    vals = np.asarray(datum(X, Y), dtype=np.float64)
    vals = np.broadcast_to(vals, (3, 3, grid.nx, grid.ny))
    n_neg = int(np.count_nonzero(vals < 0.0))
    if n_neg:
        log.warning("initial data: clamped %d negative evaluations", n_neg)
        vals = np.maximum(vals, 0.0)
    w2 = np.outer(_GAUSS3_WEIGHTS, _GAUSS3_WEIGHTS) * 0.25
    avg = np.einsum("kl,kljm->jm", w2, vals)
    return Field(grid, avg)


def total_mass(f: Field) -> float:
    """cell_volume * sum of cell averages."""
    return float(f.grid.cell_volume * f.values.sum())


def normalize_mass(f: Field, target: float) -> Field:
    """Rescale the field so total_mass(f) == target exactly (up to rounding)."""
    m = total_mass(f)
    if m <= 0.0:
        raise ConfigurationError("cannot normalize a field with zero mass")
    return f.with_values(f.values * (target / m))


def coarsen(f: Field, factor: int) -> Field:
    """Exact cell-average coarsening by an integer factor per axis."""
    g = f.grid
    if g.ndim == 1:
        if g.n % factor:
            raise ConfigurationError("grid size not divisible by factor")
        vals = f.values.reshape(g.n // factor, factor).mean(axis=1)
        return Field(Grid1D(g.x_min, g.x_max, g.n // factor), vals)
    if g.nx % factor or g.ny % factor:
        raise ConfigurationError("grid size not divisible by factor")
    vals = f.values.reshape(g.nx // factor, factor,
                            g.ny // factor, factor).mean(axis=(1, 3))
    return Field(Grid2D(g.x_min, g.x_max, g.nx // factor,
                        g.y_min, g.y_max, g.ny // factor), vals)
