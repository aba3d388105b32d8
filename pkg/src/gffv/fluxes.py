"""Interface velocities, upwind numerical fluxes and the semi-discrete
right-hand side.

The velocity at an interior interface is the centered difference
u_{j+1/2} = -(xi_{j+1} - xi_j)/dx; the flux takes the face value from the
upwind side, F_{j+1/2} = u+ rho_E_j + u- rho_W_{j+1}.  Fluxes at the domain
boundary are identically zero (no-flux box), which is what conserves mass
and closes the discrete free-energy inequality.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from . import core
from .errors import NumericsError
from .interaction import ConvolutionOperator, WeightTable
from .mesh import Field, Grid
from .models import Model
from .reconstruct import LimiterParams, ReconstructedStates


@dataclass
class InterfaceVelocities:
    """Velocities at interior interfaces.  1D: u with shape (n-1,).
    2D: u with shape (nx-1, ny), v with shape (nx, ny-1)."""

    u: np.ndarray
    v: Optional[np.ndarray] = None

    @property
    def ndim(self) -> int:
        return 1 if self.v is None else 2

    def max_speeds(self) -> Tuple[float, ...]:
        """Per-axis a = max(u+, -u-) = max |u| (0 for an empty axis)."""
        a = float(np.max(np.abs(self.u))) if self.u.size else 0.0
        if self.v is None:
            return (a,)
        b = float(np.max(np.abs(self.v))) if self.v.size else 0.0
        return (a, b)


@dataclass
class FluxField:
    """Per-interface fluxes including the zero boundary entries.
    1D: x of shape (n+1,); 2D: x of shape (nx+1, ny), y of shape (nx, ny+1)."""

    x: np.ndarray
    y: Optional[np.ndarray] = None


def interface_velocities(xi: np.ndarray, grid: Grid) -> InterfaceVelocities:
    """Centered-difference velocities from the discrete potential."""
    if grid.ndim == 1:
        return InterfaceVelocities(-(xi[1:] - xi[:-1]) / grid.dx)
    u = -(xi[1:, :] - xi[:-1, :]) / grid.dx
    v = -(xi[:, 1:] - xi[:, :-1]) / grid.dy
    return InterfaceVelocities(u, v)


def upwind_fluxes(vel: InterfaceVelocities, states: ReconstructedStates,
                  grid: Grid) -> FluxField:
    """Upwind fluxes from one-sided face values; boundary fluxes are zero."""
    if grid.ndim == 1:
        _, F = core.upwind_rhs_1d(states.east, states.west, vel.u, grid.dx)
        return FluxField(F)
    _, Fx, Fy = core.upwind_rhs_2d(states.east, states.west, states.north,
                                   states.south, vel.u, vel.v,
                                   grid.dx, grid.dy)
    return FluxField(Fx, Fy)


@dataclass
class RhsEval:
    """One evaluation of the semi-discrete operator at a state, with every
    intermediate the diagnostics need."""

    rhs: np.ndarray
    xi: np.ndarray
    velocities: InterfaceVelocities
    states: ReconstructedStates
    conv: Optional[np.ndarray] = None  # (W conv rho), if the model has W

    def rhs_l1(self) -> float:
        return float(np.abs(self.rhs).sum())


class SpatialOperator:
    """The full spatial discretization for one model on one grid, with the
    weight-table FFT plan cached across evaluations."""

    def __init__(self, model: Model, grid: Grid,
                 table: Optional[WeightTable] = None,
                 limiter: LimiterParams = LimiterParams(),
                 conv_path: str = "auto"):
        self.model = model
        self.grid = grid
        self.table = table
        self.limiter = limiter
        self.conv = (ConvolutionOperator(table, conv_path)
                     if table is not None and model.kernel is not None
                     else None)
        # confinement values are static on a static grid
        if model.external.is_trivial:
            self._v_cells = None
        elif grid.ndim == 1:
            self._v_cells = model.external.value(grid.centers)
        else:
            X, Y = grid.center_mesh()
            self._v_cells = model.external.value(X, Y)

    def xi(self, values: np.ndarray) -> np.ndarray:
        out = self.model.internal.prime(values)
        if self._v_cells is not None:
            out = out + self._v_cells
        if self.conv is not None:
            out = out + self.conv(values)
        return out

    def evaluate(self, f: Field) -> RhsEval:
        g = self.grid
        conv_vals = self.conv(f.values) if self.conv is not None else None
        xi = self.model.internal.prime(f.values)
        if self._v_cells is not None:
            xi = xi + self._v_cells
        if conv_vals is not None:
            xi = xi + conv_vals
        if not np.all(np.isfinite(xi)):
            raise NumericsError("non-finite discrete potential xi")
        if g.ndim == 1:
            east, west = core.faces_1d(f.values, self.limiter.theta,
                                       self.limiter.order)
            u = -(xi[1:] - xi[:-1]) / g.dx
            rhs, _ = core.upwind_rhs_1d(east, west, u, g.dx)
            return RhsEval(rhs, xi, InterfaceVelocities(u),
                           ReconstructedStates(east, west), conv_vals)
        east, west, north, south = core.faces_2d(f.values, self.limiter.theta,
                                                 self.limiter.order)
        u = -(xi[1:, :] - xi[:-1, :]) / g.dx
        v = -(xi[:, 1:] - xi[:, :-1]) / g.dy
        rhs, _, _ = core.upwind_rhs_2d(east, west, north, south, u, v,
                                       g.dx, g.dy)
        return RhsEval(rhs, xi, InterfaceVelocities(u, v),
                       ReconstructedStates(east, west, north, south),
                       conv_vals)


def rhs(f: Field, model: Model, table: Optional[WeightTable] = None,
        limiter: LimiterParams = LimiterParams()) -> np.ndarray:
    """d(rho_bar)/dt per cell: the composition xi -> velocities ->
    reconstruction -> upwind fluxes -> flux divergence."""
    return SpatialOperator(model, f.grid, table, limiter).evaluate(f).rhs
