"""CFL-limited explicit time integration and run-state classification.

Forward Euler keeps the cell averages nonnegative under
dt <= dx/(2a) in 1D (a = max(u+, -u-)) and dt <= min(dx/(4a), dy/(4b)) in
2D; the three-stage SSP-RK3 update is a convex combination of Euler steps
and inherits the property stage by stage.  Because the velocities depend on
the intermediate states, the RK3 driver re-checks the bound at every stage
and rejects and halves dt if any stage violates its own bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .errors import NumericsError
from .fluxes import InterfaceVelocities, RhsEval, SpatialOperator
from .mesh import Field, Grid


@dataclass(frozen=True)
class StepControl:
    """Step-size selection and termination thresholds.

    rho_blowup=None means the documented default 1e8/cellvol, which the
    scenario presets override with a mass-aware threshold (a cell average
    can never exceed mass/cellvol, so the generic default only ever fires
    through the dt_floor path).
    """

    cfl_safety: float = 0.9
    dt_max: float = math.inf
    dt_floor: float = 1e-12
    rho_blowup: Optional[float] = None
    steady_tol: float = 1e-7
    fixed_dt: Optional[float] = None

    def __post_init__(self):
        if not 0.0 < self.cfl_safety <= 1.0:
            raise ValueError("cfl_safety must lie in (0, 1]")
        if self.dt_max <= 0 or self.dt_floor <= 0 or self.steady_tol <= 0:
            raise ValueError("step thresholds must be positive")

    def blowup_threshold(self, grid: Grid) -> float:
        if self.rho_blowup is not None:
            return self.rho_blowup
        return 1e8 / grid.cell_volume


@dataclass(frozen=True)
class RunStatus:
    """Terminal states are sticky: once Steady/Finished/BlowUp is reported
    the run is over."""

    kind: str  # running | steady | finished | blowup
    t: float = 0.0

    @property
    def terminal(self) -> bool:
        return self.kind != "running"


def cfl_max_dt(vel: InterfaceVelocities, grid: Grid, order: int = 2,
               dt_max: float = math.inf) -> float:
    """Largest positivity-safe dt for the current velocities.

    1D second order: dx/(2a) with a = max_j max(u+, -u-);
    1D first order:  dx / (2 max_j (u+_{j+1/2} - u-_{j-1/2}));
    2D:              min(dx/(4a), dy/(4b)).
    Returns dt_max when all velocities vanish.
    """
    if grid.ndim == 1:
        if order == 1:
            u = vel.u
            up = np.concatenate([np.maximum(u, 0.0), [0.0]])  # right iface of each cell
            um = np.concatenate([[0.0], np.minimum(u, 0.0)])  # left iface
            denom = float(np.max(up - um))
            if denom <= 0.0:
                return dt_max
            return grid.dx / (2.0 * denom)
        (a,) = vel.max_speeds()
        if a == 0.0:
            return dt_max
        return grid.dx / (2.0 * a)
    a, b = vel.max_speeds()
    if a == 0.0 and b == 0.0:
        return dt_max
    out = math.inf
    if a > 0.0:
        out = min(out, grid.dx / (4.0 * a))
    if b > 0.0:
        out = min(out, grid.dy / (4.0 * b))
    return out


def diffusive_max_dt(f: Field, model, grid: Grid) -> float:
    """Parabolic stability cap dt <= dx^2 / (2 max_j rho_j H''(rho_j))
    (2D: dt <= 1 / (2 max D (1/dx^2 + 1/dy^2))).

    The positivity CFL controls only the advective eigenvalues; when the
    velocities are small (near a steady state) it stops constraining dt and
    the explicit update goes unstable on the stiff diffusion part, leaving a
    residual limit cycle instead of decay.  This cap restores plain forward
    Euler stability for the diffusive flux; it never loosens the CFL bound.
    """
    D = model.internal.diffusivity(f.values)
    dmax = float(np.max(D)) if D.size else 0.0
    if dmax <= 0.0:
        return math.inf
    if grid.ndim == 1:
        return grid.dx * grid.dx / (2.0 * dmax)
    return 1.0 / (2.0 * dmax * (1.0 / grid.dx ** 2 + 1.0 / grid.dy ** 2))


class BlowUpSignal(Exception):
    """Raised inside a step when dt halving underflows dt_floor."""


def _euler_update(f: Field, ev: RhsEval, dt: float) -> Field:
    return f.with_values(f.values + dt * ev.rhs)


def forward_euler_step(op: SpatialOperator, f: Field, dt: float,
                       control: StepControl = StepControl(),
                       ev: Optional[RhsEval] = None
                       ) -> Tuple[Field, RhsEval]:
    """One forward Euler step.  Errors if dt exceeds the safety-scaled CFL
    bound at the current state; the caller must re-select dt."""
    if ev is None:
        ev = op.evaluate(f)
    bound = control.cfl_safety * cfl_max_dt(ev.velocities, op.grid,
                                            op.limiter.order)
    if dt > bound * (1.0 + 1e-12):
        raise NumericsError(
            f"CFL violation: dt={dt:g} exceeds {bound:g}")
    new = _euler_update(f, ev, dt)
    return new, op.evaluate(new)


def ssp_rk3_step(op: SpatialOperator, f: Field, dt: float,
                 control: StepControl = StepControl(),
                 ev: Optional[RhsEval] = None
                 ) -> Tuple[Field, RhsEval, float]:
    """One SSP-RK3 step with stage-wise CFL enforcement by reject-and-halve.

    s1    = rho + dt L(rho)
    s2    = 3/4 rho + 1/4 (s1 + dt L(s1))
    rho'  = 1/3 rho + 2/3 (s2 + dt L(s2))

    Each stage is an Euler substep on an intermediate state, so dt must obey
    the CFL bound of every stage state; if a later stage breaks its bound
    the whole step restarts with dt/2.  Returns (field, eval at the new
    state, dt actually taken).  Raises BlowUpSignal when halving hits
    control.dt_floor.
    """
    if ev is None:
        ev = op.evaluate(f)
    order = op.limiter.order
    safety = control.cfl_safety
    bound0 = safety * cfl_max_dt(ev.velocities, op.grid, order)
    dt = min(dt, bound0)
    while True:
        if dt < control.dt_floor:
            raise BlowUpSignal
        s1 = _euler_update(f, ev, dt)
        ev1 = op.evaluate(s1)
        if dt > safety * cfl_max_dt(ev1.velocities, op.grid, order):
            dt *= 0.5
            continue
        s2 = f.with_values(0.75 * f.values
                           + 0.25 * (s1.values + dt * ev1.rhs))
        ev2 = op.evaluate(s2)
        if dt > safety * cfl_max_dt(ev2.velocities, op.grid, order):
            dt *= 0.5
            continue
        new = f.with_values(f.values / 3.0
                            + (2.0 / 3.0) * (s2.values + dt * ev2.rhs))
        return new, op.evaluate(new), dt


def classify_state(f: Field, rhs_norm_l1: float, dt: float,
                   control: StepControl) -> RunStatus:
    """Steady when |rhs|_1 * cellvol / mass <= steady_tol; BlowUp when the
    density threshold is crossed or dt collapsed below dt_floor; otherwise
    Running (the driver turns Running into Finished by the clock)."""
    g = f.grid
    if float(f.values.max(initial=0.0)) >= control.blowup_threshold(g) \
            or dt < control.dt_floor:
        return RunStatus("blowup")
    mass = g.cell_volume * float(f.values.sum())
    if mass <= 0.0:
        return RunStatus("steady")
    if rhs_norm_l1 * g.cell_volume / mass <= control.steady_tol:
        return RunStatus("steady")
    return RunStatus("running")
