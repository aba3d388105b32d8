"""Discrete free energy and dissipation, error norms, steady-state
characterization helpers and decay-rate fitting.

The discrete free energy of a state is
    E = cellvol * sum_j [ (1/2) (W conv rho)_j rho_j + H(rho_j) + V_j rho_j ]
and its dissipation counterpart
    I = dx * sum over interior interfaces of u^2 * min(rho_E, rho_W+)
(per-interface minimum; the global-minimum reading is available behind a
flag for comparison).  Along the semi-discrete flow dE/dt <= -I, which the
tests verify term by term.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import NumericsError
from .fluxes import InterfaceVelocities, RhsEval
from .interaction import ConvolutionOperator, WeightTable
from .mesh import Field, coarsen
from .models import Model
from .reconstruct import ReconstructedStates
from .stepping import RunStatus

# 5-point Gauss-Legendre on [-1, 1] for the L1 norm against closed forms.
_G5_NODES = np.array([-0.9061798459386640, -0.5384693101056831, 0.0,
                      0.5384693101056831, 0.9061798459386640])
_G5_WEIGHTS = np.array([0.2369268850561891, 0.4786286704993665,
                        0.5688888888888889, 0.4786286704993665,
                        0.2369268850561891])


@dataclass
class DiagnosticsRecord:
    t: float
    dt: float
    mass: float
    entropy: float
    dissipation: float
    rho_min: float
    rho_max: float
    status: RunStatus


def discrete_entropy(f: Field, model: Model,
                     table: Optional[WeightTable] = None,
                     conv: Optional[ConvolutionOperator] = None,
                     conv_values: Optional[np.ndarray] = None) -> float:
    """E = cellvol * sum [ (1/2)(W conv rho) rho + H(rho) + V rho ].

    conv_values short-circuits the convolution when the caller already has
    (W conv rho), e.g. from the current rhs evaluation.
    """
    g = f.grid
    vol = g.cell_volume
    rho = f.values
    total = float(np.sum(model.internal.value(rho)))
    if not model.external.is_trivial:
        if g.ndim == 1:
            vcells = model.external.value(g.centers)
        else:
            X, Y = g.center_mesh()
            vcells = model.external.value(X, Y)
        total += float(np.sum(vcells * rho))
    if model.kernel is not None:
        if conv_values is None:
            if conv is None:
                if table is None:
                    raise NumericsError("entropy of a nonlocal model needs "
                                        "a weight table")
                conv = ConvolutionOperator(table)
            conv_values = conv(rho)
        total += 0.5 * float(np.sum(conv_values * rho))
    return vol * total


def discrete_dissipation(vel: InterfaceVelocities,
                         states: ReconstructedStates,
                         grid, literal_global_min: bool = False) -> float:
    """I = dx * sum_j u_{j+1/2}^2 min(rho_E_j, rho_W_{j+1}) in 1D, and
    cellvol * sum_{j,k} (u^2 + v^2) min(E, W+, N, S+) in 2D (boundary cells
    drop the face pairs of interfaces they do not have).

    literal_global_min=True replaces the per-interface minimum by the global
    minimum over all interfaces, the literal typographic reading; it is a
    weaker lower bound and vanishes on any compactly supported state.
    """
    if grid.ndim == 1:
        u2 = vel.u * vel.u
        pair_min = np.minimum(states.east[:-1], states.west[1:])
        if literal_global_min:
            m = float(pair_min.min()) if pair_min.size else 0.0
            return grid.dx * float(u2.sum()) * m
        return grid.dx * float(np.sum(u2 * pair_min))
    nx, ny = states.east.shape
    uu = np.zeros((nx, ny))
    uu[:-1, :] = vel.u
    vv = np.zeros((nx, ny))
    vv[:, :-1] = vel.v
    big = np.inf
    ew = np.full((nx, ny), big)
    ew[:-1, :] = np.minimum(states.east[:-1, :], states.west[1:, :])
    ns = np.full((nx, ny), big)
    ns[:, :-1] = np.minimum(states.north[:, :-1], states.south[:, 1:])
    pair_min = np.minimum(ew, ns)
    speed2 = uu * uu + vv * vv
    if literal_global_min:
        finite = pair_min[np.isfinite(pair_min)]
        m = float(finite.min()) if finite.size else 0.0
        return grid.cell_volume * float(speed2.sum()) * m
    safe_min = np.where(np.isfinite(pair_min), pair_min, 0.0)
    return grid.cell_volume * float(np.sum(speed2 * safe_min))


def entropy_production(ev: RhsEval, grid) -> float:
    """Exact chain-rule derivative dE/dt = cellvol * sum_j xi_j rhs_j."""
    return grid.cell_volume * float(np.sum(ev.xi * ev.rhs))


def error_norms(f: Field, reference: Union[Callable, Field]
                ) -> Tuple[float, float]:
    """(L1, Linf) distance to a reference density.

    Both solutions are piecewise constant per cell, so L1 is the
    cell-average distance cellvol * sum |rho_j - rhobar_ref_j|; a closed-form
    reference is first reduced to cell averages with a 5-point Gauss rule
    per axis (comparing against the pointwise closed form instead would add
    an O(dx) in-cell variation term that swamps the scheme error).  Linf
    compares at cell centers.  A finer-grid Field reference is restricted by
    exact cell-average coarsening (grids must nest by an integer ratio).
    """
    g = f.grid
    if isinstance(reference, Field):
        rg = reference.grid
        if rg.shape == g.shape:
            ref_vals = reference.values
        else:
            ratio = rg.shape[0] // g.shape[0]
            if any(r != c * ratio for r, c in zip(rg.shape, g.shape)) \
                    or ratio < 1:
                raise NumericsError(
                    f"reference grid {rg.shape} is not an integer refinement "
                    f"of {g.shape}")
            ref_vals = coarsen(reference, ratio).values
        diff = np.abs(f.values - ref_vals)
        return (g.cell_volume * float(diff.sum()), float(diff.max()))

    if g.ndim == 1:
        nodes = g.centers[None, :] + 0.5 * g.dx * _G5_NODES[:, None]
        ref_avg = 0.5 * np.einsum("k,kj->j", _G5_WEIGHTS,
                                  np.asarray(reference(nodes)))
        l1 = g.dx * float(np.abs(f.values - ref_avg).sum())
        linf = float(np.max(np.abs(f.values - reference(g.centers))))
        return (l1, linf)
    xn = g.x_centers[None, :] + 0.5 * g.dx * _G5_NODES[:, None]
    yn = g.y_centers[None, :] + 0.5 * g.dy * _G5_NODES[:, None]
    X = xn[:, None, :, None]
    Y = yn[None, :, None, :]
    ref_nodes = np.broadcast_to(np.asarray(reference(X, Y)),
                                (5, 5, g.nx, g.ny))
    w2 = np.outer(_G5_WEIGHTS, _G5_WEIGHTS) * 0.25
    ref_avg = np.einsum("kl,kljm->jm", w2, ref_nodes)
    l1 = g.cell_volume * float(np.abs(f.values - ref_avg).sum())
    Xc, Yc = g.center_mesh()
    linf = float(np.max(np.abs(f.values - reference(Xc, Yc))))
    return (l1, linf)


def observed_order(errors: Sequence[float]) -> List[float]:
    """Per-pair orders log2(e_k / e_{k+1}) for a refinement ladder with
    mesh ratio 2."""
    errors = [float(e) for e in errors]
    if len(errors) < 2:
        raise NumericsError("need at least two errors to estimate an order")
    if any(e <= 0.0 for e in errors):
        raise NumericsError("errors must be positive")
    return [float(np.log2(a / b)) for a, b in zip(errors[:-1], errors[1:])]


def support_components(f: Field, threshold: Optional[float] = None
                       ) -> List[np.ndarray]:
    """Connected components of {rho > threshold} (adjacency along axes in
    2D), as boolean masks ordered by first cell.  Default threshold:
    1e-6 * max(rho)."""
    rho = f.values
    if threshold is None:
        threshold = 1e-6 * float(rho.max(initial=0.0))
    mask = rho > threshold
    if not mask.any():
        return []
    comps: List[np.ndarray] = []
    if f.grid.ndim == 1:
        padded = np.concatenate([[False], mask, [False]])
        starts = np.flatnonzero(padded[1:] & ~padded[:-1])
        ends = np.flatnonzero(~padded[1:] & padded[:-1])
        for s, e in zip(starts, ends):
            comp = np.zeros_like(mask)
            comp[s:e] = True
            comps.append(comp)
        return comps
    # 2D: BFS flood fill with 4-neighbor adjacency
    visited = np.zeros_like(mask)
    nx, ny = mask.shape
    for start in zip(*np.nonzero(mask & ~visited)):
        if visited[start]:
            continue
        comp = np.zeros_like(mask)
        stack = [start]
        visited[start] = True
        while stack:
            i, j = stack.pop()
            comp[i, j] = True
            for di, dj in ((1, 0), (-1, 0), (0, 1), (0, -1)):
                a, b = i + di, j + dj
                if 0 <= a < nx and 0 <= b < ny and mask[a, b] \
                        and not visited[a, b]:
                    visited[a, b] = True
                    stack.append((a, b))
        comps.append(comp)
    return comps


def xi_flatness(f: Field, xi: np.ndarray,
                threshold: Optional[float] = None) -> List[float]:
    """Oscillation max(xi) - min(xi) of the discrete potential over each
    connected component of the support.  At a discrete steady state xi is
    constant per component, so every entry is small."""
    out = []
    for comp in support_components(f, threshold):
        vals = xi[comp]
        out.append(float(vals.max() - vals.min()))
    return out


def fit_exponential_rate(times: Sequence[float], distances: Sequence[float],
                         t_min: Optional[float] = None,
                         t_max: Optional[float] = None) -> float:
    """Least-squares decay rate of d(t) ~ C exp(-rate t) over the window
    [t_min, t_max]; requires >= 10 positive samples in the window."""
    t = np.asarray(times, dtype=np.float64)
    d = np.asarray(distances, dtype=np.float64)
    sel = np.ones_like(t, dtype=bool)
    if t_min is not None:
        sel &= t >= t_min
    if t_max is not None:
        sel &= t <= t_max
    t, d = t[sel], d[sel]
    if t.size < 10:
        raise NumericsError(
            f"need at least 10 samples in the fit window, got {t.size}")
    if np.any(d <= 0.0):
        raise NumericsError("distances must be positive for a log-linear fit")
    slope = np.polyfit(t, np.log(d), 1)[0]
    return float(-slope)
