"""Run orchestration: the time loop with diagnostics and snapshot output,
the convergence-study harness and the critical-mass bisection sweep.

Every accepted step appends a diagnostics record (time, step, mass, free
energy, dissipation, extrema); snapshots are kept in memory on the report
and, when an output directory is configured, also written as CSV along with
diagnostics.csv, summary.json and config.resolved.json.  Re-running a
config reproduces every output bit for bit: summation orders are fixed and
nothing is seeded from the clock.
"""

from __future__ import annotations

import json
import logging
import math
import os
import struct
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from .config import SimConfig, load_config
from .diagnostics import (DiagnosticsRecord, discrete_dissipation,
                          discrete_entropy, error_norms, observed_order)
from .errors import ConfigurationError, NumericsError
from .fluxes import SpatialOperator
from .initialdata import project_configured
from .interaction import build_weight_table, dump_table_csv
from .mesh import Field, total_mass
from .stepping import (BlowUpSignal, RunStatus, cfl_max_dt, classify_state,
                       diffusive_max_dt, forward_euler_step, ssp_rk3_step)

log = logging.getLogger("gffv")


@dataclass
class RunReport:
    status: RunStatus
    t_final: float
    n_steps: int
    field: Field
    records: List[DiagnosticsRecord]
    snapshots: List[Tuple[float, np.ndarray]]
    config: SimConfig
    output_dir: Optional[str] = None

    @property
    def mass_initial(self) -> float:
        return self.records[0].mass

    @property
    def mass_final(self) -> float:
        return self.records[-1].mass

    def summary(self) -> dict:
        return {"status": self.status.kind,
                "t_final": self.t_final,
                "mass_initial": self.mass_initial,
                "mass_final": self.mass_final,
                "entropy_final": self.records[-1].entropy,
                "n_steps": self.n_steps}


def _write_snapshot_csv(path: str, f: Field) -> None:
    g = f.grid
    with open(path, "w") as fh:
        if g.ndim == 1:
            fh.write("x,rho\n")
            for x, r in zip(g.centers, f.values):
                fh.write(f"{x:.17g},{r:.17g}\n")
        else:
            fh.write("x,y,rho\n")
            for iy, y in enumerate(g.y_centers):
                for ix, x in enumerate(g.x_centers):
                    fh.write(f"{x:.17g},{y:.17g},{f.values[ix, iy]:.17g}\n")


def _write_snapshot_binary(path: str, f: Field) -> None:
    """Raw dump: 16-byte header (magic 'GFFV', u32 rank, u32 nx, u32 ny with
    ny=1 in 1D), then float64 values, row-major, little-endian."""
    g = f.grid
    if g.ndim == 1:
        header = struct.pack("<4sIII", b"GFFV", 1, g.n, 1)
    else:
        header = struct.pack("<4sIII", b"GFFV", 2, g.nx, g.ny)
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(np.ascontiguousarray(f.values, dtype="<f8").tobytes())


def build_operator(cfg: SimConfig) -> SpatialOperator:
    """The spatial discretization a config describes (table included)."""
    table = (build_weight_table(cfg.model.kernel, cfg.grid, cfg.quadrature)
             if cfg.model.kernel is not None else None)
    return SpatialOperator(cfg.model, cfg.grid, table, cfg.limiter,
                           cfg.convolution)


def run_simulation(cfg: SimConfig, binary_snapshots: bool = False,
                   dump_weights: bool = False) -> RunReport:
    """Integrate one configuration until t_end, Steady or BlowUp."""
    grid, model = cfg.grid, cfg.model
    op = build_operator(cfg)
    table = op.table
    f = project_configured(cfg.initial, grid)
    control = cfg.step

    out = cfg.output_dir
    diag_fh = None
    if out:
        os.makedirs(out, exist_ok=True)
        with open(os.path.join(out, "config.resolved.json"), "w") as fh:
            fh.write(cfg.as_json())
        if dump_weights and table is not None:
            dump_table_csv(table, os.path.join(out, "weights.csv"))
        diag_fh = open(os.path.join(out, "diagnostics.csv"), "w")
        diag_fh.write("t,dt,mass,entropy,dissipation,rho_min,rho_max\n")

    def record(t, dt, f, ev, status):
        conv_vals = ev.conv
        rec = DiagnosticsRecord(
            t=t, dt=dt, mass=total_mass(f),
            entropy=discrete_entropy(f, model, table, conv_values=conv_vals),
            dissipation=discrete_dissipation(ev.velocities, ev.states, grid),
            rho_min=float(f.values.min()), rho_max=float(f.values.max()),
            status=status)
        records.append(rec)
        if diag_fh:
            diag_fh.write(f"{rec.t:.17g},{rec.dt:.17g},{rec.mass:.17g},"
                          f"{rec.entropy:.17g},{rec.dissipation:.17g},"
                          f"{rec.rho_min:.17g},{rec.rho_max:.17g}\n")

    def snapshot(t, f):
        snapshots.append((t, f.values.copy()))
        if out:
            stem = os.path.join(out, f"snapshot_t{t:012.6f}")
            _write_snapshot_csv(stem + ".csv", f)
            if binary_snapshots:
                _write_snapshot_binary(stem + ".bin", f)

    records: List[DiagnosticsRecord] = []
    snapshots: List[Tuple[float, np.ndarray]] = []
    t = 0.0
    n_steps = 0
    ev = op.evaluate(f)
    status = RunStatus("running")
    record(0.0, 0.0, f, ev, status)
    snapshot(0.0, f)
    interval = cfg.snapshot_interval
    next_snap = interval if interval else math.inf
    t_end_slack = max(1e-12 * cfg.t_end, 1e-14)
    # dt fed to the blow-up classifier: the stability-limited step, never
    # the clock-clipped one (landing exactly on t_end or a snapshot time
    # must not look like a dt collapse)
    dt_signal = math.inf

    try:
        while True:
            status = classify_state(f, ev.rhs_l1(), dt_signal, control)
            if status.kind == "running" and t >= cfg.t_end - t_end_slack:
                status = RunStatus("finished", t)
            if status.terminal:
                status = RunStatus(status.kind, t)
                break

            bound = control.cfl_safety * min(
                cfl_max_dt(ev.velocities, grid, cfg.limiter.order),
                diffusive_max_dt(f, model, grid))
            if control.fixed_dt is not None:
                dt_stab = control.fixed_dt
                if dt_stab > bound * (1.0 + 1e-9):
                    raise NumericsError(
                        f"fixed dt={dt_stab:g} violates the stability bound "
                        f"{bound:g} at t={t:g}")
            else:
                dt_stab = min(bound, control.dt_max)
            dt = max(min(dt_stab, cfg.t_end - t, next_snap - t), 0.0)

            try:
                if cfg.integrator == "euler":
                    f, ev = forward_euler_step(op, f, dt, control, ev)
                    dt_used = dt
                else:
                    f, ev, dt_used = ssp_rk3_step(op, f, dt, control, ev)
            except BlowUpSignal:
                status = RunStatus("blowup", t)
                break
            dt_signal = dt_used if dt_used < dt * (1.0 - 1e-9) else dt_stab
            t += dt_used
            n_steps += 1
            record(t, dt_used, f, ev, RunStatus("running"))
            if t >= next_snap - 1e-12:
                snapshot(t, f)
                next_snap += interval
    finally:
        if not snapshots or snapshots[-1][0] != t:
            snapshot(t, f)
        if diag_fh:
            diag_fh.close()

    records[-1].status = status
    report = RunReport(status=status, t_final=t, n_steps=n_steps, field=f,
                       records=records, snapshots=snapshots, config=cfg,
                       output_dir=out)
    if out:
        with open(os.path.join(out, "summary.json"), "w") as fh:
            json.dump(report.summary(), fh, indent=2)
    log.info("run %s: %s at t=%.6g after %d steps",
             cfg.scenario_name or "custom", status.kind, t, n_steps)
    return report


# ---------------------------------------------------------------------------
# convergence study
# ---------------------------------------------------------------------------

@dataclass
class ConvergenceResult:
    scenario: str
    reference: str
    cells: List[int]
    dx: List[float]
    l1: List[float]
    linf: List[float]
    l1_orders: List[float]
    linf_orders: List[float]
    flagged: List[str] = field(default_factory=list)

    def rows(self):
        out = []
        for i in range(len(self.l1)):
            out.append({"n": self.cells[i], "dx": self.dx[i],
                        "l1": self.l1[i], "linf": self.linf[i]})
        return out


def _run_level(args):
    scenario, params = args
    report = run_simulation(load_config({"scenario": scenario, **params}))
    return report.status.kind, report.field


def run_convergence_study(scenario: str, levels: int = 4,
                          reference: str = "closed_form",
                          params: Optional[dict] = None,
                          base_cells: Optional[int] = None,
                          jobs: int = 1) -> ConvergenceResult:
    """Spatial-accuracy ladder dx, dx/2, ..., against either the scenario's
    closed-form steady state or grid-to-grid differences.

    closed_form: every level is compared with the exact profile.
    finest_grid: each level is compared with the next finer level restricted
    by exact cell-average coarsening (consecutive differences estimate the
    order without the reference-contamination bias of a single fixed
    reference; the ratio of successive differences is 2^order exactly for a
    clean order).  Levels that hit t_end before Steady are flagged.
    """
    if levels < 3:
        raise ConfigurationError("need at least 3 ladder levels")
    if reference not in ("closed_form", "finest_grid"):
        raise ConfigurationError(f"unknown reference mode {reference!r}")
    params = dict(params or {})
    cfg0 = load_config({"scenario": scenario, **params})
    if reference == "closed_form" and cfg0.exact_steady is None:
        raise ConfigurationError(
            f"scenario {scenario} has no closed-form steady state; use "
            "finest_grid")
    if cfg0.grid.ndim != 1:
        raise ConfigurationError("convergence ladders are 1D")
    n0 = base_cells or cfg0.grid.n
    cells = [n0 * (2 ** k) for k in range(levels)]

    tasks = [(scenario, {**params, "n_cells": n}) for n in cells]
    results = _map_tasks(_run_level, tasks, jobs)

    flagged = []
    fields = []
    for n, (status, fld) in zip(cells, results):
        fields.append(fld)
        if status != "steady":
            flagged.append(f"n={n}: run ended {status} before Steady")

    dxs = [fields[0].grid.dx / (2 ** k) for k in range(levels)]
    if reference == "closed_form":
        errs = [error_norms(f, cfg0.exact_steady) for f in fields]
        l1 = [e[0] for e in errs]
        linf = [e[1] for e in errs]
        dx_used = dxs
    else:
        errs = [error_norms(fields[k], fields[k + 1])
                for k in range(levels - 1)]
        l1 = [e[0] for e in errs]
        linf = [e[1] for e in errs]
        dx_used = dxs[:-1]
    return ConvergenceResult(
        scenario=scenario, reference=reference, cells=cells, dx=dx_used,
        l1=l1, linf=linf, l1_orders=observed_order(l1),
        linf_orders=observed_order(linf), flagged=flagged)


# ---------------------------------------------------------------------------
# critical-mass sweep
# ---------------------------------------------------------------------------

@dataclass
class SweepResult:
    scenario: str
    mass_decaying: float
    mass_blowing: float
    probes: List[Tuple[float, str]]

    @property
    def bracket(self) -> Tuple[float, float]:
        return (min(self.mass_decaying, self.mass_blowing),
                max(self.mass_decaying, self.mass_blowing))


def _probe_mass(args):
    scenario, params, mass = args
    cfg = load_config({"scenario": scenario, **params, "mass": mass})
    report = run_simulation(cfg)
    return "blowup" if report.status.kind == "blowup" else "decay"


def run_mass_sweep(scenario: str, mass_lo: float, mass_hi: float,
                   iters: int = 4, params: Optional[dict] = None,
                   jobs: int = 1) -> SweepResult:
    """Bisect the total mass between a decaying and a blowing-up endpoint.
    Each probe rescales the scenario's initial profile to the probe mass and
    runs until a terminal classification or t_end (non-blowup counts as
    decay)."""
    if not mass_hi > mass_lo:
        raise ConfigurationError("mass bracket is degenerate")
    params = dict(params or {})
    ends = _map_tasks(_probe_mass, [(scenario, params, mass_lo),
                                    (scenario, params, mass_hi)], jobs)
    probes = [(mass_lo, ends[0]), (mass_hi, ends[1])]
    if ends[0] == ends[1]:
        raise ConfigurationError(
            f"both bracket endpoints classify as {ends[0]}; widen the "
            "bracket")
    lo_decays = ends[0] == "decay"
    decaying, blowing = (mass_lo, mass_hi) if lo_decays else (mass_hi, mass_lo)
    for _ in range(iters):
        mid = 0.5 * (decaying + blowing)
        kind = _probe_mass((scenario, params, mid))
        probes.append((mid, kind))
        if kind == "decay":
            decaying = mid
        else:
            blowing = mid
    return SweepResult(scenario, decaying, blowing, probes)


def _map_tasks(fn, tasks, jobs):
    jobs = max(1, min(int(jobs), len(tasks), _thread_cap()))
    if jobs == 1:
        return [fn(t) for t in tasks]
    try:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            return list(ex.map(fn, tasks))
    except (OSError, RuntimeError) as e:  # restricted environments
        log.warning("process pool unavailable (%s); running sequentially", e)
        return [fn(t) for t in tasks]


def _thread_cap() -> int:
    env = os.environ.get("GFFV_THREADS", "")
    if env.isdigit() and int(env) > 0:
        return int(env)
    return os.cpu_count() or 1
