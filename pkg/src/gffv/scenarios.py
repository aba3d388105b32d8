"""Scenario presets: steady states, merging dynamics, critical-mass regimes,
boundary-overshoot studies and 2D patterns.

Each preset maps a small set of named parameters onto a full run
configuration.  Defaults pin each run's standard test setup; free
parameters (noted per scenario) were calibrated once and frozen.  Build with build_scenario(name, params) or through
config.load_config({"scenario": name, ...}).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Dict, Optional

import numpy as np

from .config import SimConfig, validate_config
from .errors import ConfigurationError

SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class ScenarioInfo:
    name: str
    description: str
    builder: Callable
    params: tuple  # accepted parameter names


_REGISTRY: Dict[str, ScenarioInfo] = {}


def _scenario(name, description, params):
    def deco(fn):
        _REGISTRY[name] = ScenarioInfo(name, description, fn,
                                       tuple(sorted(params)))
        return fn
    return deco


def list_scenarios():
    return [(_REGISTRY[k].name, _REGISTRY[k].description)
            for k in sorted(_REGISTRY)]


def build_scenario(name: str, params: Optional[dict] = None) -> SimConfig:
    if name not in _REGISTRY:
        known = ", ".join(sorted(_REGISTRY))
        raise ConfigurationError(f"unknown scenario {name!r} (known: {known})")
    info = _REGISTRY[name]
    params = dict(params or {})
    common_keys = ("t_end", "output_dir", "snapshot_interval", "integrator",
                   "convolution")
    common = {k: params.pop(k) for k in common_keys if k in params}
    extra = set(params) - set(info.params) - {"n_cells"}
    if extra:
        raise ConfigurationError(
            f"scenario {name}: unknown parameter(s) {sorted(extra)} "
            f"(accepted: {sorted(set(info.params) | {'n_cells'} | set(common_keys))})")
    cfg = info.builder(**params)
    for k, v in common.items():
        cfg[k] = v
    cfg["scenario_name"] = name
    exact = cfg.pop("_exact_steady", None)
    sim = validate_config(cfg)
    sim.exact_steady = exact
    return sim


def _quadlog_kernel_1d():
    return {"variant": "weighted_sum",
            "terms": [[1.0, {"variant": "power_law", "a": 2.0}],
                      [-1.0, {"variant": "power_law", "a": 0.0}]]}


@_scenario("quadlog_1d",
           "1D quadratic attraction + log repulsion; pure interaction. The "
           "unit-mass steady state is the semicircle sqrt(2-x^2)/pi, Holder "
           "1/2 at its boundary: convergence orders 0.5 (Linf) / 1.5 (L1). "
           "Domain is sqrt(2)-commensurate so the free boundary is "
           "mesh-aligned at every ladder level. Budget: seconds.",
           params=("mass",))
def _quadlog_1d(n_cells=120, mass=1.0):
    if n_cells % 6:
        raise ConfigurationError(
            "quadlog_1d: n_cells must be a multiple of 6 so the steady-state "
            "support edges +-sqrt(2) fall on cell edges")
    L = 1.5 * SQRT2
    M = float(mass)

    def exact(x):
        return (M / math.pi) * np.sqrt(np.maximum(2.0 - np.asarray(x) ** 2,
                                                  0.0))

    return {"grid": {"bounds": [-L, L], "n_cells": n_cells},
            "model": {"kernel": _quadlog_kernel_1d()},
            "quadrature": "exact_integral",
            "integrator": "ssprk3",
            "step": {"dt_max": 0.1, "steady_tol": 1e-7},
            "t_end": 400.0,
            "initial": {"type": "gaussian", "center": 0.0, "variance": 1.0,
                        "mass": M},
            "_exact_steady": exact}


@_scenario("aggdiff_gauss_1d",
           "1D nonlinear diffusion (nu/m rho^m) against a normalized "
           "attractive Gaussian well. Steady support is compact with "
           "boundary Holder exponent min(1, 1/(m-1)). nu defaults: 1.48 for "
           "m=3 (support [-2,2]), 0.35 for m=2 (steady exists only for "
           "small enough nu when m=2; calibrated). two_bump=True selects "
           "the metastable two-bump datum at +-3 on [-6,6]. Budget: tens of "
           "seconds.",
           params=("m", "nu", "sigma", "mass", "two_bump"))
def _aggdiff_gauss_1d(n_cells=None, m=3.0, nu=None, sigma=1.0, mass=1.0,
                      two_bump=False):
    m = float(m)
    if nu is None:
        nu = 1.48 if m == 3.0 else 0.35
    M = float(mass)
    if two_bump:
        grid = {"bounds": [-6.0, 6.0], "n_cells": n_cells or 300}
        initial = {"type": "gaussian_sum",
                   "components": [
                       {"center": -3.0, "variance": 1.0, "mass": M / 2},
                       {"center": 3.0, "variance": 1.0, "mass": M / 2}],
                   "mass": M}
        t_end = 100.0
    else:
        grid = {"bounds": [-4.0, 4.0], "n_cells": n_cells or 200}
        initial = {"type": "gaussian", "center": 0.0, "variance": 1.0,
                   "mass": M}
        t_end = 150.0
    return {"grid": grid,
            "model": {"internal": {"variant": "power_law", "nu": float(nu),
                                   "m": m},
                      "kernel": {"variant": "gaussian", "amplitude": -1.0,
                                 "sigma": float(sigma)}},
            "quadrature": "midpoint",
            "step": {"dt_max": 0.05, "steady_tol": 1e-7},
            "t_end": t_end,
            "initial": initial}


@_scenario("tent_merge_1d",
           "1D nonlinear diffusion with the compact tent well -(1-|x|)+. "
           "Box data chi_[-2,2] fragments into two bumps that merge into "
           "one; chi_[-3,3] freezes into three bumps whose supports sit "
           "beyond the kernel range, so the interaction force between them "
           "vanishes identically. (m, nu) = (3, 0.05) calibrated to produce "
           "the 1-vs-3 topology at dx = 0.05. Budget: under a minute.",
           params=("half_width", "m", "nu"))
def _tent_merge_1d(n_cells=160, half_width=2.0, m=3.0, nu=0.05):
    return {"grid": {"bounds": [-4.0, 4.0], "n_cells": n_cells},
            "model": {"internal": {"variant": "power_law", "nu": float(nu),
                                   "m": float(m)},
                      "kernel": {"variant": "tent"}},
            "quadrature": "exact_integral",
            "step": {"dt_max": 0.1, "steady_tol": 1e-8},
            "t_end": 600.0,
            "initial": {"type": "box",
                        "bounds": [-float(half_width), float(half_width)]}}


@_scenario("doublewell_1d",
           "1D quadratic diffusion in the double well x^4/4 - x^2/2. A "
           "small Gaussian (mass 0.1, variance 0.2) centered at x_c splits "
           "into the wells: x_c=0 gives the symmetric two-bump steady "
           "state, x_c=0.2 an asymmetric one. Budget: seconds.",
           params=("mass", "x_c"))
def _doublewell_1d(n_cells=200, x_c=0.0, mass=0.1):
    return {"grid": {"bounds": [-2.0, 2.0], "n_cells": n_cells},
            "model": {"internal": {"variant": "power_law", "nu": 1.0,
                                   "m": 2.0},
                      "external": {"variant": "double_well"}},
            "step": {"dt_max": 0.05, "steady_tol": 1e-12},
            "t_end": 16.0,
            "snapshot_interval": 0.25,
            "initial": {"type": "gaussian", "center": float(x_c),
                        "variance": 0.2, "mass": float(mass)}}


def _gks_config(m, mass, n_cells, t_end, external=None, initial=None,
                snapshot_interval=None):
    n = n_cells or 160
    dx = 8.0 / n
    raw = {"grid": {"bounds": [-4.0, 4.0], "n_cells": n},
           "model": {"internal": {"variant": "power_law", "nu": 1.0,
                                  "m": float(m)},
                     "kernel": {"variant": "power_law", "a": -0.5}},
           "quadrature": "exact_integral",
           # a cell average can never exceed mass/dx, so blow-up detection
           # uses a mass-aware concentration threshold
           "step": {"dt_max": 0.05, "steady_tol": 1e-7,
                    "rho_blowup": 0.25 * float(mass) / dx},
           "t_end": t_end,
           "initial": initial or {"type": "gaussian", "center": 0.0,
                                  "variance": 0.5, "mass": float(mass)}}
    if external:
        raw["model"]["external"] = external
    if snapshot_interval:
        raw["snapshot_interval"] = snapshot_interval
    return raw


@_scenario("gks_balanced_1d",
           "Generalized Keller-Segel, balanced regime m=1.5, kernel "
           "|x|^(-1/2)/(-1/2), nu=1: mass above the critical value "
           "M_c ~ 0.055 concentrates into a single cell (the conservative "
           "scheme's blow-up signature), below it the solution decays. "
           "Budget: seconds per run.",
           params=("m", "mass"))
def _gks_balanced_1d(n_cells=None, m=1.5, mass=0.05):
    return _gks_config(m, mass, n_cells, t_end=400.0)


@_scenario("gks_selfsim_1d",
           "Balanced Keller-Segel in self-similar variables (confinement "
           "|x|^2/2 added): subcritical masses converge to the self-similar "
           "profile at a mass-independent exponential rate. Budget: "
           "seconds per run.",
           params=("m", "mass"))
def _gks_selfsim_1d(n_cells=None, m=1.5, mass=0.0275):
    return _gks_config(m, mass, n_cells, t_end=10.0,
                       external={"variant": "quadratic_half"},
                       snapshot_interval=0.1)


def _two_bump_initial(mass):
    M = float(mass)
    return {"type": "gaussian_sum",
            "components": [
                {"center": -2.0, "variance": 0.125, "mass": M / 2},
                {"center": 2.0, "variance": 0.125, "mass": M / 2}],
            "mass": M}


@_scenario("gks_diffusion_1d",
           "Generalized Keller-Segel at m=1.6 (diffusion-dominated "
           "scaling), two narrow bumps at +-2, mass 0.057. At dx=0.05 the "
           "bumps spread, drift together and finally concentrate into a "
           "cell-scale spike at the origin (the singular kernel's discrete "
           "offset-zero weight is finite, so concentration stops at the "
           "grid scale). Budget: seconds.",
           params=("m", "mass"))
def _gks_diffusion_1d(n_cells=None, m=1.6, mass=0.057):
    return _gks_config(m, mass, n_cells, t_end=400.0,
                       initial=_two_bump_initial(mass))


@_scenario("gks_aggregation_1d",
           "Same model as gks_diffusion_1d at smaller masses (0.047/0.048 "
           "nominal): over the plotted horizon the bumps spread and the "
           "peak density decays. Budget: seconds.",
           params=("m", "mass"))
def _gks_aggregation_1d(n_cells=None, m=1.6, mass=0.048):
    return _gks_config(m, mass, n_cells, t_end=100.0,
                       initial=_two_bump_initial(mass))


@_scenario("quadnewton_1d",
           "1D quadratic attraction + Newtonian (|x|) repulsion; the exact "
           "steady state is flat at M/2 on [-1,1]. With exact-integral "
           "weights and no regularization the support edge overshoots by "
           "~10% independent of dx (the offset-zero weight acts as an "
           "anti-diffusion -dx^2/4 rho); epsilon = 0.25 dx^2 cancels it "
           "exactly, and the midpoint rule is overshoot-free. The default "
           "grid keeps +-1 off the cell edges (edge-aligned grids hide the "
           "overshoot). Budget: seconds.",
           params=("epsilon", "mass", "quadrature"))
def _quadnewton_1d(n_cells=90, epsilon=None, quadrature="exact_integral",
                   mass=1.0):
    dx = 4.0 / n_cells
    eps = 0.25 * dx * dx if epsilon is None else float(epsilon)
    M = float(mass)

    def exact(x):
        return np.where(np.abs(np.asarray(x)) <= 1.0, M / 2.0, 0.0)

    return {"grid": {"bounds": [-2.0, 2.0], "n_cells": n_cells},
            "model": {"internal": {"variant": "none", "epsilon": eps},
                      "kernel": {"variant": "weighted_sum",
                                 "terms": [[1.0, {"variant": "power_law",
                                                  "a": 2.0}],
                                           [-1.0, {"variant": "power_law",
                                                   "a": 1.0}]]}},
            "quadrature": quadrature,
            "step": {"dt_max": 0.02, "steady_tol": 1e-10},
            "t_end": 80.0,
            "initial": {"type": "gaussian", "center": 0.0, "variance": 0.25,
                        "mass": M},
            "_exact_steady": exact}


@_scenario("aggdiff_2d",
           "2D nonlinear diffusion (nu=0.1, m=3) with the attractive "
           "Gaussian -exp(-|x|^2)/pi, box datum chi_[-3,3]^2/4 on "
           "[-4,4]^2, 80x80 cells, fixed dt = 0.001: transient clumps merge "
           "toward a single-component state. Budget: about a minute.",
           params=("m", "nu"))
def _aggdiff_2d(n_cells=None, m=3.0, nu=0.1):
    n = n_cells or 80
    return {"grid": {"bounds": [[-4.0, 4.0], [-4.0, 4.0]],
                     "n_cells": [n, n]},
            "model": {"internal": {"variant": "power_law", "nu": float(nu),
                                   "m": float(m)},
                      "kernel": {"variant": "gaussian2d", "amplitude": -1.0}},
            "quadrature": "midpoint",
            "step": {"fixed_dt": 0.001, "steady_tol": 1e-7},
            "t_end": 10.0,
            "initial": {"type": "box",
                        "bounds": [[-3.0, 3.0], [-3.0, 3.0]],
                        "height": 0.25}}


def _quadlog_kernel_2d(log_coeff=-1.0):
    return {"variant": "weighted_sum",
            "terms": [[1.0, {"variant": "power_law", "a": 2.0}],
                      [log_coeff, {"variant": "power_law", "a": 0.0}]]}


@_scenario("quadlog_2d",
           "2D quadratic attraction + log repulsion with quadratic "
           "regularization eps = 0.4 (dx^2 + dy^2); the unregularized "
           "steady state is the unit disk at density 1/pi. Weights use the "
           "4-point tensor Gauss rule (never touches the kernel "
           "singularity). Budget: under a minute at 64^2.",
           params=("epsilon", "mass"))
def _quadlog_2d(n_cells=None, epsilon=None, mass=1.0):
    n = n_cells or 64
    dx = 3.0 / n
    eps = 0.4 * (dx * dx + dx * dx) if epsilon is None else float(epsilon)
    return {"grid": {"bounds": [[-1.5, 1.5], [-1.5, 1.5]],
                     "n_cells": [n, n]},
            "model": {"internal": {"variant": "none", "epsilon": eps},
                      "kernel": _quadlog_kernel_2d()},
            "quadrature": "gauss_tensor4",
            "step": {"dt_max": 0.05, "steady_tol": 1e-7},
            "t_end": 150.0,
            "initial": {"type": "gaussian", "center": [0.0, 0.0],
                        "variance": 0.15, "mass": float(mass)}}


@_scenario("mill_2d",
           "2D mill: interaction |x|^2/2 - log|x|/(2 pi) (the log term "
           "carries the 2D Green's-function normalization: then "
           "Lap(W*rho) = 2M - rho, which vanishes exactly at the annulus "
           "plateau rho = 2M) plus confinement -(alpha/beta) log|x|, "
           "regularized by eps = 0.2 (dx^2 + dy^2). The steady state is the "
           "constant 2 on the annulus R0 = sqrt(alpha/beta), "
           "R1 = sqrt(alpha/beta + M/(2 pi)). Even cell counts keep cell "
           "centers off the origin. Budget: seconds at 40^2.",
           params=("alpha", "beta", "epsilon", "mass"))
def _mill_2d(n_cells=None, alpha=0.25, beta=2.0 * math.pi, epsilon=None,
             mass=1.0):
    n = n_cells or 40
    dx = 2.0 / n
    eps = 0.2 * (dx * dx + dx * dx) if epsilon is None else float(epsilon)
    c = float(alpha) / float(beta)
    return {"grid": {"bounds": [[-1.0, 1.0], [-1.0, 1.0]],
                     "n_cells": [n, n]},
            "model": {"internal": {"variant": "none", "epsilon": eps},
                      "external": {"variant": "log_confinement", "c": c},
                      "kernel": _quadlog_kernel_2d(-1.0 / (2.0 * math.pi))},
            "quadrature": "gauss_tensor4",
            "step": {"dt_max": 0.02, "steady_tol": 1e-7},
            "t_end": 200.0,
            "initial": {"type": "ring", "radius": 0.32, "width": 0.06,
                        "mass": float(mass)}}
