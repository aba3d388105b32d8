"""Run configuration: JSON schema, strict validation, model construction.

A config is either a full description (grid/model/quadrature/...) or a
scenario reference {"scenario": name, <flat parameter overrides>}.  Unknown
keys are rejected with their field path; the fully resolved form is echoed
to output_dir/config.resolved.json by the driver.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Any, Callable, Optional

from .errors import ConfigurationError
from .interaction import QuadratureRule
from .mesh import Grid, build_grid
from .models import (ExponentialKernel, ExternalPotential, Gaussian2DKernel,
                     GaussianKernel, InternalEnergy, Kernel, Model,
                     MorseKernel, PowerLawKernel, QuasiMorseKernel,
                     TentKernel, WeightedSumKernel)
from .reconstruct import LimiterParams
from .stepping import StepControl

_TOP_KEYS = {"grid", "model", "quadrature", "convolution", "limiter",
             "integrator", "step", "t_end", "snapshot_interval",
             "output_dir", "initial", "scenario_name", "notes"}
_GRID_KEYS = {"bounds", "n_cells"}
_MODEL_KEYS = {"internal", "external", "kernel"}
_INTERNAL_KEYS = {"variant", "nu", "m", "epsilon"}
_EXTERNAL_KEYS = {"variant", "c"}
_LIMITER_KEYS = {"theta", "order"}
_STEP_KEYS = {"cfl_safety", "dt_max", "dt_floor", "rho_blowup", "steady_tol",
              "fixed_dt"}
_KERNEL_KEYS = {
    "power_law": {"variant", "a"},
    "gaussian": {"variant", "amplitude", "sigma"},
    "gaussian2d": {"variant", "amplitude"},
    "exponential": {"variant", "amplitude", "ell"},
    "tent": {"variant"},
    "morse": {"variant", "c", "ell"},
    "quasi_morse": {"variant", "lam", "c", "ell", "k"},
    "weighted_sum": {"variant", "terms"},
}
_INITIAL_KEYS = {
    "box": {"type", "bounds", "height", "mass"},
    "gaussian": {"type", "center", "variance", "mass"},
    "gaussian_sum": {"type", "components", "mass"},
    "ring": {"type", "radius", "width", "mass"},
    "constant": {"type", "value", "mass"},
}


def _check_keys(obj: dict, allowed: set, path: str) -> None:
    if not isinstance(obj, dict):
        raise ConfigurationError(f"{path}: expected an object")
    extra = set(obj) - allowed
    if extra:
        raise ConfigurationError(
            f"{path}: unknown key(s) {sorted(extra)} (allowed: "
            f"{sorted(allowed)})")


def build_kernel(spec: Optional[dict], path: str = "model.kernel"
                 ) -> Optional[Kernel]:
    if spec is None:
        return None
    if not isinstance(spec, dict) or "variant" not in spec:
        raise ConfigurationError(f"{path}: kernel spec needs a 'variant'")
    v = spec["variant"]
    if v not in _KERNEL_KEYS:
        raise ConfigurationError(f"{path}.variant: unknown kernel {v!r}")
    _check_keys(spec, _KERNEL_KEYS[v], path)
    if v == "power_law":
        return PowerLawKernel(float(spec.get("a", 2.0)))
    if v == "gaussian":
        return GaussianKernel(float(spec.get("amplitude", -1.0)),
                              float(spec.get("sigma", 1.0)))
    if v == "gaussian2d":
        return Gaussian2DKernel(float(spec.get("amplitude", -1.0)))
    if v == "exponential":
        return ExponentialKernel(float(spec.get("amplitude", 1.0)),
                                 float(spec.get("ell", 1.0)))
    if v == "tent":
        return TentKernel()
    if v == "morse":
        return MorseKernel(float(spec.get("c", 1.5)),
                           float(spec.get("ell", 0.5)))
    if v == "quasi_morse":
        return QuasiMorseKernel(float(spec.get("lam", 100.0)),
                                float(spec.get("c", 10.0 / 9.0)),
                                float(spec.get("ell", 0.75)),
                                float(spec.get("k", 0.5)))
    terms = spec.get("terms")
    if not terms:
        raise ConfigurationError(f"{path}.terms: weighted_sum needs terms")
    built = tuple((float(c), build_kernel(k, f"{path}.terms[{i}]"))
                  for i, (c, k) in enumerate(terms))
    return WeightedSumKernel(built)


@dataclass
class SimConfig:
    """A validated, fully-resolved run configuration."""

    raw: dict
    grid: Grid
    model: Model
    quadrature: QuadratureRule
    convolution: str
    limiter: LimiterParams
    integrator: str
    step: StepControl
    t_end: float
    snapshot_interval: Optional[float]
    output_dir: Optional[str]
    initial: dict
    scenario_name: Optional[str] = None
    exact_steady: Optional[Callable] = None  # closed form, set by presets

    def as_json(self) -> str:
        return json.dumps(self.raw, indent=2, sort_keys=True)


def validate_config(raw: dict) -> SimConfig:
    """Strictly validate a full config dict and build the typed objects."""
    _check_keys(raw, _TOP_KEYS, "config")
    for key in ("grid", "model", "t_end", "initial"):
        if key not in raw:
            raise ConfigurationError(f"config: missing required key {key!r}")

    _check_keys(raw["grid"], _GRID_KEYS, "grid")
    try:
        grid = build_grid(raw["grid"]["bounds"], raw["grid"]["n_cells"])
    except (KeyError, TypeError) as e:
        raise ConfigurationError(f"grid: {e}") from e

    mspec = raw["model"]
    _check_keys(mspec, _MODEL_KEYS, "model")
    ispec = mspec.get("internal", {"variant": "none"})
    _check_keys(ispec, _INTERNAL_KEYS, "model.internal")
    internal = InternalEnergy(ispec.get("variant", "none"),
                              float(ispec.get("nu", 1.0)),
                              float(ispec.get("m", 2.0)),
                              float(ispec.get("epsilon", 0.0)))
    espec = mspec.get("external", {"variant": "none"})
    _check_keys(espec, _EXTERNAL_KEYS, "model.external")
    external = ExternalPotential(espec.get("variant", "none"),
                                 float(espec.get("c", 1.0)))
    kernel = build_kernel(mspec.get("kernel"))
    model = Model(internal, external, kernel)

    quad = QuadratureRule(raw.get("quadrature", "midpoint"))
    conv = raw.get("convolution", "auto")
    if conv not in ("auto", "direct", "fft"):
        raise ConfigurationError(f"convolution: unknown path {conv!r}")

    lspec = raw.get("limiter", {})
    _check_keys(lspec, _LIMITER_KEYS, "limiter")
    limiter = LimiterParams(float(lspec.get("theta", 2.0)),
                            int(lspec.get("order", 2)))

    integ = raw.get("integrator", "ssprk3")
    if integ not in ("euler", "ssprk3"):
        raise ConfigurationError(f"integrator: unknown {integ!r}")

    sspec = raw.get("step", {})
    _check_keys(sspec, _STEP_KEYS, "step")
    try:
        step = StepControl(
            cfl_safety=float(sspec.get("cfl_safety", 0.9)),
            dt_max=(float(sspec["dt_max"])
                    if sspec.get("dt_max") is not None else math.inf),
            dt_floor=float(sspec.get("dt_floor", 1e-12)),
            rho_blowup=(float(sspec["rho_blowup"])
                        if sspec.get("rho_blowup") is not None else None),
            steady_tol=float(sspec.get("steady_tol", 1e-7)),
            fixed_dt=(float(sspec["fixed_dt"])
                      if sspec.get("fixed_dt") is not None else None))
    except ValueError as e:
        raise ConfigurationError(f"step: {e}") from e

    t_end = float(raw["t_end"])
    if t_end <= 0:
        raise ConfigurationError("t_end must be positive")
    snap = raw.get("snapshot_interval")
    snap = float(snap) if snap is not None else None
    if snap is not None and snap <= 0:
        raise ConfigurationError("snapshot_interval must be positive")

    init = raw["initial"]
    kind = init.get("type") if isinstance(init, dict) else None
    if kind not in _INITIAL_KEYS:
        raise ConfigurationError(f"initial.type: unknown {kind!r}")
    _check_keys(init, _INITIAL_KEYS[kind], "initial")

    # cross-field rules
    if model.kernel is not None:
        model.kernel.validate_for_dim(grid.ndim)
        if model.kernel.singular_at_origin and quad in (
                QuadratureRule.MIDPOINT, QuadratureRule.TRAPEZOID):
            raise ConfigurationError(
                "quadrature: singular kernel requires exact_integral (1D) "
                "or gauss_tensor4 (2D)")
        if grid.ndim == 2 and quad is QuadratureRule.EXACT_INTEGRAL:
            raise ConfigurationError("quadrature: exact_integral is 1D only")
        if grid.ndim == 1 and quad is QuadratureRule.GAUSS_TENSOR4:
            raise ConfigurationError("quadrature: gauss_tensor4 is 2D only")
    if external.variant == "log_confinement":
        if grid.ndim != 2:
            raise ConfigurationError("model.external: log_confinement is 2D")
        if grid.nx % 2 or grid.ny % 2:
            raise ConfigurationError(
                "grid: log_confinement needs even cell counts so no cell "
                "center sits at the origin")

    # echoable form with every default materialized
    resolved = {
        "grid": {"bounds": raw["grid"]["bounds"],
                 "n_cells": raw["grid"]["n_cells"]},
        "model": {
            "internal": {"variant": internal.variant, "nu": internal.nu,
                         "m": internal.m, "epsilon": internal.epsilon},
            "external": {"variant": external.variant, "c": external.c},
            "kernel": mspec.get("kernel"),
        },
        "quadrature": quad.value,
        "convolution": conv,
        "limiter": {"theta": limiter.theta, "order": limiter.order},
        "integrator": integ,
        "step": {"cfl_safety": step.cfl_safety,
                 "dt_max": None if math.isinf(step.dt_max) else step.dt_max,
                 "dt_floor": step.dt_floor,
                 "rho_blowup": step.rho_blowup,
                 "steady_tol": step.steady_tol,
                 "fixed_dt": step.fixed_dt},
        "t_end": t_end,
        "snapshot_interval": snap,
        "output_dir": raw.get("output_dir"),
        "initial": init,
        "scenario_name": raw.get("scenario_name"),
    }
    return SimConfig(raw=resolved, grid=grid, model=model, quadrature=quad,
                     convolution=conv, limiter=limiter, integrator=integ,
                     step=step, t_end=t_end, snapshot_interval=snap,
                     output_dir=raw.get("output_dir"), initial=init,
                     scenario_name=raw.get("scenario_name"))


def load_config(source, overrides: Optional[dict] = None) -> SimConfig:
    """Load a config from a dict, a JSON string, or a file path.

    {"scenario": name, <params>} resolves a preset with flat parameter
    overrides; anything else is validated as a full config.  `overrides`
    are applied on top (flat scenario parameters, or dotted paths like
    "step.steady_tol" for full configs).
    """
    from . import scenarios  # late import: scenarios builds configs

    if isinstance(source, str):
        try:
            if source.lstrip().startswith("{"):
                raw = json.loads(source)
            else:
                with open(source) as fh:
                    raw = json.load(fh)
        except json.JSONDecodeError as e:
            raise ConfigurationError(
                f"config parse error at line {e.lineno}, column {e.colno}: "
                f"{e.msg}") from e
    else:
        raw = dict(source)

    if "scenario" in raw:
        name = raw.pop("scenario")
        params = dict(raw)
        params.update(overrides or {})
        return scenarios.build_scenario(name, params)

    raw = _apply_dotted(raw, overrides or {})
    return validate_config(raw)


def _apply_dotted(raw: dict, overrides: dict) -> dict:
    out = json.loads(json.dumps(raw))  # deep copy, JSON-safe
    for key, value in overrides.items():
        node = out
        parts = key.split(".")
        for p in parts[:-1]:
            node = node.setdefault(p, {})
        node[parts[-1]] = value
    return out


def parse_set_value(text: str) -> Any:
    """Parse a --set value: JSON literal if possible, else raw string."""
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text
