"""Named initial-data families for the driver configuration.

Each spec is a JSON-able dict with a "type" tag; build_initial_datum turns
it into something mesh.project_initial_data accepts (a closed-form callable
or a BoxIndicator).  An optional "mass" key rescales the projected field to
that total mass exactly on the grid.
"""

from __future__ import annotations

import math
import numpy as np

from .errors import ConfigurationError
from .mesh import BoxIndicator, Field, Grid, normalize_mass, project_initial_data


def _gaussian_1d(center: float, variance: float):
    c = 1.0 / math.sqrt(2.0 * math.pi * variance)
    return lambda x: c * np.exp(-(x - center) ** 2 / (2.0 * variance))


def _gaussian_2d(center, variance: float):
    cx, cy = center
    c = 1.0 / (2.0 * math.pi * variance)
    return lambda x, y: c * np.exp(-((x - cx) ** 2 + (y - cy) ** 2)
                                   / (2.0 * variance))


def build_initial_datum(spec: dict, grid: Grid):
    """Translate an initial-data spec into a projectable datum."""
    kind = spec.get("type")
    if kind == "box":
        return BoxIndicator(spec["bounds"], float(spec.get("height", 1.0)))
    if kind == "gaussian":
        var = float(spec.get("variance", 1.0))
        if var <= 0:
            raise ConfigurationError("gaussian initial data needs variance > 0")
        mass = float(spec.get("mass", 1.0))
        if grid.ndim == 1:
            center = float(spec.get("center", 0.0))
            g = _gaussian_1d(center, var)
            return lambda x: mass * g(x)
        center = spec.get("center", (0.0, 0.0))
        g = _gaussian_2d(center, var)
        return lambda x, y: mass * g(x, y)
    if kind == "gaussian_sum":
        comps = spec.get("components", [])
        if not comps:
            raise ConfigurationError("gaussian_sum needs components")
        if grid.ndim == 1:
            parts = [(float(c.get("mass", 1.0)),
                      _gaussian_1d(float(c.get("center", 0.0)),
                                   float(c.get("variance", 1.0))))
                     for c in comps]
            return lambda x: sum(m * g(x) for m, g in parts)
        parts = [(float(c.get("mass", 1.0)),
                  _gaussian_2d(c.get("center", (0.0, 0.0)),
                               float(c.get("variance", 1.0))))
                 for c in comps]
        return lambda x, y: sum(m * g(x, y) for m, g in parts)
    if kind == "ring":
        if grid.ndim != 2:
            raise ConfigurationError("ring initial data is 2D only")
        r0 = float(spec.get("radius", 0.3))
        w = float(spec.get("width", 0.05))
        return lambda x, y: np.exp(-(np.hypot(x, y) - r0) ** 2 / (2.0 * w * w))
    if kind == "constant":
        c = float(spec.get("value", 1.0))
        if grid.ndim == 1:
            return lambda x: np.full_like(np.asarray(x, dtype=float), c)
        return lambda x, y: np.full_like(np.asarray(x, dtype=float) + y, c)
    raise ConfigurationError(f"unknown initial data type {kind!r}")


def project_configured(spec: dict, grid: Grid) -> Field:
    """Project an initial-data spec and apply its optional exact mass
    normalization."""
    datum = build_initial_datum(spec, grid)
    f = project_initial_data(grid, datum)
    if "mass" in spec:
        f = normalize_mass(f, float(spec["mass"]))
    return f
