"""Positivity-preserving piecewise-linear reconstruction.

Face values come from centered-difference slopes; any cell where a face
value would go negative falls back to the generalized theta-minmod slope
(theta in [1, 2], default 2), which keeps faces nonnegative whenever the
cell averages are.  order=1 selects the piecewise-constant (first-order)
variant where every face value equals the cell average.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import core
from .errors import ConfigurationError, NumericsError
from .mesh import Field

__all__ = ["LimiterParams", "ReconstructedStates", "minmod",
           "reconstruct_states"]


@dataclass(frozen=True)
class LimiterParams:
    theta: float = 2.0
    order: int = 2

    def __post_init__(self):
        if not 1.0 <= self.theta <= 2.0:
            raise ConfigurationError(
                f"theta must lie in [1, 2], got {self.theta}")
        if self.order not in (1, 2):
            raise ConfigurationError(f"order must be 1 or 2, got {self.order}")


@dataclass
class ReconstructedStates:
    """One-sided face values per cell.  east/west are the right/left face
    values; north/south exist in 2D only."""

    east: np.ndarray
    west: np.ndarray
    north: Optional[np.ndarray] = None
    south: Optional[np.ndarray] = None

    @property
    def ndim(self) -> int:
        return 1 if self.north is None else 2


def minmod(*z: float) -> float:
    """min of the arguments if all positive, max if all negative, else 0."""
    if all(v > 0 for v in z):
        return min(z)
    if all(v < 0 for v in z):
        return max(z)
    return 0.0


def reconstruct_states(f: Field, params: LimiterParams = LimiterParams()
                       ) -> ReconstructedStates:
    """Limited linear reconstruction of a nonnegative field."""
    if np.any(f.values < 0.0):
        raise NumericsError("reconstruction requires nonnegative averages")
    if f.grid.ndim == 1:
        east, west = core.faces_1d(f.values, params.theta, params.order)
        return ReconstructedStates(east, west)
    east, west, north, south = core.faces_2d(f.values, params.theta,
                                             params.order)
    return ReconstructedStates(east, west, north, south)
