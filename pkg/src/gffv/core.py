"""Hot-kernel backend selection.

Prefers the compiled extension gffv._fvcore and falls back to the pure-NumPy
module gffv._fvcore_py.  Set GFFV_PURE_PYTHON=1 to force the fallback (used
by the benchmark and the parity tests)."""

from __future__ import annotations

import os

from . import _fvcore_py

if os.environ.get("GFFV_PURE_PYTHON", "") == "1":
    _impl = _fvcore_py
else:
    try:
        from . import _fvcore as _impl  # type: ignore[attr-defined]
    except ImportError:
        _impl = _fvcore_py

COMPILED: bool = _impl.COMPILED
faces_1d = _impl.faces_1d
faces_2d = _impl.faces_2d
upwind_rhs_1d = _impl.upwind_rhs_1d
upwind_rhs_2d = _impl.upwind_rhs_2d
# np.convolve's blocked dot products outperform the compiled scalar loop in
# 1D (see benchmarks/bench_core.py), so the direct 1D path always uses it.
convolve_direct_1d = _fvcore_py.convolve_direct_1d
convolve_direct_2d = _impl.convolve_direct_2d
