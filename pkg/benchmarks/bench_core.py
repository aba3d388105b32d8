#!/usr/bin/env python3
"""Benchmark the compiled hot-loop kernels against the pure-NumPy fallback.

The same functions back both paths (gffv.core selects at import), so this
measures exactly what a run pays per right-hand-side evaluation.  Run:

    python benchmarks/bench_core.py
"""

import time

import numpy as np

from gffv import _fvcore_py as fallback

try:
    from gffv import _fvcore as compiled
except ImportError:
    compiled = None


def best_of(fn, reps=7):
    times = []
    for _ in range(reps):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def row(label, py_time, cy_time):
    if cy_time is None:
        print(f"{label:34s} {py_time * 1e6:10.1f} us          (no extension)")
    else:
        print(f"{label:34s} {py_time * 1e6:10.1f} us "
              f"{cy_time * 1e6:10.1f} us   x{py_time / cy_time:6.1f}")


def main():
    rng = np.random.default_rng(7)
    print(f"{'kernel':34s} {'numpy':>13s} {'compiled':>13s}   speedup")

    rho1 = rng.random(512)
    rho1[rng.random(512) < 0.3] = 0.0
    row("faces_1d (n=512)",
        best_of(lambda: fallback.faces_1d(rho1, 2.0, 2)),
        best_of(lambda: compiled.faces_1d(rho1, 2.0, 2)) if compiled else None)

    east, west = fallback.faces_1d(rho1, 2.0, 2)
    u1 = rng.standard_normal(511)
    row("upwind_rhs_1d (n=512)",
        best_of(lambda: fallback.upwind_rhs_1d(east, west, u1, 0.01)),
        best_of(lambda: compiled.upwind_rhs_1d(east, west, u1, 0.01))
        if compiled else None)

    rho2 = rng.random((64, 64))
    rho2[rng.random((64, 64)) < 0.3] = 0.0
    row("faces_2d (64x64)",
        best_of(lambda: fallback.faces_2d(rho2, 2.0, 2)),
        best_of(lambda: compiled.faces_2d(rho2, 2.0, 2)) if compiled else None)

    E, W, N, S = fallback.faces_2d(rho2, 2.0, 2)
    u2 = rng.standard_normal((63, 64))
    v2 = rng.standard_normal((64, 63))
    row("upwind_rhs_2d (64x64)",
        best_of(lambda: fallback.upwind_rhs_2d(E, W, N, S, u2, v2, 0.1, 0.1)),
        best_of(lambda: compiled.upwind_rhs_2d(E, W, N, S, u2, v2, 0.1, 0.1))
        if compiled else None)

    w1 = rng.standard_normal(2 * 512 - 1)
    row("convolve_direct_1d (n=512)",
        best_of(lambda: fallback.convolve_direct_1d(w1, rho1, 0.01)),
        best_of(lambda: compiled.convolve_direct_1d(w1, rho1, 0.01))
        if compiled else None)

    w2 = rng.standard_normal((2 * 32 - 1, 2 * 32 - 1))
    rho2s = rng.random((32, 32))
    row("convolve_direct_2d (32x32)",
        best_of(lambda: fallback.convolve_direct_2d(w2, rho2s, 0.01)),
        best_of(lambda: compiled.convolve_direct_2d(w2, rho2s, 0.01))
        if compiled else None)

    # end-to-end: one full rhs evaluation through each backend
    import gffv.core as core
    from gffv import (Field, Model, InternalEnergy, GaussianKernel,
                      SpatialOperator, build_grid, build_weight_table,
                      QuadratureRule)
    g = build_grid((-4.0, 4.0), 512)
    model = Model(internal=InternalEnergy("power_law", nu=1.0, m=2.0),
                  kernel=GaussianKernel(-1.0, 1.0))
    table = build_weight_table(model.kernel, g, QuadratureRule.MIDPOINT)
    op = SpatialOperator(model, g, table)
    f = Field(g, rho1)

    saved = dict(faces_1d=core.faces_1d, upwind_rhs_1d=core.upwind_rhs_1d)
    times = {}
    for label, impl in (("numpy", fallback), ("compiled", compiled)):
        if impl is None:
            continue
        core.faces_1d = impl.faces_1d
        core.upwind_rhs_1d = impl.upwind_rhs_1d
        times[label] = best_of(lambda: op.evaluate(f), reps=20)
    core.faces_1d = saved["faces_1d"]
    core.upwind_rhs_1d = saved["upwind_rhs_1d"]
    if compiled is not None:
        row("full rhs eval (n=512, FFT conv)", times["numpy"],
            times["compiled"])


if __name__ == "__main__":
    main()
