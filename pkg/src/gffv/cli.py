"""Command-line interface.

    gffv run --scenario quadlog_1d --out results/
    gffv run --config run.json --set step.steady_tol=1e-8
    gffv convergence --scenario quadlog_1d --levels 4 --reference closed_form
    gffv sweep-mass --scenario gks_balanced_1d --lo 0.03 --hi 0.09 --iters 4
    gffv list-scenarios

Exit codes: 0 success (a detected blow-up is a valid scientific outcome),
2 configuration error, 3 runtime numeric error, 4 I/O error.  GFFV_THREADS
caps the number of concurrent probe runs in the study harnesses.
"""

from __future__ import annotations

import argparse
import logging
import sys

from . import __version__
from .config import load_config, parse_set_value
from .driver import run_convergence_study, run_mass_sweep, run_simulation
from .errors import ConfigurationError, NumericsError
from .scenarios import list_scenarios


def _add_set_arg(p):
    p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                   help="override a config entry (scenario parameter, or "
                        "dotted path for full configs); repeatable")


def _collect_sets(items):
    out = {}
    for item in items:
        if "=" not in item:
            raise ConfigurationError(f"--set expects KEY=VALUE, got {item!r}")
        key, _, value = item.partition("=")
        out[key] = parse_set_value(value)
    return out


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="gffv",
        description="Finite-volume solver for nonlocal continuity equations "
                    "with gradient-flow structure (positivity-preserving, "
                    "free-energy dissipating).")
    ap.add_argument("--version", action="version",
                    version=f"gffv {__version__}")
    ap.add_argument("-v", "--verbose", action="store_true",
                    help="log progress to stderr")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="integrate one configuration")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--config", help="JSON config file")
    src.add_argument("--scenario", help="preset name (see list-scenarios)")
    _add_set_arg(p)
    p.add_argument("--out", help="output directory (default: no files)")
    p.add_argument("--binary-snapshots", action="store_true",
                   help="also write raw float64 snapshot dumps")
    p.add_argument("--dump-weights", action="store_true",
                   help="write the kernel weight table to weights.csv")

    p = sub.add_parser("convergence", help="spatial-order refinement ladder")
    p.add_argument("--scenario", required=True)
    p.add_argument("--levels", type=int, default=4)
    p.add_argument("--reference", choices=("closed_form", "finest_grid"),
                   default="closed_form")
    p.add_argument("--base-cells", type=int, default=None,
                   help="cells at the coarsest level (default: preset grid)")
    p.add_argument("--jobs", type=int, default=1)
    _add_set_arg(p)

    p = sub.add_parser("sweep-mass", help="bisect the critical mass")
    p.add_argument("--scenario", required=True)
    p.add_argument("--lo", type=float, required=True)
    p.add_argument("--hi", type=float, required=True)
    p.add_argument("--iters", type=int, default=4)
    p.add_argument("--jobs", type=int, default=1)
    _add_set_arg(p)

    sub.add_parser("list-scenarios", help="print available presets")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s")
    try:
        return _dispatch(args)
    except ConfigurationError as e:
        print(f"configuration error: {e}", file=sys.stderr)
        return 2
    except NumericsError as e:
        print(f"numeric error: {e}", file=sys.stderr)
        return 3
    except OSError as e:
        print(f"I/O error: {e}", file=sys.stderr)
        return 4


def _dispatch(args) -> int:
    if args.command == "list-scenarios":
        for name, desc in list_scenarios():
            print(f"{name}\n    {desc}")
        return 0

    if args.command == "run":
        overrides = _collect_sets(args.set)
        if args.scenario:
            cfg = load_config({"scenario": args.scenario}, overrides)
        else:
            cfg = load_config(args.config, overrides)
        if args.out:
            cfg.raw["output_dir"] = args.out
            cfg.output_dir = args.out
        report = run_simulation(cfg, binary_snapshots=args.binary_snapshots,
                                dump_weights=args.dump_weights)
        print(f"status={report.status.kind} t_final={report.t_final:.6g} "
              f"steps={report.n_steps} mass_final={report.mass_final:.12g} "
              f"entropy_final={report.records[-1].entropy:.12g}")
        return 0

    if args.command == "convergence":
        res = run_convergence_study(
            args.scenario, levels=args.levels, reference=args.reference,
            params=_collect_sets(args.set), base_cells=args.base_cells,
            jobs=args.jobs)
        print(f"{'n':>8} {'dx':>12} {'L1':>14} {'Linf':>14}")
        for row in res.rows():
            print(f"{row['n']:>8} {row['dx']:>12.6g} {row['l1']:>14.6e} "
                  f"{row['linf']:>14.6e}")
        print("L1 orders:  ", " ".join(f"{o:.3f}" for o in res.l1_orders))
        print("Linf orders:", " ".join(f"{o:.3f}" for o in res.linf_orders))
        for msg in res.flagged:
            print(f"note: {msg}", file=sys.stderr)
        return 0

    # sweep-mass
    res = run_mass_sweep(args.scenario, args.lo, args.hi, iters=args.iters,
                         params=_collect_sets(args.set), jobs=args.jobs)
    for mass, kind in res.probes:
        print(f"probe mass={mass:.6g}: {kind}")
    print(f"decaying mass={res.mass_decaying:.6g} "
          f"blowing mass={res.mass_blowing:.6g}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
