"""Command-line entry point.

Subcommands:

  table1       reproduce the reference benchmark table (exit code 0 only
               if every row passes its tolerance)
  run          one solve of a benchmark case with a chosen method
  rho-scan     CSV scan of the per-mode factor over the frequency band
  convergence  mesh-refinement study of the closed-form benchmark
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import reporting
from .params import CASE_LABELS, CaseConfig, LEVELS


def _add_common(parser, with_case=True):
    if with_case:
        parser.add_argument("--case", choices=CASE_LABELS, required=True)
        parser.add_argument("--level", type=int, choices=LEVELS, default=1)
    parser.add_argument("--tol", type=float, default=1e-9)
    parser.add_argument("--kmax-convention", choices=("dof", "element"),
                        default="dof",
                        help="interface node spacing (dof, h/2) or element "
                             "size (element, h) defines the top of the band")
    parser.add_argument("--out", type=Path, default=None,
                        help="directory for CSV/JSON outputs")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stokesdarcy",
        description="Coupled Stokes-Darcy solver with an optimized "
                    "two-sided interface preconditioner")
    sub = parser.add_subparsers(dest="command", required=True)

    p_table = sub.add_parser("table1", help="reproduce the reference table")
    _add_common(p_table, with_case=False)

    p_run = sub.add_parser("run", help="solve one benchmark case")
    _add_common(p_run)
    p_run.add_argument("--method", choices=reporting.METHODS, default="pcg")
    p_run.add_argument("--weights", choices=reporting.WEIGHT_SOURCES,
                       default="optimal")
    p_run.add_argument("--alpha-f", type=float, default=None)
    p_run.add_argument("--alpha-p", type=float, default=None)
    p_run.add_argument("--max-iter", type=int, default=500)
    p_run.add_argument("--dump-fields", action="store_true",
                       help="write solution fields to <out>/fields.npz")

    p_scan = sub.add_parser("rho-scan", help="scan the per-mode factor")
    _add_common(p_scan)
    p_scan.add_argument("--n-k", type=int, default=2001)
    p_scan.add_argument("--alpha-f", type=float, default=None)
    p_scan.add_argument("--alpha-p", type=float, default=None)
    p_scan.add_argument("--grid", type=int, default=0,
                        help="also write an NxN weight-grid scan of max|rho|")

    p_conv = sub.add_parser("convergence", help="mesh-refinement study")
    p_conv.add_argument("--case", choices=CASE_LABELS, required=True)
    p_conv.add_argument("--levels", type=int, nargs="+", default=list(LEVELS))
    p_conv.add_argument("--out", type=Path, default=None)
    return parser


def _outdir(args) -> Path:
    out = args.out or Path.cwd()
    out.mkdir(parents=True, exist_ok=True)
    return out


def _cmd_table1(args) -> int:
    result = reporting.table1(tol=args.tol,
                              kmax_convention=args.kmax_convention)
    out = _outdir(args)
    reporting.write_table1_csv(result, out / "table1.csv")
    reporting.write_json(result, out / "table1.json")
    for row in result["rows"]:
        status = "ok" if row["row_ok"] else "FAIL"
        print(f"({row['case']}) level {row['level']}: "
              f"alpha_f={row['alpha_f']:.2e} alpha_p={row['alpha_p']:.2e} "
              f"pcg={row['pcg_iters']} (ref {row['pcg_ref']}) "
              f"cg={row['cg_iters']} (ref {row['cg_ref']}) [{status}]")
    print(f"table written to {out / 'table1.csv'}; "
          f"all rows {'pass' if result['all_ok'] else 'FAIL'}")
    return 0 if result["all_ok"] else 1


def _cmd_run(args) -> int:
    case = CaseConfig(args.case, args.level)
    report, solution, errors = reporting.run_solve(
        case, method=args.method, weights_source=args.weights, tol=args.tol,
        alpha_f=args.alpha_f, alpha_p=args.alpha_p,
        kmax_convention=args.kmax_convention, max_iter=args.max_iter)
    payload = report.to_dict()
    payload["errors"] = {name: {"l2": l2, "h1_seminorm": h1}
                         for name, (l2, h1) in errors.items()}
    print(json.dumps(payload, indent=2))
    if args.out is not None:
        out = _outdir(args)
        reporting.write_json(payload, out / "report.json")
        if args.dump_fields:
            np.savez(out / "fields.npz", u_f=solution.u_f, p_f=solution.p_f,
                     p_p=solution.p_p, trace=solution.trace)
    return 0 if report.converged else 1


def _cmd_rho_scan(args) -> int:
    case = CaseConfig(args.case, args.level)
    weights = None
    if args.alpha_f is not None and args.alpha_p is not None:
        weights = reporting.WeightPair(args.alpha_f, args.alpha_p)
    k, rho, used = reporting.rho_scan(case, weights, args.n_k,
                                      args.kmax_convention)
    out = _outdir(args)
    reporting.write_scan_csv(k, rho, out / "rho_scan.csv")
    print(f"alpha_f={used.alpha_f:.6e} alpha_p={used.alpha_p:.6e} "
          f"max|rho|={np.max(np.abs(rho)):.6e}")
    if args.grid:
        af, ap, grid = reporting.weight_grid_scan(case, args.grid,
                                                  kmax_convention=args.kmax_convention)
        reporting.write_grid_csv(af, ap, grid, out / "weight_grid.csv")
    return 0


def _cmd_convergence(args) -> int:
    study = reporting.convergence_study(args.case, args.levels)
    out = _outdir(args)
    reporting.write_convergence_csv(study, out / "convergence.csv")
    reporting.write_json(study, out / "convergence.json")
    for key, value in study["orders"].items():
        print(f"{key}: order {value:.2f}")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    commands = {"table1": _cmd_table1, "run": _cmd_run,
                "rho-scan": _cmd_rho_scan, "convergence": _cmd_convergence}
    return commands[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
