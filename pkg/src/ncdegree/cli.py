"""Command-line front end: ``degree``, ``sweep``, ``oracle`` and ``qgrid``.

Exit codes: 0 success, 1 oracle failure, 2 usage or parse error,
3 optimizer did not converge (the report is still printed).
"""

from __future__ import annotations

import argparse
import io
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional

import numpy as np

from . import oracle
from .errors import ConvergenceError, NCDegreeError, UndefinedStatisticError
from .measures import (
    closed_form_degree, entanglement_entropy, mandel_q, measure, nonclassical_degree2,
)
from .optimize import OptimizerConfig
from .phase_space import GridSpec, grid_csv, husimi_q_points, q_from_w_grid, wigner_points
from .states import SingleModeState, make_phi_family, make_psi_family, parse_state

EXIT_OK, EXIT_ORACLE, EXIT_USAGE, EXIT_CONVERGENCE = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _common_flags():
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("global options")
    g.add_argument("--trunc", type=int, default=None, metavar="N",
                   help="truncation for coherent states (default: ceil(|a|^2+6|a|+10))")
    g.add_argument("--grid-per-axis", type=int, default=9, metavar="K")
    g.add_argument("--radius-margin", type=float, default=3.0, metavar="R")
    g.add_argument("--simplex-tol", type=float, default=1e-10, metavar="T")
    g.add_argument("--max-iters", type=int, default=2000, metavar="M")
    g.add_argument("--seed", type=int, default=0, metavar="S")
    g.add_argument("--jobs", type=int, default=1, metavar="J")
    g.add_argument("--out", default=None, metavar="FILE")
    g.add_argument("--json", action="store_true", help="machine-readable output")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common_flags()
    parser = argparse.ArgumentParser(
        prog="ncdegree",
        description="Nonclassical degree of one- and two-mode pure states.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("degree", parents=[common], help="measures for one state")
    p.add_argument("spec", help="fock:n | coh:re,im | psi:{+|-}:xi | phi:{+|-}:xi | file:PATH")

    p = sub.add_parser("sweep", parents=[common], help="degree and entropy versus xi")
    p.add_argument("--family", choices=("psi", "phi", "both"), default="both")
    p.add_argument("--sign", choices=("+", "-", "both"), default="both")
    p.add_argument("--xi-start", type=float, default=0.0)
    p.add_argument("--xi-end", type=float, default=1.0)
    p.add_argument("--xi-step", type=float, default=0.01)

    p = sub.add_parser("oracle", parents=[common], help="closed-form and brute-force battery")
    p.add_argument("--only", action="append", default=None, metavar="GROUP",
                   help=f"restrict to groups (repeatable or comma list): {', '.join(oracle.GROUPS)}")
    p.add_argument("--perturb", type=float, default=0.0, help=argparse.SUPPRESS)

    # -h is the grid step here, so help moves to --help only
    p = sub.add_parser("qgrid", parents=[common], add_help=False,
                       help="dump Q, W or convolved-W values on a square grid")
    p.add_argument("--help", action="help", help="show this help message and exit")
    p.add_argument("spec")
    p.add_argument("--func", choices=("q", "w", "qfromw"), default="q")
    p.add_argument("-L", "--half-width", dest="half_width", type=float, default=3.0)
    p.add_argument("-h", "--step", dest="step", type=float, default=0.1)
    p.add_argument("--center", default="0,0", metavar="RE,IM")
    p.add_argument("--quad-L", dest="quad_half_width", type=float, default=4.0)
    p.add_argument("--quad-h", dest="quad_step", type=float, default=0.05)
    return parser


def _config(args) -> OptimizerConfig:
    return OptimizerConfig(radius_margin=args.radius_margin, grid_per_axis=args.grid_per_axis,
                           simplex_tol=args.simplex_tol, max_iters=args.max_iters,
                           seed=args.seed)


def _emit(text: str, args) -> None:
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _fmt(x) -> str:
    if x is None:
        return "nan"
    return f"{float(x):.17g}"


# -- commands ---------------------------------------------------------------

def cmd_degree(args) -> int:
    state = parse_state(args.spec, args.trunc)
    cfg = _config(args)
    try:
        report = measure(state, cfg)
        code = EXIT_OK
    except ConvergenceError as exc:
        report = exc.report
        code = EXIT_CONVERGENCE
        print(f"ncdegree: {exc}", file=sys.stderr)
    _emit(report.to_json() + "\n", args)
    return code


def sweep_columns(family: str, sign: str) -> List[str]:
    fams = ("psi", "phi") if family == "both" else (family,)
    signs = ("+", "-") if sign == "both" else (sign,)
    cols = ["xi"]
    for fam in ("psi", "phi"):
        if fam in fams:
            for sg in ("+", "-"):
                if sg in signs:
                    cols.append(f"D_{fam}_{'plus' if sg == '+' else 'minus'}")
    cols.append("E")
    cols += [f"q_{fam}" for fam in ("psi", "phi") if fam in fams]
    cols += [f"D_{fam}_closed" for fam in ("psi", "phi") if fam in fams]
    return cols


def sweep_xis(start, end, step) -> List[float]:
    if not (0.0 <= start <= end <= 1.0) or not step > 0:
        raise UsageError("need 0 <= xi-start <= xi-end <= 1 and xi-step > 0")
    k = int(np.floor((end - start) / step + 1e-9))
    return [round(start + i * step, 12) for i in range(k + 1)]


def sweep_row(xi, columns, cfg) -> dict:
    row = {"xi": xi}
    makers = {"psi": make_psi_family, "phi": make_phi_family}
    first = None
    for col in columns:
        if col.startswith("D_") and not col.endswith("_closed"):
            _, fam, sg = col.split("_")
            s = makers[fam]("+" if sg == "plus" else "-", xi)
            first = first or s
            row[col] = nonclassical_degree2(s, cfg).degree
    for fam in ("psi", "phi"):
        if f"q_{fam}" in columns:
            try:
                row[f"q_{fam}"] = mandel_q(makers[fam]("+", xi))
            except UndefinedStatisticError:
                row[f"q_{fam}"] = None
            row[f"D_{fam}_closed"] = closed_form_degree(fam, xi=xi)
    row["E"] = entanglement_entropy(first or make_psi_family("+", xi))
    return row


def cmd_sweep(args) -> int:
    columns = sweep_columns(args.family, args.sign)
    xis = sweep_xis(args.xi_start, args.xi_end, args.xi_step)
    cfg = _config(args)
    jobs = max(1, args.jobs)
    if jobs == 1:
        rows = [sweep_row(xi, columns, cfg) for xi in xis]
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(lambda xi: sweep_row(xi, columns, cfg), xis))
    if args.json:
        text = json.dumps([{c: r[c] for c in columns} for r in rows]) + "\n"
    else:
        buf = io.StringIO()
        buf.write(",".join(columns) + "\n")
        for r in rows:
            buf.write(",".join(_fmt(r[c]) for c in columns) + "\n")
        text = buf.getvalue()
    _emit(text, args)
    return EXIT_OK


def cmd_oracle(args) -> int:
    only = None
    if args.only:
        only = [g for item in args.only for g in item.split(",") if g]
        unknown = sorted(set(only) - set(oracle.GROUPS))
        if unknown:
            raise UsageError(f"unknown oracle group(s): {', '.join(unknown)}")
    outcomes = oracle.run(oracle.battery(_config(args), seed=args.seed), only, args.perturb)
    if args.json:
        text = json.dumps([{"group": o.group, "case": o.name, "value": o.value,
                            "reference": o.reference, "delta": o.delta, "tol": o.tol,
                            "passed": o.passed} for o in outcomes]) + "\n"
    else:
        text = oracle.format_table(outcomes) + "\n"
    _emit(text, args)
    return EXIT_OK if all(o.passed for o in outcomes) else EXIT_ORACLE


def _parse_complex(text):
    try:
        re_, im_ = text.split(",")
        return complex(float(re_), float(im_))
    except ValueError:
        raise UsageError(f"expected RE,IM, got {text!r}") from None


def cmd_qgrid(args) -> int:
    state = parse_state(args.spec, args.trunc)
    if not isinstance(state, SingleModeState):
        raise UsageError("qgrid supports single-mode states only")
    g = GridSpec(args.half_width, args.step, _parse_complex(args.center))
    re_axis, im_axis = g.re_axis(), g.im_axis()
    if args.func == "qfromw":
        values = q_from_w_grid(state, re_axis, im_axis, args.quad_half_width, args.quad_step)
    else:
        x, y = np.meshgrid(re_axis, im_axis, indexing="ij")
        fn = husimi_q_points if args.func == "q" else wigner_points
        values = fn(state, x.ravel(), y.ravel()).reshape(x.shape)
    _emit(grid_csv(re_axis, im_axis, values), args)
    return EXIT_OK


COMMANDS = {"degree": cmd_degree, "sweep": cmd_sweep, "oracle": cmd_oracle, "qgrid": cmd_qgrid}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except ConvergenceError as exc:
        print(f"ncdegree {args.command}: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except (UsageError, NCDegreeError) as exc:
        print(f"ncdegree {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
