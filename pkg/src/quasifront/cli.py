"""Command line front end: solve problems, verify candidate solutions, and
inspect outcome-box construction.

Exit codes for `solve`: 0 success, 1 parse or validation error, 2 infeasible
problem, 3 scalarization cap hit. The environment variable QVP_LOG
(debug|info) controls log verbosity.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import bounds as bounds_mod
from . import driver, scalarize
from .errors import (
    DegenerateIdealAttained,
    DenominatorNonPositiveOnSimplex,
    InfeasibleSet,
    IterationCapExceeded,
    QvpError,
)
from .model import load_problem

log = logging.getLogger("quasifront")


def _configure_logging() -> None:
    level = os.environ.get("QVP_LOG", "warning").lower()
    logging.basicConfig(
        level={"debug": logging.DEBUG, "info": logging.INFO}.get(level, logging.WARNING),
        format="%(levelname)s %(name)s: %(message)s",
    )


def _parse_vector(text: str, name: str) -> np.ndarray:
    try:
        return np.array([float(tok) for tok in text.split(",")], dtype=float)
    except ValueError as exc:
        raise QvpError(f"cannot parse {name} {text!r}: comma-separated numbers expected") from exc


def _fmt_vec(v) -> str:
    return "(" + ", ".join(f"{float(c):.6g}" for c in v) + ")"


def _write_csvs(result: driver.SolveResult, out_dir: Path) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    p = len(result.direction)
    n = len(result.Y_WN[0].x) if result.Y_WN else 0
    with open(out_dir / "front.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            [f"w{i + 1}" for i in range(p)]
            + [f"f{i + 1}" for i in range(p)]
            + [f"x{i + 1}" for i in range(n)]
        )
        for e in result.Y_WN:
            writer.writerow(
                [repr(float(c)) for c in e.w]
                + [repr(float(c)) for c in e.f]
                + [repr(float(c)) for c in e.x]
            )
    with open(out_dir / "vertices.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"v{i + 1}" for i in range(p)])
        for v in result.V_eps:
            writer.writerow([repr(float(c)) for c in v])


def cmd_solve(args) -> int:
    try:
        problem = load_problem(args.problem, tol_feas=args.tol_feas)
    except InfeasibleSet as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (QvpError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    d_hat = _parse_vector(args.direction, "--direction") if args.direction else None
    try:
        result = driver.solve(
            problem,
            args.epsilon,
            d_hat,
            selection=args.selection.replace("-", "_"),
            workers=args.workers,
            tol_scalar=args.tol_scalar,
            tol_feas=args.tol_feas,
            seed=args.seed,
            max_scalarizations=args.max_scalarizations,
        )
    except IterationCapExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except QvpError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    out_path = Path(args.out) if args.out else Path(args.problem).with_suffix(".result.json")
    result.to_json(out_path)
    log.info("result written to %s", out_path)
    if args.csv:
        _write_csvs(result, Path(args.csv))
    print(
        f"epsilon={result.epsilon:g} scalarizations={result.scalarizations} "
        f"|Y_WN|={len(result.Y_WN)} |V_eps|={len(result.V_eps)} "
        f"gap={result.final_gap:.6g} time={result.wall_time_s:.3f}s"
    )
    return 0


def cmd_verify(args) -> int:
    try:
        problem = load_problem(args.problem, tol_feas=args.tol_feas)
        x = _parse_vector(args.x, "--x")
        d_hat = (
            _parse_vector(args.direction, "--direction")
            if args.direction
            else (problem.direction if problem.direction is not None else np.ones(problem.p))
        )
        box = bounds_mod.make_box(
            problem, d_hat, tol_scalar=args.tol_scalar, tol_feas=args.tol_feas,
            check_degenerate=False,
        )
    except (QvpError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    violation = problem.feasible.violation(x)
    if violation > args.tol_feas:
        print(f"false (point violates the feasible set by {violation:.3e})")
        return 0
    try:
        res = scalarize.solve_chebyshev(
            problem, problem.evaluate(x), d_hat,
            tol_scalar=args.tol_scalar, m=box.m, tol_feas=args.tol_feas, x_init=x,
        )
    except QvpError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    verdict = abs(res.t) <= args.tol_scalar
    print(f"{'true' if verdict else 'false'} t*={res.t:.6g}")
    return 0


def cmd_bounds(args) -> int:
    try:
        problem = load_problem(args.problem, tol_feas=args.tol_feas)
    except InfeasibleSet as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (QvpError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    try:
        m_computed, _ = bounds_mod.ideal_point(problem, tol_feas=args.tol_feas)
        print(f"ideal point (computed): {_fmt_vec(m_computed)}")
        if problem.box_m is not None:
            print(f"lower corner (file override): {_fmt_vec(problem.box_m)}")
        try:
            simplex, M_simplex = bounds_mod.simplex_bound(problem, tol_feas=args.tol_feas)
            print(f"simplex base alpha0: {_fmt_vec(simplex.alpha0)}  U_cap: {simplex.u_cap:.6g}")
            print(f"upper corner (simplex): {_fmt_vec(M_simplex)}")
        except DenominatorNonPositiveOnSimplex as exc:
            print(f"simplex bound unavailable: {exc}")
        if problem.box_M is not None:
            print(f"upper corner (file override): {_fmt_vec(problem.box_M)}")
        try:
            box = bounds_mod.make_box(problem, tol_scalar=args.tol_scalar,
                                      tol_feas=args.tol_feas)
        except DegenerateIdealAttained as exc:
            print(f"note: {exc}")
            print(f"box: m={_fmt_vec(exc.m)} M={_fmt_vec(exc.M)}")
            return 0
        print(f"box: m={_fmt_vec(box.m)} (source: {box.m_source}) "
              f"M={_fmt_vec(box.M)} (source: {box.M_source})")
    except QvpError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="quasifront",
        description="Sandwich approximation of weakly nondominated sets for "
                    "strictly quasiconvex multiobjective programs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("problem", help="problem file (JSON)")
        sp.add_argument("--tol-scalar", type=float, default=scalarize.DEFAULT_TOL_SCALAR,
                        help="scalarization bisection tolerance")
        sp.add_argument("--tol-feas", type=float, default=1e-7,
                        help="feasibility tolerance")

    sp = sub.add_parser("solve", help="run the outer approximation loop")
    common(sp)
    sp.add_argument("--epsilon", type=float, required=True, help="termination tolerance")
    sp.add_argument("--direction", help="strictly positive direction, e.g. 1,1")
    sp.add_argument("--selection", choices=["fifo", "max-gap"], default="fifo")
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--out", help="result JSON path (default: <problem>.result.json)")
    sp.add_argument("--csv", help="directory for front.csv and vertices.csv")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--max-scalarizations", type=int,
                    default=driver.DEFAULT_MAX_SCALARIZATIONS)
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("verify", help="check whether a point is weakly efficient")
    common(sp)
    sp.add_argument("--x", required=True, help="candidate point, e.g. 1,1")
    sp.add_argument("--direction", help="strictly positive direction, e.g. 1,1")
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("bounds", help="show outcome-box construction")
    common(sp)
    sp.set_defaults(func=cmd_bounds)
    return parser


def main(argv=None) -> int:
    _configure_logging()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except QvpError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
