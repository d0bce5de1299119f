"""Bundled LP-file MILP solver built on scipy's HiGHS interface.

Installed as the `chromatic-lps` console script so the solve backend always
has a working external solver: it reads an LP file, solves the mixed-binary
program, and writes a plain-text solution file:

    c chromatic-lps <version info>
    status optimal|feasible|infeasible|unbounded|nosolution|error
    objective <float>            (when an incumbent exists)
    bound <float|-inf>           (best proven dual bound, no offset applied)
    v <name> <value>             (one line per variable, incumbent only)

The solving core is importable (`solve_lp_text`) and is exactly what the
in-process backend adapter calls, so both paths share one numeric route.
The --seed flag is accepted for interface uniformity; HiGHS runs
deterministically for a fixed input, so it has no effect here.
"""
from __future__ import annotations

import argparse
import sys
import time
from dataclasses import dataclass

import numpy as np
from scipy.optimize import Bounds, LinearConstraint, milp
from scipy.sparse import csr_matrix

from .lp import LpParseError, ParsedLp, parse_lp

STATUS_WORDS = ("optimal", "feasible", "infeasible", "unbounded", "nosolution", "error")


@dataclass(frozen=True)
class LpSolveOutcome:
    status: str
    objective: float | None
    bound: float | None
    values: dict[str, float] | None
    message: str
    wall_time: float


def solve_parsed(parsed: ParsedLp, time_limit: float = 3600.0) -> LpSolveOutcome:
    names = parsed.variables()
    index = {name: j for j, name in enumerate(names)}
    nvar = len(names)
    started = time.monotonic()

    c = np.zeros(nvar)
    for name, coef in parsed.objective:
        c[index[name]] += coef
    sign = 1.0 if parsed.minimize else -1.0
    c *= sign

    binary = set(parsed.binaries)
    lower = np.zeros(nvar)
    upper = np.array([1.0 if name in binary else np.inf for name in names])
    for name, (lo, hi) in parsed.bounds.items():
        j = index[name]
        lower[j], upper[j] = lo, hi
    integrality = np.array([1.0 if name in binary else 0.0 for name in names])

    constraints = []
    if parsed.constraints:
        rows, cols, vals = [], [], []
        lo, hi = [], []
        for r, (_, terms, sense, rhs) in enumerate(parsed.constraints):
            for name, coef in terms:
                rows.append(r)
                cols.append(index[name])
                vals.append(coef)
            if sense == "<=":
                lo.append(-np.inf)
                hi.append(rhs)
            elif sense == ">=":
                lo.append(rhs)
                hi.append(np.inf)
            else:
                lo.append(rhs)
                hi.append(rhs)
        matrix = csr_matrix((vals, (rows, cols)), shape=(len(parsed.constraints), nvar))
        constraints = [LinearConstraint(matrix, lo, hi)]

    try:
        res = milp(c=c, constraints=constraints, integrality=integrality,
                   bounds=Bounds(lower, upper),
                   options={"time_limit": float(time_limit), "mip_rel_gap": 0.0})
    except ValueError as exc:
        return LpSolveOutcome("error", None, None, None, f"solver rejected model: {exc}",
                              time.monotonic() - started)

    wall = time.monotonic() - started
    incumbent = res.x is not None
    objective = sign * float(res.fun) if incumbent else None
    bound = getattr(res, "mip_dual_bound", None)
    if bound is not None and np.isfinite(bound):
        bound = sign * float(bound)
    else:
        bound = None

    if res.status == 0:
        status = "optimal"
        if bound is None:
            bound = objective
    elif res.status == 1:
        status = "feasible" if incumbent else "nosolution"
    elif res.status == 2:
        status = "infeasible"
    elif res.status == 3:
        status = "unbounded"
    else:
        status = "error"

    values = None
    if incumbent:
        values = {name: float(res.x[index[name]]) for name in names}
    return LpSolveOutcome(status, objective, bound, values, str(res.message), wall)


def solve_lp_text(text: str, time_limit: float = 3600.0) -> LpSolveOutcome:
    return solve_parsed(parse_lp(text), time_limit=time_limit)


def render_solution(outcome: LpSolveOutcome) -> str:
    lines = ["c chromatic-lps solution file", f"status {outcome.status}"]
    if outcome.objective is not None:
        lines.append(f"objective {outcome.objective:.12g}")
    lines.append(f"bound {outcome.bound:.12g}" if outcome.bound is not None else "bound -inf")
    lines.append(f"c message {outcome.message}".replace("\n", " "))
    if outcome.values is not None:
        for name in sorted(outcome.values):
            lines.append(f"v {name} {outcome.values[name]:.12g}")
    return "\n".join(lines) + "\n"


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="chromatic-lps",
        description="Solve a mixed-binary LP file with HiGHS and write a solution file.")
    parser.add_argument("model", help="input LP file")
    parser.add_argument("--out", required=True, help="solution file to write")
    parser.add_argument("--time-limit", type=float, default=3600.0)
    parser.add_argument("--seed", type=int, default=0,
                        help="accepted for interface uniformity; solving is deterministic")
    args = parser.parse_args(argv)

    try:
        with open(args.model, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        print(f"chromatic-lps: cannot read model: {exc}", file=sys.stderr)
        return 2
    try:
        outcome = solve_lp_text(text, time_limit=args.time_limit)
    except LpParseError as exc:
        print(f"chromatic-lps: {exc}", file=sys.stderr)
        return 3
    try:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(render_solution(outcome))
    except OSError as exc:
        print(f"chromatic-lps: cannot write solution: {exc}", file=sys.stderr)
        return 2
    print(f"chromatic-lps: {outcome.status}"
          + (f" objective {outcome.objective:.12g}" if outcome.objective is not None else ""))
    return 0


if __name__ == "__main__":
    sys.exit(main())
