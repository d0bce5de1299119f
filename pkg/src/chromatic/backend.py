"""Solve backend: LP emission, solver adapters, result normalization.

Every solve writes the model to `model.lp` in a private working directory.
Three adapter styles consume it:

  BuiltinAdapter    parses the emitted LP file back and solves in-process
                    with the bundled HiGHS core (the default; no external
                    binary needed, still exercises the LP interchange)
  CommandAdapter    runs any external solver as a subprocess from an argv
                    template with {model}/{timelimit}/{seed}/{solout}
                    placeholders and reads its output through a per-dialect
                    regex table ("chromatic", "cbc", "gurobi", "glpsol")
  NullAdapter       answers tiny models from the exact oracle by encoding a
                    witness coloring into the formulation; lets the test
                    suite run with no MILP machinery at all

Raw solver numbers are normalized once, here: the model's constant offset
is re-applied, dual bounds are rounded up to integers (every formulation
has an integral objective), and a time limit with an incumbent maps to
status "feasible".
"""
from __future__ import annotations

import json
import math
import os
import re
import shlex
import subprocess
import sys
import tempfile
import time
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

from . import lpsolve
from .graph import Coloring
from .lp import emit_lp
from .models import MilpModel, check_feasible, encode_coloring, objective_value
from .oracle import chromatic_number_exact

KILL_GRACE_SECONDS = 10.0
INTEGRALITY_EPS = 1e-6
ENV_SOLVER_OVERRIDE = "CHROMATIC_SOLVER"


class SolveStatus(str, Enum):
    OPTIMAL = "optimal"
    FEASIBLE = "feasible"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"
    TIMEOUT_NO_SOLUTION = "timeout_no_solution"
    ERROR = "error"


class SolverNotFoundError(RuntimeError):
    pass


class SolutionParseError(ValueError):
    """Malformed solution text; message carries the 1-based line number."""


@dataclass(frozen=True)
class SolveResult:
    status: SolveStatus
    lower_bound: int | None
    upper_bound: int | None
    values: dict[str, int] | None
    wall_time: float
    log: str = ""

    @property
    def solved(self) -> bool:
        return self.status is SolveStatus.OPTIMAL


@dataclass(frozen=True)
class RawSolve:
    """What an adapter reports before normalization (no offset applied)."""

    status_word: str
    objective: float | None
    bound: float | None
    values: dict[str, float] | None
    log: str = ""


@dataclass(frozen=True)
class ParsedSolution:
    status_word: str | None
    objective: float | None
    bound: float | None
    values: dict[str, float]


# ---------------------------------------------------------------------------
# solution-file dialects

_NAME = r"[A-Za-z_][A-Za-z0-9_.\[\]]*"
_NUM = r"[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?"


@dataclass(frozen=True)
class Dialect:
    """Regex table describing one solver's solution/log text."""

    name: str
    status_patterns: tuple[tuple[str, str], ...]
    objective_pattern: str | None
    bound_pattern: str | None
    var_pattern: str
    strict: bool = False  # unrecognized non-blank lines are an error


DIALECTS: dict[str, Dialect] = {
    "chromatic": Dialect(
        name="chromatic",
        status_patterns=tuple((rf"^status\s+({word})\s*$", word)
                              for word in lpsolve.STATUS_WORDS),
        objective_pattern=rf"^objective\s+({_NUM})\s*$",
        bound_pattern=rf"^bound\s+({_NUM}|-inf)\s*$",
        var_pattern=rf"^v\s+({_NAME})\s+({_NUM})\s*$",
        strict=True,
    ),
    "cbc": Dialect(
        name="cbc",
        status_patterns=(
            (r"^Optimal", "optimal"),
            (r"^Stopped on time", "feasible"),
            (r"^Infeasible", "infeasible"),
            (r"^Integer infeasible", "infeasible"),
            (r"^Unbounded", "unbounded"),
        ),
        objective_pattern=rf"objective value\s+({_NUM})",
        bound_pattern=None,
        var_pattern=rf"^\s*\d+\s+({_NAME})\s+({_NUM})",
    ),
    "gurobi": Dialect(
        name="gurobi",
        status_patterns=(
            (r"Optimal solution found", "optimal"),
            (r"Time limit reached", "feasible"),
            (r"Model is infeasible", "infeasible"),
            (r"Model is unbounded", "unbounded"),
        ),
        objective_pattern=rf"^# Objective value\s*=\s*({_NUM})",
        bound_pattern=rf"Best objective {_NUM}, best bound ({_NUM})",
        var_pattern=rf"^({_NAME})\s+({_NUM})\s*$",
    ),
    "glpsol": Dialect(
        name="glpsol",
        status_patterns=(
            (r"INTEGER OPTIMAL", "optimal"),
            (r"INTEGER NON-OPTIMAL", "feasible"),
            (r"INTEGER EMPTY", "infeasible"),
            (r"HAS NO.*FEASIBLE SOLUTION", "infeasible"),
            (r"UNBOUNDED", "unbounded"),
        ),
        objective_pattern=rf"^Objective:\s+\S+\s*=\s*({_NUM})",
        bound_pattern=None,
        var_pattern=rf"^\s*\d+\s+({_NAME})\s+\*?\s+({_NUM})",
    ),
}


def parse_solution(text: str, dialect: str | Dialect) -> ParsedSolution:
    """Scan solver output with a dialect's regex table.

    Strict dialects reject unrecognized lines with the line number; the
    others skim logs for whatever matches. Raises SolutionParseError only --
    arbitrary input must never escape as another exception.
    """
    table = DIALECTS[dialect] if isinstance(dialect, str) else dialect
    status_res = [(re.compile(pat), word) for pat, word in table.status_patterns]
    objective_re = re.compile(table.objective_pattern) if table.objective_pattern else None
    bound_re = re.compile(table.bound_pattern) if table.bound_pattern else None
    var_re = re.compile(table.var_pattern)

    status = None
    objective = None
    bound = None
    values: dict[str, float] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip() or line.startswith("c ") or line.strip() == "c":
            continue
        matched = False
        for pattern, word in status_res:
            if pattern.search(line):
                status, matched = word, True
                break
        if objective_re:
            m = objective_re.search(line)
            if m:
                objective, matched = float(m.group(1)), True
        if bound_re:
            m = bound_re.search(line)
            if m:
                raw = m.group(1)
                bound = None if raw == "-inf" else float(raw)
                matched = True
        if not matched:
            m = var_re.match(line)
            if m:
                values[m.group(1)] = float(m.group(2))
                matched = True
        if not matched and table.strict and not line.startswith("#"):
            raise SolutionParseError(f"line {lineno}: unrecognized line {line!r} "
                                     f"for dialect {table.name}")
    return ParsedSolution(status, objective, bound, values)


# ---------------------------------------------------------------------------
# adapters

class BuiltinAdapter:
    """Default adapter: the bundled HiGHS core, run in-process on the LP file."""

    name = "builtin"
    dialect = "chromatic"

    def solve_model(self, model: MilpModel, lp_path: Path, time_limit: float,
                    seed: int, workdir: Path) -> RawSolve:
        outcome = lpsolve.solve_lp_text(lp_path.read_text(encoding="utf-8"),
                                        time_limit=time_limit)
        return RawSolve(status_word=outcome.status, objective=outcome.objective,
                        bound=outcome.bound, values=outcome.values,
                        log=outcome.message)


@dataclass(frozen=True)
class CommandAdapter:
    """External solver as a subprocess: argv template plus output dialect.

    Placeholders {model}, {timelimit}, {seed} and {solout} are substituted
    into the argument template. The CHROMATIC_SOLVER environment variable
    overrides the executable path. The child is killed 10 seconds past the
    time limit; whatever solution file exists by then is still parsed.
    """

    executable: str
    args: tuple[str, ...]
    dialect: str = "chromatic"
    name: str = "command"
    time_limit_scale: float = 1.0

    def argv(self, lp_path: Path, time_limit: float, seed: int, solout: Path) -> list[str]:
        subst = {
            "model": str(lp_path),
            "timelimit": f"{time_limit * self.time_limit_scale:g}",
            "seed": str(seed),
            "solout": str(solout),
        }
        exe = os.environ.get(ENV_SOLVER_OVERRIDE) or self.executable
        return [exe] + [arg.format(**subst) for arg in self.args]

    def solve_model(self, model: MilpModel, lp_path: Path, time_limit: float,
                    seed: int, workdir: Path) -> RawSolve:
        solout = workdir / "model.sol"
        argv = self.argv(lp_path, time_limit, seed, solout)
        timed_out = False
        try:
            proc = subprocess.run(argv, capture_output=True, text=True,
                                  cwd=workdir, timeout=time_limit + KILL_GRACE_SECONDS)
            log = proc.stdout + ("\n" + proc.stderr if proc.stderr else "")
        except FileNotFoundError as exc:
            raise SolverNotFoundError(f"solver executable not found: {argv[0]}") from exc
        except subprocess.TimeoutExpired as exc:
            timed_out = True
            log = (exc.stdout or "") + "\n" + (exc.stderr or "")

        sol_text = solout.read_text(encoding="utf-8") if solout.exists() else ""
        try:
            parsed = parse_solution(sol_text, self.dialect) if sol_text else \
                ParsedSolution(None, None, None, {})
            if parsed.status_word is None or parsed.objective is None:
                from_log = parse_solution(log, self.dialect)
                parsed = ParsedSolution(
                    parsed.status_word or from_log.status_word,
                    parsed.objective if parsed.objective is not None else from_log.objective,
                    parsed.bound if parsed.bound is not None else from_log.bound,
                    parsed.values or from_log.values)
        except SolutionParseError:
            return RawSolve("error", None, None, None, log=log + "\n" + sol_text)

        status = parsed.status_word
        if status is None:
            status = "nosolution" if timed_out else "error"
        values = parsed.values if parsed.values else None
        if status in ("optimal", "feasible") and values is None:
            status = "error"
        return RawSolve(status_word=status, objective=parsed.objective,
                        bound=parsed.bound, values=values, log=log)


def builtin_subprocess_adapter() -> CommandAdapter:
    """The bundled solver, but driven through the real subprocess path."""
    return CommandAdapter(
        executable=sys.executable,
        args=("-m", "chromatic.lpsolve", "{model}", "--out", "{solout}",
              "--time-limit", "{timelimit}", "--seed", "{seed}"),
        dialect="chromatic",
        name="builtin-sub",
    )


@dataclass(frozen=True)
class NullAdapter:
    """Oracle-backed stand-in for environments with no MILP solver.

    Only for tiny models built by this package: it computes the chromatic
    number exactly, permutes the witness coloring onto any clique precolors
    (anchor to the top color for the partial-ordering family), encodes it
    into the formulation's variables, and reports it as optimal.
    """

    cap: int = 16
    name: str = "null"

    def solve_model(self, model: MilpModel, lp_path: Path, time_limit: float,
                    seed: int, workdir: Path) -> RawSolve:
        g = model.graph
        if g.n > self.cap:
            raise ValueError(f"null adapter handles at most {self.cap} vertices, got {g.n}")
        oracle = chromatic_number_exact(g, cap=self.cap)
        chi = oracle.chi
        upper = model.meta.get("upper_bound")
        if isinstance(upper, int) and chi > upper:
            return RawSolve("infeasible", None, None, None,
                            log=f"chromatic number {chi} exceeds color bound {upper}")
        coloring = self._align(model, oracle.witness, chi)
        values = encode_coloring(model, coloring)
        violated = check_feasible(model, values)
        if violated:
            raise AssertionError(f"oracle encoding violated {violated[:5]}")
        raw_obj = objective_value(model, values, with_offset=False)
        return RawSolve("optimal", raw_obj, raw_obj, dict(values), log="oracle")

    def _align(self, model: MilpModel, witness: Coloring, chi: int) -> Coloring:
        clique = tuple(model.meta.get("clique") or ())
        anchor = model.meta.get("anchor")
        targets: dict[int, int] = {}
        if model.fixings and model.kind in ("ass-s", "ass", "pop", "pop2"):
            others = tuple(v for v in sorted(clique) if v != anchor)
            for k, u in enumerate(others, start=1):
                targets[witness.colors[u]] = k
            if isinstance(anchor, int):
                targets[witness.colors[anchor]] = len(clique) if model.kind in ("ass-s", "ass") else chi
        elif model.kind in ("pop", "pop2") and isinstance(anchor, int):
            targets[witness.colors[anchor]] = chi
        if not targets:
            return witness
        free_targets = [c for c in range(1, chi + 1) if c not in targets.values()]
        mapping = dict(targets)
        for c in range(1, chi + 1):
            if c not in mapping:
                mapping[c] = free_targets.pop(0)
        return Coloring(tuple(mapping[c] for c in witness.colors))


# ---------------------------------------------------------------------------
# adapter configuration

BUILTIN_ADAPTERS = ("builtin", "builtin-sub", "null")


def load_adapter(spec: str):
    """Resolve an adapter name or a JSON adapter-config file path.

    JSON schema: {"name": str, "path": str, "args": [str...], "dialect": str}
    with the {model}/{timelimit}/{seed}/{solout} placeholders inside args.
    """
    if spec == "builtin":
        return BuiltinAdapter()
    if spec == "builtin-sub":
        return builtin_subprocess_adapter()
    if spec == "null":
        return NullAdapter()
    path = Path(spec)
    if not path.exists():
        raise SolverNotFoundError(f"unknown adapter {spec!r}: not a built-in name "
                                  f"({', '.join(BUILTIN_ADAPTERS)}) and no such file")
    config = json.loads(path.read_text(encoding="utf-8"))
    dialect = config.get("dialect", "chromatic")
    if dialect not in DIALECTS:
        raise ValueError(f"adapter config {spec}: unknown dialect {dialect!r}")
    args = config.get("args")
    if isinstance(args, str):
        args = shlex.split(args)
    return CommandAdapter(
        executable=config["path"],
        args=tuple(args or ()),
        dialect=dialect,
        name=config.get("name", path.stem),
    )


# ---------------------------------------------------------------------------
# the solve entry point

_STATUS_MAP = {
    "optimal": SolveStatus.OPTIMAL,
    "feasible": SolveStatus.FEASIBLE,
    "infeasible": SolveStatus.INFEASIBLE,
    "unbounded": SolveStatus.UNBOUNDED,
    "nosolution": SolveStatus.TIMEOUT_NO_SOLUTION,
    "error": SolveStatus.ERROR,
}


def integral_floor_bound(raw: float) -> int:
    """Round a dual bound up to the integer it actually proves."""
    return math.ceil(raw - INTEGRALITY_EPS)


def _round_values(raw_values: dict[str, float]) -> dict[str, int]:
    out = {}
    for name, value in raw_values.items():
        if abs(value) <= INTEGRALITY_EPS:
            out[name] = 0
        elif abs(value - 1.0) <= INTEGRALITY_EPS:
            out[name] = 1
        else:
            raise SolutionParseError(f"non-binary incumbent value {name}={value}")
    return out


def solve(model: MilpModel, adapter=None, time_limit: float = 3600.0, seed: int = 0,
          workdir: str | Path | None = None) -> SolveResult:
    """Emit the model, run the adapter, normalize bounds and status.

    The LP file is always written (to `workdir` when given, else a fresh
    temporary directory), so solve artifacts are reproducible byte-for-byte.
    """
    if adapter is None:
        adapter = BuiltinAdapter()
    started = time.monotonic()

    def run(directory: Path) -> RawSolve:
        lp_path = directory / "model.lp"
        lp_path.write_text(emit_lp(model), encoding="utf-8")
        return adapter.solve_model(model, lp_path, time_limit, seed, directory)

    if workdir is None:
        with tempfile.TemporaryDirectory(prefix="chromatic-") as tmp:
            raw = run(Path(tmp))
    else:
        directory = Path(workdir)
        directory.mkdir(parents=True, exist_ok=True)
        raw = run(directory)
    wall = time.monotonic() - started

    status = _STATUS_MAP.get(raw.status_word, SolveStatus.ERROR)
    offset = model.offset
    values = None
    upper = None
    lower = None
    if raw.values is not None and status in (SolveStatus.OPTIMAL, SolveStatus.FEASIBLE):
        try:
            values = _round_values(raw.values)
        except SolutionParseError as exc:
            return SolveResult(SolveStatus.ERROR, None, None, None, wall,
                               log=f"{exc}\n{raw.log}")
        objective = raw.objective
        if objective is None:
            objective = objective_value(model, values, with_offset=False)
        upper = round(objective) + offset
    if status is SolveStatus.OPTIMAL:
        lower = upper
    elif raw.bound is not None and math.isfinite(raw.bound):
        lower = integral_floor_bound(raw.bound) + offset
    if status is SolveStatus.FEASIBLE and values is None:
        status = SolveStatus.TIMEOUT_NO_SOLUTION
    if lower is not None and upper is not None and lower > upper:
        lower = upper
    return SolveResult(status=status, lower_bound=lower, upper_bound=upper,
                       values=values, wall_time=wall, log=raw.log)
