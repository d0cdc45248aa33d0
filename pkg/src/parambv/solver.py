"""Running an external SMT solver on goal batches."""

from __future__ import annotations

import json
import shlex
import subprocess
import tempfile
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .syntax import parse_pbv
from .translate import translate

PLACEHOLDER = "{file}"
SOLVER_ENV = "PARAMBV_SOLVER"
SCHEMA_VERSION = 1
STATUSES = ("proved", "disproved", "unknown", "timeout", "error")


class SolverConfigError(ValueError):
    pass


@dataclass(frozen=True)
class SolverConfig:
    """How to call a solver: an argument template with one ``{file}``."""

    argv: tuple
    timeout: float = 10.0
    answers: tuple = ("sat", "unsat", "unknown")

    def __post_init__(self):
        if self.timeout <= 0:
            raise SolverConfigError("timeout must be positive")
        if sum(arg.count(PLACEHOLDER) for arg in self.argv) != 1:
            raise SolverConfigError(f"solver template must contain {PLACEHOLDER} exactly once")

    @classmethod
    def from_template(cls, template: str, timeout: float = 10.0) -> SolverConfig:
        argv = tuple(shlex.split(template))
        if not argv:
            raise SolverConfigError("empty solver template")
        return cls(argv, timeout)

    def command(self, path) -> list:
        return [arg.replace(PLACEHOLDER, str(path)) for arg in self.argv]


def parse_answer(output: str, answers=("sat", "unsat", "unknown")) -> str | None:
    """First line of solver output that is an answer token."""
    for line in output.splitlines():
        token = line.strip()
        if token in answers:
            return token
    return None


ANSWER_STATUS = {"unsat": "proved", "sat": "disproved", "unknown": "unknown"}


@dataclass
class Outcome:
    status: str
    answer: str | None = None
    seconds: float = 0.0
    detail: str = ""


def run_solver(config: SolverConfig, path) -> Outcome:
    start = time.monotonic()
    try:
        proc = subprocess.run(
            config.command(path), capture_output=True, text=True, timeout=config.timeout
        )
    except subprocess.TimeoutExpired:
        return Outcome("timeout", None, time.monotonic() - start, f"no answer within {config.timeout}s")
    except OSError as exc:
        return Outcome("error", None, time.monotonic() - start, str(exc))
    elapsed = time.monotonic() - start
    answer = parse_answer(proc.stdout, config.answers)
    if answer is None and parse_answer(proc.stdout, ("timeout",)):
        return Outcome("timeout", None, elapsed, "solver reported timeout")
    if answer is None:
        tail = (proc.stderr or proc.stdout).strip().splitlines()[-1:] or [""]
        return Outcome("error", None, elapsed, f"exit {proc.returncode}: {tail[0]}"[:200])
    return Outcome(ANSWER_STATUS[answer], answer, elapsed)


# --------------------------------------------------------------------------
# Batches


@dataclass(frozen=True)
class GoalFile:
    id: str
    kind: str
    pbv: Path
    expected: str = "unknown"


def load_batch(directory) -> list:
    """Goals of a directory written by ``gen-ic``; without a manifest every
    ``*.pbv`` file is a goal of unknown kind."""
    directory = Path(directory)
    if not directory.is_dir():
        raise FileNotFoundError(f"no such goal directory: {directory}")
    manifest = directory / "manifest.json"
    if manifest.exists():
        data = json.loads(manifest.read_text())
        return [
            GoalFile(g["id"], g.get("kind", "unknown"), directory / g["pbv"], g.get("expected", "unknown"))
            for g in data["goals"]
        ]
    return [GoalFile(p.stem, "unknown", p) for p in sorted(directory.glob("*.pbv"))]


@dataclass
class BatchReport:
    mode: str
    results: list = field(default_factory=list)  # dicts, sorted by id

    def counts(self) -> dict:
        out = {s: 0 for s in STATUSES}
        for r in self.results:
            out[r["status"]] += 1
        return out

    def ic_classification(self) -> dict:
        """Per literal: both directions, rtl only, ltr only or neither.

        A literal without an rtl goal (its condition is the defining one)
        counts its rtl direction as holding."""
        by_entry: dict = {}
        for r in self.results:
            if not r["kind"].startswith("ic-"):
                continue
            entry, _, _ = r["id"].partition(".")
            by_entry.setdefault(entry, []).append(r)
        classes = {"full": 0, "rtl_only": 0, "ltr_only": 0, "none": 0,
                   "ltr_with_inverse": 0, "ltr_without_inverse": 0}
        for rs in by_entry.values():
            rtl = [r for r in rs if r["kind"] == "ic-rtl'"]
            rtl_ok = all(r["status"] == "proved" for r in rtl)
            inv_ok = any(r["kind"] == "ic-ltr'" and r["status"] == "proved" for r in rs)
            ex_ok = any(r["kind"] == "ic-ltr" and r["status"] == "proved" for r in rs)
            ltr_ok = inv_ok or ex_ok
            classes["ltr_with_inverse"] += inv_ok
            classes["ltr_without_inverse"] += ex_ok
            key = {(True, True): "full", (True, False): "rtl_only",
                   (False, True): "ltr_only", (False, False): "none"}[(rtl_ok, ltr_ok)]
            classes[key] += 1
        classes["literals"] = len(by_entry)
        return classes

    def to_dict(self, timings: bool = False) -> dict:
        results = []
        for r in self.results:
            row = {k: v for k, v in r.items() if k != "seconds"}
            if timings:
                row["seconds"] = round(r.get("seconds", 0.0), 3)
            results.append(row)
        return {
            "schema": SCHEMA_VERSION,
            "mode": self.mode,
            "goals": len(self.results),
            "counts": self.counts(),
            "ic": self.ic_classification(),
            "results": results,
        }

    def to_json(self, timings: bool = False) -> str:
        return json.dumps(self.to_dict(timings), indent=2, sort_keys=True) + "\n"

    def to_text(self) -> str:
        data = self.to_dict()
        lines = [f"mode {data['mode']}: {data['goals']} goals"]
        lines.append("  " + ", ".join(f"{k} {v}" for k, v in data["counts"].items()))
        ic = data["ic"]
        if ic["literals"]:
            lines.append(
                f"  literals {ic['literals']}: full {ic['full']}, rtl only {ic['rtl_only']}, "
                f"ltr only {ic['ltr_only']}, none {ic['none']}"
            )
        for r in data["results"]:
            mark = "  (expected valid)" if r["expected"] == "valid" and r["status"] != "proved" else ""
            lines.append(f"  {r['id']}: {r['status']}{mark}")
        return "\n".join(lines) + "\n"


def _prove_one(goal: GoalFile, config: SolverConfig, mode: str, workdir: Path) -> dict:
    row = {"id": goal.id, "kind": goal.kind, "expected": goal.expected}
    try:
        phi, omega = parse_pbv(goal.pbv.read_text())
        smt = translate(phi, omega, mode=mode).to_smtlib()
    except Exception as exc:  # a broken goal must not abort the batch
        return {**row, "status": "error", "answer": None, "detail": f"translation: {exc}"[:200], "seconds": 0.0}
    path = workdir / f"{goal.id}.smt2"
    path.write_text(smt)
    out = run_solver(config, path)
    return {**row, "status": out.status, "answer": out.answer, "detail": out.detail, "seconds": out.seconds}


def prove_batch(goals, config: SolverConfig, mode: str = "combined", jobs: int = 1) -> BatchReport:
    goals = sorted(goals, key=lambda g: g.id)
    with tempfile.TemporaryDirectory(prefix="parambv-") as tmp:
        workdir = Path(tmp)
        if jobs <= 1:
            rows = [_prove_one(g, config, mode, workdir) for g in goals]
        else:
            with ThreadPoolExecutor(max_workers=jobs) as pool:
                rows = list(pool.map(lambda g: _prove_one(g, config, mode, workdir), goals))
    return BatchReport(mode, rows)
