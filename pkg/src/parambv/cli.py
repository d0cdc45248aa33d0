"""``parambv`` command line.

Exit codes: 0 success, 1 a check failed, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .axioms import MODES
from .goals import (
    LiftError,
    builtin_ic_entries,
    coverage,
    gen_ic_goals,
    lift_qfbv,
    load_ic_table,
)
from .oracle import (
    check_axiom_validity,
    check_elim_soundness,
    check_extract_scheme,
    check_lemma_suite,
    check_translation_equiv,
)
from .solver import SOLVER_ENV, SolverConfig, SolverConfigError, load_batch, prove_batch
from .sortcheck import SortError
from .syntax import ParseError, parse_pbv, pretty_pbv
from .translate import TranslationError, translate


class UsageError(Exception):
    pass


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror or exc}") from None


def _write(path: str | None, text: str):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _load_problem(path: str):
    return parse_pbv(_read(path))


def cmd_translate(args) -> int:
    phi, omega = _load_problem(args.input)
    result = translate(phi, omega, mode=args.mode, fig1_urem=args.fig1_urem)
    _write(args.out, result.to_smtlib(sat=args.sat))
    return 0


def cmd_check(args) -> int:
    reports = []
    if args.input:
        phi, omega = _load_problem(args.input)
        reports.append(check_translation_equiv(
            phi, omega, args.mode, width_bound=args.widths, bit_budget=args.bits, fig1_urem=args.fig1_urem,
        ))
    if args.axioms:
        reports.append(check_axiom_validity(args.axioms))
    if args.lemmas:
        reports.append(check_lemma_suite())
    if args.elim:
        reports.append(check_elim_soundness(fig1_urem=args.fig1_urem))
        reports.append(check_extract_scheme())
    if not reports:
        raise UsageError("nothing to check: give a problem file or --axioms/--lemmas/--elim")
    if args.json:
        print(json.dumps([r.to_dict() for r in reports], indent=2, sort_keys=True))
    else:
        for r in reports:
            print(r.to_text())
    return 0 if all(r.passed for r in reports) else 1


def cmd_gen_ic(args) -> int:
    if args.table:
        if not Path(args.table).is_file():
            raise UsageError(f"no such table: {args.table}")
        entries = load_ic_table(args.table)
    else:
        entries = builtin_ic_entries()
    cov = coverage(entries)
    goals = gen_ic_goals(entries, always_ltr=args.always_ltr)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    manifest = []
    for g in goals:
        (out / f"{g.id}.pbv").write_text(g.to_pbv())
        (out / f"{g.id}.smt2").write_text(translate(g.formula, g.omega, mode=args.mode).to_smtlib())
        manifest.append({"id": g.id, "kind": g.kind, "file": f"{g.id}.smt2", "pbv": f"{g.id}.pbv",
                         "expected": g.expected, "provenance": g.provenance})
    doc = {"schema": 1, "mode": args.mode, "coverage": cov, "goals": manifest}
    (out / "manifest.json").write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    print(f"grid slots: {cov['slots']}, covered: {cov['covered']}, missing: {len(cov['missing'])}, "
          f"duplicates: {len(cov['duplicates'])}")
    print(f"entries with inverse: {cov['with_inverse']}, trivial conditions: {cov['trivial']}")
    kinds: dict = {}
    for g in goals:
        kinds[g.kind] = kinds.get(g.kind, 0) + 1
    print("goals: " + ", ".join(f"{k} {n}" for k, n in sorted(kinds.items())) + f" -> {out}")
    return 0


def cmd_prove(args) -> int:
    template = args.solver or os.environ.get(SOLVER_ENV)
    if not template:
        raise UsageError(f"no solver: pass --solver or set {SOLVER_ENV}")
    try:
        config = SolverConfig.from_template(template, args.timeout)
    except SolverConfigError as exc:
        raise UsageError(str(exc)) from None
    try:
        goals = load_batch(args.goals)
    except FileNotFoundError as exc:
        raise UsageError(str(exc)) from None
    report = prove_batch(goals, config, mode=args.mode, jobs=args.jobs)
    if args.json:
        _write(args.json, report.to_json(timings=args.timings))
    sys.stdout.write(report.to_text())
    return 0


def cmd_lift(args) -> int:
    phi, omega = lift_qfbv(_read(args.input), width_one_as_bool=args.width_one)
    _write(args.out, pretty_pbv(phi, omega))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="parambv", description="Bit-vector formulas of parametric width.")
    sub = p.add_subparsers(dest="command", required=True)

    t = sub.add_parser("translate", help="translate a .pbv problem to SMT-LIB (UFNIA)")
    t.add_argument("input")
    t.add_argument("--mode", choices=MODES, default="combined")
    t.add_argument("--out", "-o")
    t.add_argument("--fig1-urem", action="store_true", help="urem by zero yields all-ones")
    t.add_argument("--sat", action="store_true", help="assert the problem instead of its negation")
    t.set_defaults(func=cmd_translate)

    c = sub.add_parser("check", help="exhaustive checks against concrete bit-vector semantics")
    c.add_argument("input", nargs="?")
    c.add_argument("--widths", type=int, default=4, help="check widths 1..N")
    c.add_argument("--bits", type=int, default=16, help="skip widths above this many variable bits")
    c.add_argument("--mode", choices=MODES, default="combined")
    c.add_argument("--fig1-urem", action="store_true")
    c.add_argument("--axioms", choices=MODES, help="check the axioms of a mode")
    c.add_argument("--lemmas", action="store_true", help="check the encoding lemmas")
    c.add_argument("--elim", action="store_true", help="check operator elimination and extract")
    c.add_argument("--json", action="store_true")
    c.set_defaults(func=cmd_check)

    g = sub.add_parser("gen-ic", help="generate invertibility-condition goals")
    src = g.add_mutually_exclusive_group(required=True)
    src.add_argument("--table", help=".ic table file")
    src.add_argument("--builtin", action="store_true")
    g.add_argument("--out", required=True)
    g.add_argument("--mode", choices=MODES, default="combined")
    g.add_argument("--always-ltr", action="store_true", help="also emit exists-form ltr goals")
    g.set_defaults(func=cmd_gen_ic)

    r = sub.add_parser("prove", help="run an external solver over a goal directory")
    r.add_argument("goals")
    r.add_argument("--solver", help=f"command template with {{file}}; default ${SOLVER_ENV}")
    r.add_argument("--timeout", type=float, default=10.0)
    r.add_argument("--mode", choices=MODES, default="combined")
    r.add_argument("--jobs", type=int, default=1)
    r.add_argument("--json", help="write the JSON report here")
    r.add_argument("--timings", action="store_true", help="include wall times in the JSON report")
    r.set_defaults(func=cmd_prove)

    lf = sub.add_parser("lift", help="lift a fixed-width QF_BV problem to width k")
    lf.add_argument("input")
    lf.add_argument("--out", "-o")
    lf.add_argument("--width-one", action="store_true", help="keep width-1 terms as flags")
    lf.set_defaults(func=cmd_lift)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, ParseError, SortError, TranslationError, LiftError, ValueError) as exc:
        print(f"parambv: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
