from __future__ import annotations

import itertools
from pathlib import Path

import pytest
from conftest import FIXTURES

from parambv.ast import TRUE, BvApp, BvPred, IntVar, Quant, Sym, WidthMap
from parambv.goals import (
    CONSTANTS,
    IC_RELATIONS,
    SHAPES,
    TRIVIAL_SHAPES,
    ICEntry,
    LiftError,
    S,
    T,
    X,
    builtin_ic_entries,
    check_condition,
    check_inverse,
    check_lift_roundtrip,
    coverage,
    format_ic_table,
    gen_ic_goals,
    grid_slots,
    inverse_cells,
    lift_qfbv,
    parse_ic_table,
    read_qfbv,
    rewrite_axiom,
    rewrite_fixpoint,
    solvable_everywhere,
)
from parambv.oracle import eval_bv_formula, instantiate
from parambv.syntax import ParseError, parse_bv_term, parse_formula, parse_pbv, pretty
from parambv.translate import translate

SYMS = {"s": S, "t": T, **CONSTANTS}


def entry(ident):
    return next(e for e in builtin_ic_entries() if e.id == ident)


def bv(text):
    return parse_bv_term(text, SYMS)


class TestGrid:
    def test_sizes(self):
        assert len(SHAPES) == 16 and len(IC_RELATIONS) == 10
        assert len(grid_slots()) == 160

    def test_builtin_covers_grid_once(self):
        cov = coverage(builtin_ic_entries())
        assert cov["covered"] == 160 and not cov["missing"] and not cov["duplicates"]

    def test_ids_are_unique(self):
        ids = [e.id for e in builtin_ic_entries()]
        assert len(set(ids)) == 160
        assert "bvand_xs_eq" in ids and "bvneg_x_ult" in ids and "bvurem_sx_sge" in ids

    def test_literal_shapes(self):
        assert pretty(ICEntry("bvshl", 1, "bvult").literal()) == "(bvult (bvshl s x) t)"
        assert pretty(ICEntry("bvnot", 0, "=").literal()) == "(= (bvnot x) t)"

    def test_commutative_ops_appear_once(self):
        with pytest.raises(ValueError):
            ICEntry("bvand", 1, "=")

    def test_x_is_not_allowed_in_conditions(self):
        with pytest.raises(ValueError):
            ICEntry("bvand", 0, "=", BvPred("=", X, T))


class TestBuiltins:
    def test_quoted_conditions(self):
        assert entry("bvand_xs_eq").cond == parse_formula("(= (bvand t s) t)", SYMS)
        assert entry("bvand_xs_ne").cond == parse_formula("(or (distinct t zero) (distinct s zero))", SYMS)
        assert entry("bvor_xs_ule").inverse == S

    def test_inverse_cells(self):
        cells = inverse_cells()
        assert len(cells) == 133
        assert cells[("bvadd", 0, "=")] == bv("(bvsub t s)")
        assert cells[("bvurem", 1, "bvsgt")] == bv("(bvsub (bvor s mins) (bvand maxs (bvsub t maxs)))")
        assert ("bvashr", 0, "=") not in cells and ("bvmul", 0, "bvugt") not in cells

    def test_blanks_have_no_inverse(self):
        assert entry("bvmul_xs_eq").inverse is None
        assert entry("bvudiv_xs_uge").inverse is None

    def test_trivial_shapes_match_definition(self):
        # frozen from widths 1..6; recomputed here at 1..4
        assert {s for s in grid_slots() if solvable_everywhere(s, 4)} == TRIVIAL_SHAPES
        assert len(TRIVIAL_SHAPES) == 31

    def test_closed_form_conditions_are_exact(self):
        for e in builtin_ic_entries():
            if e.cond is not None and not e.trivial:
                report = check_condition(e, 4)
                assert report.passed, (e.id, report.failures)


class TestCheckInverse:
    def test_add_eq(self):
        assert check_inverse(entry("bvadd_xs_eq"), 4).passed

    def test_or_eq(self):
        assert check_inverse(entry("bvor_xs_eq"), 4).passed

    def test_corrupted_inverse_fails(self):
        bad = entry("bvadd_xs_eq").with_inverse(bv("(bvadd t s)"))
        report = check_inverse(bad, 4)
        assert not report.passed
        # at width 1 addition and subtraction coincide
        assert report.failures == [{"k": 2, "s": 1, "t": 0}]

    def test_width_one_failures(self):
        """Two published cells do not hold at width 1, where max_s is 0."""
        for ident, witness in (("bvshl_xs_ne", {"k": 1, "s": 0, "t": 0}), ("bvmul_xs_ne", {"k": 1, "s": 1, "t": 0})):
            report = check_inverse(entry(ident), 4)
            assert report.failures == [witness]

    def test_sampling_at_larger_widths(self):
        report = check_inverse(entry("bvudiv_xs_eq"), 2, samples=50, sample_widths=(8,), seed=3)
        assert report.passed and report.counts["cases"] == 16 + 4 + 50

    def test_needs_an_inverse(self):
        with pytest.raises(ValueError):
            check_inverse(entry("bvmul_xs_eq"))


class TestGoalGeneration:
    def test_and_eq(self):
        goals = {g.id: g for g in gen_ic_goals([entry("bvand_xs_eq")])}
        assert set(goals) == {"bvand_xs_eq.rtl", "bvand_xs_eq.ltr-inv"}
        rtl = goals["bvand_xs_eq.rtl"]
        assert rtl.kind == "ic-rtl'" and rtl.expected == "unknown"
        assert pretty(rtl.formula) == "(=> (= (bvand x s) t) (= (bvand t s) t))"
        assert pretty(goals["bvand_xs_eq.ltr-inv"].formula) == "(=> (= (bvand t s) t) (= (bvand t s) t))"

    def test_or_ule_uses_s(self):
        g = next(g for g in gen_ic_goals([entry("bvor_xs_ule")]) if g.kind == "ic-ltr'")
        assert pretty(g.formula) == "(=> (bvuge t s) (bvule (bvor s s) t))"

    def test_trivial_rtl_expected_valid(self):
        goals = gen_ic_goals([entry("bvadd_xs_eq")])
        assert [g.expected for g in goals if g.kind == "ic-rtl'"] == ["valid"]

    def test_blank_inverse_gives_exists_goal(self):
        goals = gen_ic_goals([entry("bvmul_xs_eq")])
        assert [g.kind for g in goals] == ["ic-rtl'", "ic-ltr"]
        assert isinstance(goals[1].formula.rhs, Quant)

    def test_exact_condition_skips_rtl(self):
        goals = gen_ic_goals([entry("bvashr_xs_slt")])
        assert [g.kind for g in goals] == ["ic-ltr'"]
        assert pretty(goals[0].formula) == "(=> (bvslt (bvashr x s) t) (bvslt (bvashr mins s) t))"

    def test_always_ltr(self):
        kinds = [g.kind for g in gen_ic_goals([entry("bvand_xs_eq")], always_ltr=True)]
        assert kinds == ["ic-rtl'", "ic-ltr'", "ic-ltr"]

    def test_goals_round_trip_and_translate(self):
        for g in gen_ic_goals(builtin_ic_entries()):
            phi, om = parse_pbv(g.to_pbv())
            assert phi == g.formula
            translate(phi, om, mode="combined")

    def test_goals_hold_at_small_widths(self):
        """Every generated goal except the two width-1 cells holds at widths 1..3."""
        failing = set()
        for g in gen_ic_goals(builtin_ic_entries()):
            free = [v.name for v in g.omega.symbols if v.is_var and v.name in ("x", "s", "t")]
            for k in (1, 2, 3):
                inst = instantiate(g.formula, g.omega, {"k": k})
                for vals in itertools.product(range(1 << k), repeat=len(free)):
                    if not eval_bv_formula(inst, dict(zip(free, vals))):
                        failing.add(g.id)
        assert failing == {"bvshl_xs_ne.ltr-inv", "bvmul_xs_ne.ltr-inv"}


class TestIcFormat:
    def test_round_trip(self):
        entries = builtin_ic_entries()
        back = parse_ic_table(format_ic_table(entries))
        assert [(e.shape, e.cond, e.inverse) for e in back] == [(e.shape, e.cond, e.inverse) for e in entries]

    def test_example_line(self):
        [e] = parse_ic_table("(ic (literal (bvor 0) bvule) (cond (bvuge t s)) (inverse s))")
        assert e.id == "bvor_xs_ule" and e.inverse == S

    def test_true_and_none(self):
        [e] = parse_ic_table("(ic (literal (bvneg 0) =) (cond true) (inverse none))")
        assert e.cond == TRUE and e.inverse is None

    @pytest.mark.parametrize("text", [
        "(ic (literal (bvand 1) =) (cond true) (inverse none))",
        "(ic (literal (bvfoo 0) =) (cond true) (inverse none))",
        "(ic (literal (bvand 0) bvlt) (cond true) (inverse none))",
        "(ic (literal (bvand 0) =) (cond (= x t)) (inverse none))",
        "(ic (literal (bvand 0) =) (cond true))",
        "(inverse)",
    ])
    def test_errors(self, text):
        with pytest.raises(ParseError):
            parse_ic_table(text)


class TestLift:
    def test_constants(self):
        phi, om = lift_qfbv(
            "(declare-fun a () (_ BitVec 8))"
            "(assert (and (bvult a #xff) (bvslt a #x7f) (bvsgt a #x80) (= (bvshl a #x08) #x00) (distinct a #x01)))"
        )
        values = {s.name: pretty(om.value(s)) for s in om.symbols if not s.is_var}
        assert values == {
            "c_ones": "(- (pow2 k) 1)", "c_maxs": "(- (pow2 (- k 1)) 1)", "c_mins": "(pow2 (- k 1))",
            "c_width": "k", "c_zero": "0", "c_one": "1",
        }
        assert om.width_vars == ("k",)

    def test_other_constant_rejected(self):
        with pytest.raises(LiftError):
            lift_qfbv("(declare-fun a () (_ BitVec 8))(assert (= a #x05))")

    def test_mixed_widths_rejected(self):
        with pytest.raises(LiftError):
            lift_qfbv("(declare-fun a () (_ BitVec 8))(declare-fun b () (_ BitVec 4))(assert (= a a))(assert (= b b))")

    def test_width_one_flag(self):
        text = ("(declare-fun a () (_ BitVec 4))(declare-fun f () (_ BitVec 1))"
                "(assert (=> (= f #b1) (= (bvand a #x0) #x0)))")
        with pytest.raises(LiftError):
            lift_qfbv(text)
        phi, om = lift_qfbv(text, width_one_as_bool=True)
        assert pretty(om.width(om.lookup("f"))) == "1"
        assert check_lift_roundtrip(text, width_one_as_bool=True).passed

    def test_width_var_avoids_names(self):
        phi, om = lift_qfbv("(declare-fun k () (_ BitVec 4))(assert (= k k))")
        assert om.width_vars == ("k_",)

    def test_reads_width(self):
        assert read_qfbv("(declare-fun a () (_ BitVec 6))(assert (= a a))").width == 6

    @pytest.mark.parametrize("path", sorted((FIXTURES / "lift").glob("*.smt2")), ids=lambda p: p.stem)
    def test_fixture_round_trip(self, path: Path):
        report = check_lift_roundtrip(path.read_text())
        assert report.passed and not report.skipped


class TestRewriteFixpoint:
    def om(self):
        return WidthMap.build({Sym("x"): IntVar("k")}, width_vars=("k",))

    def pairs(self):
        x = Sym("x")
        first = (BvApp("bvand", (x, x)), x)
        second = (BvApp("bvadd", (BvApp("bvand", (x, x)), x)), BvApp("bvadd", (x, x)))
        return [second, first]

    def test_empty(self):
        assert rewrite_fixpoint([], lambda g: "proved", self.om()) == ([], 1)

    def test_second_round_uses_axioms(self):
        seen = []

        def prover(goal):
            seen.append((goal.id, len(goal.axioms)))
            lhs = goal.formula.lhs
            if lhs.op == "bvand" or goal.axioms:
                return "proved"
            return "unknown"

        proved, rounds = rewrite_fixpoint(self.pairs(), prover, self.om())
        assert proved == [self.pairs()[1], self.pairs()[0]]
        assert rounds == 3
        assert seen == [("rewrite-0", 0), ("rewrite-1", 0), ("rewrite-0", 1)]

    def test_unprovable_stops(self):
        proved, rounds = rewrite_fixpoint(self.pairs(), lambda g: "unknown", self.om())
        assert proved == [] and rounds == 1

    def test_prover_errors_count_as_unproved(self):
        def boom(goal):
            raise RuntimeError("solver died")

        assert rewrite_fixpoint(self.pairs(), boom, self.om()) == ([], 1)

    def test_axiom_shape(self):
        lhs, rhs = self.pairs()[1]
        ax = rewrite_axiom(lhs, rhs, self.om())
        assert pretty(ax) == (
            "(forall ((_ix_x Int)) (=> (and (<= 0 _ix_x) (< _ix_x (pow2 k))) (= (intand k _ix_x _ix_x) _ix_x)))"
        )
        goal_text = translate(BvPred("=", *self.pairs()[0]), self.om(), extra_axioms=[ax]).to_smtlib()
        assert "(forall ((_ix_x Int))" in goal_text
