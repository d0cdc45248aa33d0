from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from parambv.ast import BvApp, BvPred, IntVar, Sym, WidthMap
from parambv.oracle import (
    BINARY_OPS,
    RELATIONS,
    UNARY_OPS,
    BvValue,
    OracleError,
    bits_apply,
    check_axiom_validity,
    check_elim_soundness,
    check_lemma_suite,
    check_translation_equiv,
    eval_bv_formula,
    eval_int_intended,
    instantiate,
    word_apply,
)
from parambv.syntax import parse_int_term, parse_pbv

X, Y = Sym("x"), Sym("y")
K = IntVar("k")


class TestValues:
    def test_signed_view(self):
        assert BvValue(4, 12).to_int() == -4
        assert BvValue(4, 7).to_int() == 7
        assert BvValue(1, 1).to_int() == -1

    def test_bits_round_trip(self):
        v = BvValue(5, 19)
        assert BvValue.from_bits(v.bits()) == v

    def test_range(self):
        with pytest.raises(OracleError):
            BvValue(3, 8)
        assert BvValue.wrap(3, -1).nat == 7


class TestSemantics:
    def test_division_by_zero(self):
        x, z = BvValue(4, 9), BvValue(4, 0)
        assert word_apply("bvudiv", [x, z]).nat == 15
        assert word_apply("bvurem", [x, z]).nat == 9

    def test_shift_overflow(self):
        x = BvValue(4, 9)
        assert word_apply("bvshl", [x, BvValue(4, 4)]).nat == 0
        assert word_apply("bvashr", [x, BvValue(4, 7)]).nat == 15

    def test_signed_compare(self):
        assert word_apply("bvslt", [BvValue(4, 8), BvValue(4, 0)])
        assert not word_apply("bvult", [BvValue(4, 8), BvValue(4, 0)])

    @given(
        st.sampled_from(BINARY_OPS + RELATIONS),
        st.integers(1, 9).flatmap(lambda k: st.tuples(st.just(k), st.integers(0, 2**k - 1), st.integers(0, 2**k - 1))),
    )
    def test_word_and_bit_level_agree(self, op, case):
        k, a, b = case
        args = [BvValue(k, a), BvValue(k, b)]
        assert word_apply(op, args) == bits_apply(op, args)

    @given(st.sampled_from(UNARY_OPS), st.integers(1, 9).flatmap(lambda k: st.tuples(st.just(k), st.integers(0, 2**k - 1))))
    def test_unary_agree(self, op, case):
        k, a = case
        assert word_apply(op, [BvValue(k, a)]) == bits_apply(op, [BvValue(k, a)])


class TestIntended:
    def test_pow2_negative_is_an_error(self):
        with pytest.raises(OracleError):
            eval_int_intended(parse_int_term("(pow2 (- 0 1))"), {})

    def test_bitwise(self):
        assert eval_int_intended(parse_int_term("(intand 3 6 5)"), {}) == 4
        assert eval_int_intended(parse_int_term("(intxor 2 3 1)"), {}) == 2
        assert eval_int_intended(parse_int_term("(intor k 8 1)"), {"k": 3}) == 1

    def test_euclidean(self):
        assert eval_int_intended(parse_int_term("(mod (- 0 7) 3)"), {}) == 2
        assert eval_int_intended(parse_int_term("(div (- 0 7) 3)"), {}) == -3


class TestInstantiate:
    def test_widths_and_constants(self, example1_text):
        phi, om = parse_pbv(example1_text)
        inst = instantiate(phi, om, {"a": 3})
        assert eval_bv_formula(inst, {"x": 5})

    def test_quantifier_over_fixed_width(self):
        phi, om = parse_pbv("(declare-width k)(declare-pbv x :bits k)(declare-pbv y :bits k)"
                            "(assert (exists (x) (= (bvadd x y) y)))")
        assert eval_bv_formula(instantiate(phi, om, {"k": 3}), {"y": 6})


class TestTranslationEquivalence:
    def test_example1(self, example1_text):
        report = check_translation_equiv(*parse_pbv(example1_text), "qf", width_bound=4)
        assert report.passed and report.counts["valuations"] == 4

    @pytest.mark.parametrize("op", BINARY_OPS)
    def test_single_operator(self, op):
        om = WidthMap.build({X: K, Y: K}, width_vars=("k",))
        phi = BvPred("=", BvApp(op, (X, Y)), X)
        assert check_translation_equiv(phi, om, "combined", width_bound=5).passed

    def test_fig1_urem_probe_mismatches(self):
        phi, om = parse_pbv("(declare-width k)(declare-pbv x :bits k)(declare-pbv z :bits k :value 0)"
                            "(assert (= (bvurem x z) x))")
        assert check_translation_equiv(phi, om, width_bound=3).passed
        report = check_translation_equiv(phi, om, width_bound=3, fig1_urem=True)
        assert not report.passed and report.failures

    def test_bit_budget_skips(self):
        om = WidthMap.build({X: K, Y: K}, width_vars=("k",))
        report = check_translation_equiv(BvPred("=", X, Y), om, width_bound=5, bit_budget=6)
        assert report.passed and report.skipped


class TestSuites:
    def test_elim_small(self):
        assert check_elim_soundness(k_max=3).passed

    def test_elim_fig1_urem_fails(self):
        report = check_elim_soundness(k_max=2, fig1_urem=True, ops=["bvurem"])
        assert not report.passed

    @pytest.mark.parametrize("mode", ["partial", "qf"])
    def test_axioms_small(self, mode):
        assert check_axiom_validity(mode, k_max=3, exp_max=8).passed

    def test_lemmas_small(self):
        assert check_lemma_suite(k_max=3).passed

    def test_report_json_is_stable(self):
        a = check_lemma_suite(k_max=2).to_json()
        assert a == check_lemma_suite(k_max=2).to_json()
