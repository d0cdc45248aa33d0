from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from parambv.ast import (
    BV_RELATIONS,
    SYMCONST,
    And,
    BvApp,
    BvConst,
    BvPred,
    Implies,
    IntApp,
    IntConst,
    IntVar,
    Not,
    Or,
    Quant,
    Sym,
    WidthMap,
)
from parambv.syntax import (
    DeclarationError,
    ParseError,
    parse_bv_term,
    parse_formula,
    parse_int_term,
    parse_pbv,
    pretty,
    pretty_pbv,
    read_all,
    substitute_bv,
)

X, Y, Z = Sym("x"), Sym("y"), Sym("z")
C = Sym("c", SYMCONST)
SYMS = {"x": X, "y": Y, "z": Z}

BINARY = ["bvadd", "bvsub", "bvmul", "bvudiv", "bvurem", "bvand", "bvor", "bvxor", "bvshl", "bvlshr", "bvashr"]

leaves = st.sampled_from([X, Y, Z, C])
terms = st.recursive(
    leaves,
    lambda sub: st.one_of(
        st.builds(lambda op, a: BvApp(op, (a,)), st.sampled_from(["bvneg", "bvnot"]), sub),
        st.builds(lambda op, a, b: BvApp(op, (a, b)), st.sampled_from(BINARY), sub, sub),
    ),
    max_leaves=6,
)
atoms = st.builds(BvPred, st.sampled_from(BV_RELATIONS), terms, terms)
formulas = st.recursive(
    atoms,
    lambda sub: st.one_of(
        st.builds(Not, sub),
        st.builds(lambda a, b: And((a, b)), sub, sub),
        st.builds(lambda a, b: Or((a, b)), sub, sub),
        st.builds(Implies, sub, sub),
        st.builds(lambda b: Quant("forall", (X,), b), sub),
        st.builds(lambda b: Quant("exists", (Y, Z), b), sub),
    ),
    max_leaves=4,
)
width_terms = st.recursive(
    st.one_of(st.builds(IntConst, st.integers(1, 9)), st.just(IntVar("k")), st.just(IntVar("j"))),
    lambda sub: st.one_of(
        st.builds(lambda a, b: IntApp("+", (a, b)), sub, sub),
        st.builds(lambda a, b: IntApp("*", (a, b)), sub, sub),
        st.builds(lambda a: IntApp("pow2", (a,)), sub),
    ),
    max_leaves=3,
)


class TestReader:
    def test_positions_are_reported(self):
        with pytest.raises(ParseError) as err:
            read_all("(assert\n  (= x y)")
        assert err.value.pos is not None

    def test_stray_paren(self):
        with pytest.raises(ParseError):
            read_all("(a))")

    def test_comments_are_skipped(self):
        assert len(read_all("; hello\n(a) ; tail\n(b)")) == 2


class TestTerms:
    def test_literals(self):
        assert parse_bv_term("#b0101") == BvConst(5, 4)
        assert parse_bv_term("#xff") == BvConst(255, 8)
        assert parse_bv_term("(_ bv3 4)") == BvConst(3, 4)

    def test_oversized_literal(self):
        with pytest.raises(ParseError):
            parse_bv_term("(_ bv16 4)")

    def test_extract(self):
        t = parse_bv_term("((_ extract 3 1) x)", SYMS)
        assert t == BvApp("extract", (X,), (3, 1))
        assert pretty(t) == "((_ extract 3 1) x)"

    def test_arity_error(self):
        with pytest.raises(ParseError):
            parse_bv_term("(bvadd x)", SYMS)

    def test_undeclared(self):
        with pytest.raises(ParseError):
            parse_formula("(= x w)", SYMS)

    def test_negative_numeral(self):
        assert parse_int_term("(- 3)") == IntConst(-3)
        assert pretty(IntConst(-3)) == "(- 3)"
        assert parse_int_term("(- k 1)") == IntApp("-", (IntVar("k"), IntConst(1)))

    def test_boolean_equality_is_iff(self):
        phi = parse_formula("(= (bvult x y) (bvugt y x))", SYMS)
        assert type(phi).__name__ == "Iff"


class TestPbv:
    def test_declarations(self, example1_text):
        phi, om = parse_pbv(example1_text)
        assert om.width_vars == ("a",)
        assert [s.name for s in om.symbols] == ["x", "z0", "z1"]
        assert om.value(om.lookup("z1")) == IntConst(1)

    def test_concrete_constants_become_symbols(self):
        phi, om = parse_pbv("(declare-width k)(declare-pbv x :bits k)(assert (= x (bvadd x #b01)))")
        c = om.lookup("_bv1_2")
        assert c is not None and om.width(c) == IntConst(2)

    def test_duplicate_declaration(self):
        with pytest.raises(DeclarationError):
            parse_pbv("(declare-width k)(declare-pbv x :bits k)(declare-pbv x :bits k)")

    def test_missing_bits(self):
        with pytest.raises(ParseError):
            parse_pbv("(declare-width k)(declare-pbv x :value 1)")

    def test_undeclared_width_var(self):
        with pytest.raises(ParseError):
            parse_pbv("(declare-pbv x :bits n)(assert (= x x))")

    def test_cannot_quantify_constants(self):
        with pytest.raises(ParseError):
            parse_pbv("(declare-width k)(declare-pbv c :bits k :value 0)(assert (forall (c) (= c c)))")

    @settings(max_examples=150, deadline=None)
    @given(formulas, width_terms, width_terms)
    def test_round_trip(self, phi, wx, wc):
        om = WidthMap.build({X: wx, Y: wx, Z: IntVar("k"), C: wc}, {C: IntConst(0)}, ("k", "j"))
        text = pretty_pbv(phi, om)
        phi2, om2 = parse_pbv(text)
        assert phi2 == phi
        assert om2.width(X) == wx and om2.width(C) == wc and om2.value(C) == IntConst(0)
        assert pretty_pbv(phi2, om2) == text


class TestSubstitution:
    def test_binders_are_renamed(self):
        phi = Quant("forall", (X,), BvPred("=", X, Y))
        W = Sym("w")
        assert substitute_bv(phi, {X: W}) == Quant("forall", (W,), BvPred("=", W, Y))
