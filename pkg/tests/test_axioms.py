from __future__ import annotations

import pytest

from parambv.axioms import MODES, all_axioms, axioms_for
from parambv.syntax import parse_int_formula


def formulas(mode, symbols=("pow2", "intand", "intor", "intxor")):
    return [a.formula for a in axioms_for(mode, symbols)]


class TestModes:
    def test_combined_is_union(self):
        assert set(formulas("combined")) == set(formulas("full")) | set(formulas("partial"))

    def test_combined_has_no_duplicates(self):
        fs = formulas("combined")
        assert len(fs) == len(set(fs))

    def test_qf_is_partial_base_cases(self):
        base = [a.formula for a in axioms_for("partial", ("pow2",)) if a.name.startswith("base-")]
        assert formulas("qf") == base
        assert [str(f.rhs.value) for f in formulas("qf")] == ["1", "2", "4", "8"]

    def test_qf_has_nothing_for_bitwise(self):
        assert formulas("qf", ("intand", "intor", "intxor")) == []

    def test_unknown_mode(self):
        with pytest.raises(ValueError):
            axioms_for("none")

    @pytest.mark.parametrize("mode", MODES)
    def test_restriction(self, mode):
        for a in axioms_for(mode, ("intor",)):
            assert a.symbol == "intor"


class TestContent:
    def test_full_pow2(self):
        assert formulas("full", ("pow2",)) == [
            parse_int_formula("(= (pow2 0) 1)"),
            parse_int_formula("(forall ((k Int)) (=> (> k 0) (= (pow2 k) (* 2 (pow2 (- k 1))))))"),
        ]

    def test_xor_zero_row(self):
        assert parse_int_formula(
            "(forall ((k Int) (x Int)) (=> (and (> k 0) (<= 0 x) (< x (pow2 k))) (= (intxor k x x) 0)))"
        ) in formulas("partial", ("intxor",))

    def test_or_duals(self):
        fs = formulas("partial", ("intor",))
        assert parse_int_formula(
            "(forall ((k Int) (x Int)) (=> (and (> k 0) (<= 0 x) (< x (pow2 k))) (= (intor k x 0) x)))"
        ) in fs
        assert parse_int_formula(
            "(forall ((k Int) (x Int)) (=> (and (> k 0) (<= 0 x) (< x (pow2 k)))"
            " (= (intor k x (- (pow2 k) 1)) (- (pow2 k) 1))))"
        ) in fs

    def test_every_quantified_axiom_is_guarded(self):
        for a in all_axioms():
            if a.quantified:
                assert type(a.formula.body).__name__ == "Implies", a.name

    def test_full_recursion_per_bitwise_symbol(self):
        names = {(a.symbol, a.name) for a in all_axioms() if a.mode == "full"}
        assert {("intand", "recursion"), ("intor", "recursion"), ("intxor", "recursion")} <= names
