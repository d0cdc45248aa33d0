from __future__ import annotations

import pytest

from parambv.ast import (
    SYMCONST,
    TRUE,
    And,
    BvApp,
    BvPred,
    IntApp,
    IntConst,
    IntVar,
    Quant,
    Sym,
    WidthMap,
    bv_free_vars,
    bv_symbols,
    conj,
    euclid_divmod,
    int_free_vars,
    pow2,
    used_ufs,
)

X, Y = Sym("x"), Sym("y")
K_PLUS_J = IntApp("+", (IntVar("k"), IntVar("j")))


class TestNodes:
    def test_arity_is_enforced(self):
        with pytest.raises(ValueError):
            BvApp("bvadd", (X,))

    def test_extract_needs_ordered_bounds(self):
        with pytest.raises(ValueError):
            BvApp("extract", (X,), (1, 2))

    def test_indices_only_on_extract(self):
        with pytest.raises(ValueError):
            BvApp("bvadd", (X, Y), (1,))

    def test_nodes_are_hashable_values(self):
        a = BvApp("bvand", (X, Y))
        assert a == BvApp("bvand", (X, Y))
        assert len({a, BvApp("bvand", (X, Y))}) == 1


class TestTraversal:
    def test_free_vars_skip_bound_ones(self):
        phi = And((BvPred("=", X, Y), Quant("forall", (X,), BvPred("=", X, X))))
        assert bv_free_vars(phi) == [X, Y]
        assert bv_free_vars(Quant("exists", (X,), BvPred("=", X, Y))) == [Y]

    def test_symbols_include_binders(self):
        assert bv_symbols(Quant("exists", (X,), BvPred("=", Y, Y))) == [X, Y]

    def test_constants_are_not_free_vars(self):
        z = Sym("z", SYMCONST)
        assert bv_free_vars(BvPred("=", X, z)) == [X]

    def test_int_free_vars_and_ufs(self):
        t = pow2(K_PLUS_J)
        assert int_free_vars(t) == ["k", "j"]
        assert used_ufs(t) == {"pow2"}

    def test_conj_flattens_and_drops_true(self):
        p = BvPred("=", X, Y)
        assert conj() == TRUE
        assert conj(TRUE, p) == p


class TestWidthMap:
    def test_build_collects_width_vars(self):
        om = WidthMap.build({X: IntVar("k"), Y: K_PLUS_J})
        assert om.width_vars == ("k", "j")
        assert om.width(Y) == K_PLUS_J

    def test_constant_without_value_is_rejected(self):
        with pytest.raises(ValueError):
            WidthMap.build({Sym("c", SYMCONST): IntConst(4)})

    def test_lookup_and_extend(self):
        om = WidthMap.build({X: IntVar("k")}, width_vars=("k",))
        om2 = om.extend({Y: IntConst(3)})
        assert om2.lookup("y") == Y and om.lookup("y") is None
        assert om2.width_vars == ("k",)


class TestEuclid:
    @pytest.mark.parametrize("a", range(-7, 8))
    @pytest.mark.parametrize("b", [-3, -2, -1, 1, 2, 3])
    def test_remainder_is_nonnegative(self, a, b):
        q, r = euclid_divmod(a, b)
        assert a == q * b + r and 0 <= r < abs(b)

    def test_zero_divisor(self):
        with pytest.raises(ZeroDivisionError):
            euclid_divmod(1, 0)
