"""Axiom blocks for the uninterpreted symbols pow2, intand, intor, intxor.

Each axiom is stored once with its explicit guards.  Bound variables carry a
*role* so that the oracle can enumerate instances: ``width`` (a positive
bit-width), ``bv:k`` (an integer in ``[0, pow2(k))``) or ``int`` (unconstrained).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cache

from .syntax import parse_int_formula

MODES = ("full", "partial", "combined", "qf")


@dataclass(frozen=True)
class Axiom:
    name: str
    symbol: str  # which UF the axiom constrains
    mode: str  # "full" or "partial"
    formula: object
    roles: tuple  # ((var, role), ...) in binding order

    @property
    def quantified(self) -> bool:
        return bool(self.roles)


def _hsel(k, i, x):
    return f"(mod (div {x} (pow2 {i})) 2)"


def _min(a, b):
    return f"(ite (<= {a} {b}) {a} {b})"


def _max(a, b):
    return f"(ite (>= {a} {b}) {a} {b})"


def _guard(roles):
    parts = []
    for v, role in roles:
        if role == "width":
            parts.append(f"(> {v} 0)")
        elif role.startswith("bv:"):
            parts += [f"(<= 0 {v})", f"(< {v} (pow2 {role[3:]}))"]
    if not parts:
        return None
    return parts[0] if len(parts) == 1 else f"(and {' '.join(parts)})"


def _forall(roles, body):
    binders = " ".join(f"({v} Int)" for v, _ in roles)
    guard = _guard(roles)
    inner = f"(=> {guard} {body})" if guard else body
    return f"(forall ({binders}) {inner})"


def _not(k, x):
    return f"(- (pow2 {k}) (+ {x} 1))"


def _maxk(k):
    return f"(- (pow2 {k}) 1)"


KXY = (("k", "width"), ("x", "bv:k"), ("y", "bv:k"))
KX = (("k", "width"), ("x", "bv:k"))
XY1 = (("x", "bv:1"), ("y", "bv:1"))


def _bitwise_full(f, combine):
    rec = (
        f"(+ (ite (> k 1) ({f} (- k 1) (mod x (pow2 (- k 1))) (mod y (pow2 (- k 1)))) 0)"
        f" (* (pow2 (- k 1)) {combine(_hsel('k', '(- k 1)', 'x'), _hsel('k', '(- k 1)', 'y'))}))"
    )
    return _forall(KXY, f"(= ({f} k x y) {rec})")


def _abs_diff(a, b):
    return f"(abs (- {a} {b}))"


def _xor_bit(a, b):
    return f"(ite (= {a} {b}) 0 1)"


# (symbol, mode, name, roles, body-without-guard)
_TABLE = [
    # pow2, full recursion
    ("pow2", "full", "pow2-zero", (), "(= (pow2 0) 1)"),
    ("pow2", "full", "pow2-step", (("k", "width"),), "(= (pow2 k) (* 2 (pow2 (- k 1))))"),
    # pow2, hand-picked properties
    ("pow2", "partial", "base-0", (), "(= (pow2 0) 1)"),
    ("pow2", "partial", "base-1", (), "(= (pow2 1) 2)"),
    ("pow2", "partial", "base-2", (), "(= (pow2 2) 4)"),
    ("pow2", "partial", "base-3", (), "(= (pow2 3) 8)"),
    ("pow2", "partial", "weak-monotonicity", (("i", "width"), ("j", "width")),
     "(=> (<= i j) (<= (pow2 i) (pow2 j)))"),
    ("pow2", "partial", "strong-monotonicity", (("i", "width"), ("j", "width")),
     "(=> (< i j) (< (pow2 i) (pow2 j)))"),
    ("pow2", "partial", "modularity", (("i", "width"), ("j", "width"), ("x", "int")),
     "(=> (distinct (mod (* x (pow2 i)) (pow2 j)) 0) (< i j))"),
    ("pow2", "partial", "never-even", (("i", "width"), ("x", "int")),
     "(distinct (- (pow2 i) 1) (* 2 x))"),
    ("pow2", "partial", "always-positive", (("i", "width"),), "(>= (pow2 i) 1)"),
    ("pow2", "partial", "div-0", (("i", "width"),), "(= (div i (pow2 i)) 0)"),
    # intand
    ("intand", "partial", "base-case", XY1, f"(= (intand 1 x y) {_min(_hsel(1, 0, 'x'), _hsel(1, 0, 'y'))})"),
    ("intand", "partial", "max", KX, f"(= (intand k x {_maxk('k')}) x)"),
    ("intand", "partial", "min", KX, "(= (intand k x 0) 0)"),
    ("intand", "partial", "idempotence", KX, "(= (intand k x x) x)"),
    ("intand", "partial", "contradiction", KX, f"(= (intand k x {_not('k', 'x')}) 0)"),
    ("intand", "partial", "symmetry", KXY, "(= (intand k x y) (intand k y x))"),
    ("intand", "partial", "difference", KXY + (("z", "bv:k"),),
     "(=> (distinct x y) (or (distinct (intand k x z) y) (distinct (intand k y z) x)))"),
    ("intand", "partial", "range", KXY, f"(and (<= 0 (intand k x y)) (<= (intand k x y) {_min('x', 'y')}))"),
    # intor: duals of intand
    ("intor", "partial", "base-case", XY1, f"(= (intor 1 x y) {_max(_hsel(1, 0, 'x'), _hsel(1, 0, 'y'))})"),
    ("intor", "partial", "max", KX, f"(= (intor k x {_maxk('k')}) {_maxk('k')})"),
    ("intor", "partial", "min", KX, "(= (intor k x 0) x)"),
    ("intor", "partial", "idempotence", KX, "(= (intor k x x) x)"),
    ("intor", "partial", "contradiction", KX, f"(= (intor k x {_not('k', 'x')}) {_maxk('k')})"),
    ("intor", "partial", "symmetry", KXY, "(= (intor k x y) (intor k y x))"),
    ("intor", "partial", "difference", KXY + (("z", "bv:k"),),
     "(=> (distinct x y) (or (distinct (intor k x z) y) (distinct (intor k y z) x)))"),
    ("intor", "partial", "range", KXY,
     f"(and (<= {_max('x', 'y')} (intor k x y)) (<= (intor k x y) {_maxk('k')}))"),
    # intxor
    ("intxor", "partial", "base-case", XY1, f"(= (intxor 1 x y) {_xor_bit(_hsel(1, 0, 'x'), _hsel(1, 0, 'y'))})"),
    ("intxor", "partial", "zero", KX, "(= (intxor k x x) 0)"),
    ("intxor", "partial", "one", KX, f"(= (intxor k x {_not('k', 'x')}) {_maxk('k')})"),
    ("intxor", "partial", "symmetry", KXY, "(= (intxor k x y) (intxor k y x))"),
    ("intxor", "partial", "range", KXY, f"(and (<= 0 (intxor k x y)) (<= (intxor k x y) {_maxk('k')}))"),
]


@cache
def all_axioms() -> tuple:
    out = []
    for symbol, mode, name, roles, body in _TABLE:
        text = _forall(roles, body) if roles else body
        out.append(Axiom(name, symbol, mode, parse_int_formula(text), roles))
    for symbol, combine in (("intand", _min), ("intor", _max), ("intxor", _abs_diff)):
        text = _bitwise_full(symbol, combine)
        out.append(Axiom("recursion", symbol, "full", parse_int_formula(text), KXY))
    return tuple(out)


def axioms_for(mode: str, symbols=("pow2", "intand", "intor", "intxor")) -> list:
    """The axiom list of ``mode`` restricted to ``symbols``.

    ``combined`` is the union of ``full`` and ``partial`` (duplicates by
    formula removed); ``qf`` keeps only the ground pow2 base cases."""
    if mode not in MODES:
        raise ValueError(f"unknown axiomatization mode {mode!r}")
    chosen = []
    for ax in all_axioms():
        if ax.symbol not in symbols:
            continue
        if mode == "qf":
            keep = ax.mode == "partial" and ax.symbol == "pow2" and not ax.quantified
        elif mode == "combined":
            keep = True
        else:
            keep = ax.mode == mode
        if keep:
            chosen.append(ax)
    seen = set()
    unique = []
    for ax in chosen:
        if ax.formula not in seen:
            seen.add(ax.formula)
            unique.append(ax)
    return unique
