"""Proof obligations for the three case studies.

* invertibility conditions: for a literal ``l[x]`` with a single occurrence of
  ``x``, a condition ``phi_c`` over ``s`` and ``t`` with
  ``phi_c <=> exists x. l[x]``, optionally with a conditional inverse term;
* lifting of fixed-width problems to a fresh symbolic width ``k``;
* rewrite pairs, proved in rounds where earlier results become axioms.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from pathlib import Path

from .ast import (
    SYMCONST,
    TRUE,
    And,
    BvApp,
    BvConst,
    BvPred,
    BvVar,
    Implies,
    IntApp,
    IntConst,
    IntVar,
    Quant,
    Sym,
    WidthMap,
    bv_free_vars,
    bv_symbols,
    conj,
    walk,
)
from .ast import (
    children as _children,
)
from .oracle import CheckReport, eval_bv_formula, instantiate
from .sortcheck import annotate
from .syntax import (
    Atom,
    ParseError,
    SList,
    TermReader,
    _head,
    pretty,
    pretty_pbv,
    read_all,
    substitute_bv,
)
from .translate import convert, make_chi, range_guard

# --------------------------------------------------------------------------
# The grid of literal shapes

# (operator, position of x); commutative operators appear once.
SHAPES = (
    ("bvneg", 0),
    ("bvnot", 0),
    ("bvand", 0),
    ("bvor", 0),
    ("bvshl", 0),
    ("bvshl", 1),
    ("bvlshr", 0),
    ("bvlshr", 1),
    ("bvashr", 0),
    ("bvashr", 1),
    ("bvadd", 0),
    ("bvmul", 0),
    ("bvudiv", 0),
    ("bvudiv", 1),
    ("bvurem", 0),
    ("bvurem", 1),
)
IC_RELATIONS = ("=", "distinct", "bvult", "bvugt", "bvule", "bvuge", "bvslt", "bvsgt", "bvsle", "bvsge")
REL_TAGS = {
    "=": "eq", "distinct": "ne", "bvult": "ult", "bvugt": "ugt", "bvule": "ule", "bvuge": "uge",
    "bvslt": "slt", "bvsgt": "sgt", "bvsle": "sle", "bvsge": "sge",
}
UNARY = ("bvneg", "bvnot")
COMMUTATIVE = ("bvand", "bvor", "bvadd", "bvmul")

WIDTH = "k"
X = Sym("x")
S = Sym("s")
T = Sym("t")

# Width-dependent constants: name -> value as an integer term over k.
CONSTANT_VALUES = {
    "zero": IntConst(0),
    "one": IntConst(1),
    "ones": IntApp("-", (IntApp("pow2", (IntVar(WIDTH),)), IntConst(1))),
    "mins": IntApp("pow2", (IntApp("-", (IntVar(WIDTH), IntConst(1))),)),
    "maxs": IntApp("-", (IntApp("pow2", (IntApp("-", (IntVar(WIDTH), IntConst(1))),)), IntConst(1))),
    "width": IntVar(WIDTH),
}
CONSTANTS = {name: Sym(name, SYMCONST) for name in CONSTANT_VALUES}


def constant_value(name: str, k: int) -> int:
    return {"zero": 0, "one": 1, "ones": (1 << k) - 1, "mins": 1 << (k - 1),
            "maxs": (1 << (k - 1)) - 1, "width": k}[name]


def ic_omega(symbols=None) -> WidthMap:
    """Width map of the IC problems: x, s, t and the constants at width k."""
    k = IntVar(WIDTH)
    widths = {X: k, S: k, T: k}
    widths.update({c: k for c in CONSTANTS.values()})
    if symbols is not None:
        widths = {s: w for s, w in widths.items() if s in symbols}
    values = {c: CONSTANT_VALUES[c.name] for c in CONSTANTS.values() if c in widths}
    return WidthMap.build(widths, values, (WIDTH,))


def _restrict(phi, extra=()) -> WidthMap:
    return ic_omega(set(bv_symbols(phi)) | set(extra))


# --------------------------------------------------------------------------
# Entries


@dataclass(frozen=True)
class ICEntry:
    """One literal shape with its condition and optional conditional inverse.

    ``cond`` is a formula over s, t and the named constants.  ``None`` stands
    for the defining condition ``exists x. l[x]`` itself, used where no
    width-independent closed form is available.
    """

    op: str
    pos: int
    rel: str
    cond: object = None
    inverse: object = None
    source: str = ""

    def __post_init__(self):
        if (self.op, self.pos) not in SHAPES:
            raise ValueError(f"unsupported literal shape ({self.op} {self.pos})")
        if self.rel not in IC_RELATIONS:
            raise ValueError(f"unsupported relation {self.rel}")
        for part in (self.cond, self.inverse):
            if part is not None and X in bv_symbols(part):
                raise ValueError(f"{self.id}: conditions and inverses may not mention x")

    @property
    def shape(self) -> tuple:
        return (self.op, self.pos, self.rel)

    @property
    def id(self) -> str:
        where = "x" if self.op in UNARY else ("xs" if self.pos == 0 else "sx")
        return f"{self.op}_{where}_{REL_TAGS[self.rel]}"

    @property
    def trivial(self) -> bool:
        return self.cond == TRUE

    @property
    def exact(self) -> bool:
        return self.cond is None

    def lhs(self, x=X):
        if self.op in UNARY:
            return BvApp(self.op, (x,))
        args = (x, S) if self.pos == 0 else (S, x)
        return BvApp(self.op, args)

    def literal(self, x=X):
        return BvPred(self.rel, self.lhs(x), T)

    def condition(self):
        """The condition as a formula; the exact one is quantified over x."""
        if self.cond is None:
            return Quant("exists", (X,), self.literal())
        return self.cond

    def with_inverse(self, inverse) -> ICEntry:
        return ICEntry(self.op, self.pos, self.rel, self.cond, inverse, self.source)


def grid_slots() -> list:
    return [(op, pos, rel) for op, pos in SHAPES for rel in IC_RELATIONS]


_SYMBOLS = {"s": S, "t": T, **CONSTANTS}


def _bv(text: str):
    return TermReader(_SYMBOLS).bv_term(read_all(text)[0])


def _formula(text: str):
    return TermReader(_SYMBOLS).formula(read_all(text)[0], "bv")


# Conditional inverses, keyed by (op, pos, relation).  Blank cells of the
# published tables are simply absent.
_INVERSES = {
    # = and distinct
    ("bvneg", 0, "="): "(bvneg t)", ("bvneg", 0, "distinct"): "(bvnot t)",
    ("bvnot", 0, "="): "(bvnot t)", ("bvnot", 0, "distinct"): "t",
    ("bvadd", 0, "="): "(bvsub t s)", ("bvadd", 0, "distinct"): "(bvnot (bvadd s t))",
    ("bvand", 0, "="): "t", ("bvand", 0, "distinct"): "(bvnot t)",
    ("bvashr", 0, "distinct"): "(bvnot t)",
    ("bvashr", 1, "distinct"): "(bvlshr t (bvsub s t))",
    ("bvlshr", 0, "="): "(bvshl t s)", ("bvlshr", 0, "distinct"): "(bvshl mins t)",
    ("bvlshr", 1, "distinct"): "(bvneg t)",
    ("bvmul", 0, "distinct"): "(bvshl maxs t)",
    ("bvor", 0, "="): "t", ("bvor", 0, "distinct"): "(bvnot t)",
    ("bvshl", 0, "="): "(bvlshr t s)", ("bvshl", 0, "distinct"): "(bvshl maxs t)",
    ("bvshl", 1, "distinct"): "t",
    ("bvudiv", 0, "="): "(bvmul s t)", ("bvudiv", 0, "distinct"): "(bvlshr s t)",
    ("bvudiv", 1, "distinct"): "(bvand t mins)",
    ("bvurem", 0, "="): "t", ("bvurem", 0, "distinct"): "(bvneg (bvnot t))",
    ("bvurem", 1, "="): "(bvsub s t)", ("bvurem", 1, "distinct"): "t",
    # signed less-than / at-most
    ("bvneg", 0, "bvslt"): "mins", ("bvneg", 0, "bvsle"): "mins",
    ("bvnot", 0, "bvslt"): "maxs", ("bvnot", 0, "bvsle"): "maxs",
    ("bvadd", 0, "bvslt"): "(bvsub mins s)", ("bvadd", 0, "bvsle"): "(bvsub t s)",
    ("bvand", 0, "bvslt"): "mins", ("bvand", 0, "bvsle"): "t",
    ("bvashr", 0, "bvslt"): "mins", ("bvashr", 0, "bvsle"): "mins",
    ("bvashr", 1, "bvslt"): "(bvnot (bvor s maxs))", ("bvashr", 1, "bvsle"): "(bvnot (bvor s maxs))",
    ("bvlshr", 0, "bvslt"): "(bvshl mins s)", ("bvlshr", 0, "bvsle"): "t",
    ("bvlshr", 1, "bvslt"): "(bvnot (bvor s maxs))", ("bvlshr", 1, "bvsle"): "(bvnot (bvor s maxs))",
    ("bvor", 0, "bvslt"): "mins", ("bvor", 0, "bvsle"): "mins",
    ("bvshl", 0, "bvslt"): "(bvlshr mins s)", ("bvshl", 0, "bvsle"): "(bvlshr t s)",
    ("bvudiv", 0, "bvslt"): "(bvnot (bvneg t))", ("bvudiv", 0, "bvsle"): "t",
    ("bvurem", 0, "bvslt"): "(bvnot (bvor maxs (bvneg s)))", ("bvurem", 0, "bvsle"): "(bvand t mins)",
    ("bvurem", 1, "bvslt"): "t", ("bvurem", 1, "bvsle"): "(bvsub s t)",
    # signed greater-than / at-least
    ("bvneg", 0, "bvsgt"): "(bvnot t)", ("bvneg", 0, "bvsge"): "(bvneg t)",
    ("bvnot", 0, "bvsgt"): "mins", ("bvnot", 0, "bvsge"): "mins",
    ("bvadd", 0, "bvsgt"): "(bvsub maxs s)", ("bvadd", 0, "bvsge"): "(bvsub t s)",
    ("bvand", 0, "bvsgt"): "maxs", ("bvand", 0, "bvsge"): "maxs",
    ("bvashr", 0, "bvsgt"): "maxs", ("bvashr", 0, "bvsge"): "maxs",
    ("bvashr", 1, "bvsgt"): "(bvand s mins)", ("bvashr", 1, "bvsge"): "(bvand s mins)",
    ("bvlshr", 0, "bvsgt"): "(bvshl maxs s)", ("bvlshr", 0, "bvsge"): "(bvshl t s)",
    ("bvor", 0, "bvsgt"): "maxs", ("bvor", 0, "bvsge"): "t",
    ("bvshl", 0, "bvsgt"): "(bvlshr maxs s)", ("bvshl", 0, "bvsge"): "(bvlshr maxs s)",
    ("bvurem", 0, "bvsgt"): "(bvneg (bvnot t))", ("bvurem", 0, "bvsge"): "t",
    ("bvurem", 1, "bvsgt"): "(bvsub (bvor s mins) (bvand maxs (bvsub t maxs)))",
    ("bvurem", 1, "bvsge"): "(bvsub (bvor s mins) (bvand t maxs))",
    # unsigned less-than / at-most
    ("bvneg", 0, "bvult"): "zero", ("bvneg", 0, "bvule"): "zero",
    ("bvnot", 0, "bvult"): "(bvneg t)", ("bvnot", 0, "bvule"): "(bvnot t)",
    ("bvadd", 0, "bvult"): "(bvneg s)", ("bvadd", 0, "bvule"): "(bvneg s)",
    ("bvand", 0, "bvult"): "zero", ("bvand", 0, "bvule"): "t",
    ("bvashr", 0, "bvult"): "zero", ("bvashr", 0, "bvule"): "zero",
    ("bvashr", 1, "bvult"): "(bvnot (bvor s maxs))", ("bvashr", 1, "bvule"): "(bvnot (bvor s maxs))",
    ("bvlshr", 0, "bvult"): "s", ("bvlshr", 0, "bvule"): "s",
    ("bvlshr", 1, "bvult"): "s", ("bvlshr", 1, "bvule"): "s",
    ("bvmul", 0, "bvult"): "zero", ("bvmul", 0, "bvule"): "zero",
    ("bvor", 0, "bvult"): "s", ("bvor", 0, "bvule"): "s",
    ("bvshl", 0, "bvult"): "zero", ("bvshl", 0, "bvule"): "zero",
    ("bvshl", 1, "bvult"): "mins", ("bvshl", 1, "bvule"): "mins",
    ("bvudiv", 0, "bvult"): "zero", ("bvudiv", 0, "bvule"): "t",
    ("bvudiv", 1, "bvult"): "(bvnot zero)", ("bvudiv", 1, "bvule"): "(bvnot zero)",
    ("bvurem", 0, "bvult"): "s", ("bvurem", 0, "bvule"): "s",
    ("bvurem", 1, "bvult"): "s", ("bvurem", 1, "bvule"): "s",
    # unsigned greater-than / at-least
    ("bvneg", 0, "bvugt"): "(bvnot t)", ("bvneg", 0, "bvuge"): "(bvneg t)",
    ("bvnot", 0, "bvugt"): "zero", ("bvnot", 0, "bvuge"): "zero",
    ("bvadd", 0, "bvugt"): "(bvnot s)", ("bvadd", 0, "bvuge"): "(bvnot s)",
    ("bvand", 0, "bvugt"): "s", ("bvand", 0, "bvuge"): "s",
    ("bvashr", 0, "bvugt"): "(bvnot zero)", ("bvashr", 0, "bvuge"): "(bvnot zero)",
    ("bvashr", 1, "bvugt"): "(bvand s mins)", ("bvashr", 1, "bvuge"): "(bvand s mins)",
    ("bvlshr", 0, "bvugt"): "(bvnot s)", ("bvlshr", 0, "bvuge"): "(bvnot s)",
    ("bvlshr", 1, "bvugt"): "zero", ("bvlshr", 1, "bvuge"): "zero",
    ("bvor", 0, "bvugt"): "(bvnot s)", ("bvor", 0, "bvuge"): "t",
    ("bvshl", 0, "bvugt"): "(bvnot zero)", ("bvshl", 0, "bvuge"): "(bvnot zero)",
    ("bvudiv", 0, "bvugt"): "(bvnot zero)",
    ("bvudiv", 1, "bvugt"): "zero", ("bvudiv", 1, "bvuge"): "zero",
    ("bvurem", 0, "bvugt"): "(bvnot (bvneg s))", ("bvurem", 0, "bvuge"): "t",
    ("bvurem", 1, "bvugt"): "zero", ("bvurem", 1, "bvuge"): "zero",
}

# Invertibility conditions with a width-independent closed form.  Every one
# is checked against the defining condition by the test suite.
_CONDITIONS = {
    ("bvand", 0, "="): "(= (bvand t s) t)",
    ("bvand", 0, "distinct"): "(or (distinct t zero) (distinct s zero))",
    ("bvor", 0, "="): "(= (bvor t s) t)",
    ("bvor", 0, "distinct"): "(or (distinct t ones) (distinct s ones))",
    ("bvor", 0, "bvule"): "(bvuge t s)",
    ("bvor", 0, "bvult"): "(bvult s t)",
    ("bvand", 0, "bvuge"): "(bvuge s t)",
    ("bvand", 0, "bvugt"): "(bvult t s)",
    ("bvand", 0, "bvult"): "(distinct t zero)",
    ("bvor", 0, "bvugt"): "(distinct t ones)",
    ("bvmul", 0, "="): "(= (bvand (bvor (bvneg s) s) t) t)",
    ("bvmul", 0, "distinct"): "(or (distinct s zero) (distinct t zero))",
    ("bvmul", 0, "bvult"): "(distinct t zero)",
    ("bvmul", 0, "bvugt"): "(bvult t (bvor (bvneg s) s))",
    ("bvshl", 0, "="): "(= (bvshl (bvlshr t s) s) t)",
    ("bvshl", 0, "bvult"): "(distinct t zero)",
    ("bvlshr", 0, "="): "(= (bvlshr (bvshl t s) s) t)",
    ("bvlshr", 0, "bvult"): "(distinct t zero)",
    ("bvlshr", 0, "bvugt"): "(bvult t (bvlshr ones s))",
    ("bvshl", 0, "bvugt"): "(bvult t (bvshl ones s))",
    ("bvlshr", 1, "bvult"): "(distinct t zero)",
    ("bvlshr", 1, "bvugt"): "(bvult t s)",
    ("bvlshr", 1, "distinct"): "(or (distinct s zero) (distinct t zero))",
    ("bvshl", 1, "bvult"): "(distinct t zero)",
    ("bvshl", 1, "distinct"): "(or (distinct s zero) (distinct t zero))",
    ("bvashr", 0, "bvult"): "(distinct t zero)",
    ("bvneg", 0, "bvult"): "(distinct t zero)",
    ("bvnot", 0, "bvult"): "(distinct t zero)",
    ("bvneg", 0, "bvugt"): "(distinct t ones)",
    ("bvnot", 0, "bvugt"): "(distinct t ones)",
    ("bvadd", 0, "bvult"): "(distinct t zero)",
    ("bvadd", 0, "bvugt"): "(distinct t ones)",
    ("bvudiv", 0, "="): "(= (bvudiv (bvmul s t) s) t)",
    ("bvudiv", 0, "distinct"): "(or (distinct s zero) (distinct t ones))",
    ("bvudiv", 0, "bvult"): "(and (distinct s zero) (distinct t zero))",
    ("bvudiv", 1, "="): "(= (bvudiv s (bvudiv s t)) t)",
    ("bvudiv", 1, "bvugt"): "(bvult t ones)",
    ("bvurem", 0, "="): "(bvuge (bvnot (bvneg s)) t)",
    ("bvurem", 0, "distinct"): "(or (distinct s one) (distinct t zero))",
    ("bvurem", 0, "bvult"): "(distinct t zero)",
    ("bvurem", 0, "bvugt"): "(bvult t (bvnot (bvneg s)))",
    ("bvurem", 1, "="): "(bvuge (bvand (bvsub (bvadd t t) s) s) t)",
    ("bvurem", 1, "distinct"): "(or (distinct s zero) (distinct t zero))",
    ("bvurem", 1, "bvult"): "(distinct t zero)",
    ("bvurem", 1, "bvugt"): "(bvult t s)",
    ("bvneg", 0, "bvslt"): "(distinct t mins)",
    ("bvnot", 0, "bvslt"): "(distinct t mins)",
    ("bvadd", 0, "bvslt"): "(distinct t mins)",
    ("bvneg", 0, "bvsgt"): "(distinct t maxs)",
    ("bvnot", 0, "bvsgt"): "(distinct t maxs)",
    ("bvadd", 0, "bvsgt"): "(distinct t maxs)",
    ("bvudiv", 0, "bvuge"): "(bvuge (bvudiv ones s) t)",
    ("bvmul", 0, "bvuge"): "(bvuge (bvor (bvneg s) s) t)",
    ("bvlshr", 1, "bvsgt"): "(or (bvslt t s) (bvslt t (bvlshr s one)))",
    ("bvlshr", 1, "bvsge"): "(or (bvsge s t) (bvsge (bvlshr s one) t))",
    ("bvashr", 0, "="): "(or (= (bvashr (bvshl t s) s) t) (and (bvuge s width) (or (= t zero) (= t ones))))",
}


def _entry(shape, cond_text, trivial: bool):
    op, pos, rel = shape
    inverse = _INVERSES.get(shape)
    if trivial:
        cond, source = TRUE, "condition is true"
    elif cond_text is not None:
        cond, source = _formula(cond_text), "closed-form condition"
    else:
        cond, source = None, "defining condition (exists x)"
    return ICEntry(op, pos, rel, cond, _bv(inverse) if inverse else None, source)


# Shapes whose literal is solvable for every s and t.  Computed once from
# the definition at widths 1..6 (see ``solvable_everywhere``) and frozen.
TRIVIAL_SHAPES = frozenset({
    ('bvadd', 0, '='),
    ('bvadd', 0, 'bvsge'),
    ('bvadd', 0, 'bvsle'),
    ('bvadd', 0, 'bvuge'),
    ('bvadd', 0, 'bvule'),
    ('bvadd', 0, 'distinct'),
    ('bvand', 0, 'bvule'),
    ('bvashr', 0, 'bvuge'),
    ('bvashr', 0, 'bvule'),
    ('bvashr', 0, 'distinct'),
    ('bvlshr', 0, 'bvule'),
    ('bvlshr', 1, 'bvule'),
    ('bvmul', 0, 'bvule'),
    ('bvneg', 0, '='),
    ('bvneg', 0, 'bvsge'),
    ('bvneg', 0, 'bvsle'),
    ('bvneg', 0, 'bvuge'),
    ('bvneg', 0, 'bvule'),
    ('bvneg', 0, 'distinct'),
    ('bvnot', 0, '='),
    ('bvnot', 0, 'bvsge'),
    ('bvnot', 0, 'bvsle'),
    ('bvnot', 0, 'bvuge'),
    ('bvnot', 0, 'bvule'),
    ('bvnot', 0, 'distinct'),
    ('bvor', 0, 'bvuge'),
    ('bvshl', 0, 'bvule'),
    ('bvshl', 1, 'bvule'),
    ('bvudiv', 1, 'bvuge'),
    ('bvurem', 0, 'bvule'),
    ('bvurem', 1, 'bvule'),
})


def builtin_ic_entries() -> list:
    """One entry per grid slot, in grid order."""
    return [
        _entry(shape, _CONDITIONS.get(shape), shape in TRIVIAL_SHAPES)
        for shape in grid_slots()
    ]


def inverse_cells() -> dict:
    """The non-blank conditional-inverse cells as parsed terms."""
    return {shape: _bv(text) for shape, text in _INVERSES.items()}


# --------------------------------------------------------------------------
# Concrete evaluation of entries


class _Instances:
    """Instantiated condition/literal formulas per width, cached."""

    def __init__(self):
        self._cache: dict = {}

    def get(self, phi, k: int):
        key = (phi, k)
        if key not in self._cache:
            self._cache[key] = instantiate(phi, _restrict(phi), {WIDTH: k})
        return self._cache[key]


def _holds(inst, s: int, t: int, x: int | None = None) -> bool:
    env = {"s": s, "t": t}
    if x is not None:
        env["x"] = x
    return eval_bv_formula(inst, env)


def solvable_everywhere(shape, k_max: int = 6) -> bool:
    """Whether ``exists x. l[x]`` holds for all s, t at widths 1..k_max."""
    entry = ICEntry(*shape)
    cache = _Instances()
    for k in range(1, k_max + 1):
        inst = cache.get(entry.condition(), k)
        for s in range(1 << k):
            for t in range(1 << k):
                if not _holds(inst, s, t):
                    return False
    return True


def check_condition(entry: ICEntry, width_bound: int = 4) -> CheckReport:
    """Exhaustively compare the entry's condition with ``exists x. l[x]``."""
    report = CheckReport(f"condition[{entry.id}]", caps={"width_bound": width_bound})
    exact = ICEntry(entry.op, entry.pos, entry.rel).condition()
    cache = _Instances()
    for k in range(1, width_bound + 1):
        mine, ref = cache.get(entry.condition(), k), cache.get(exact, k)
        for s in range(1 << k):
            for t in range(1 << k):
                report.bump("cases")
                if _holds(mine, s, t) != _holds(ref, s, t):
                    report.fail(k=k, s=s, t=t)
                    return report
    return report


def check_inverse(
    entry: ICEntry,
    width_bound: int = 4,
    samples: int = 0,
    sample_widths=(),
    seed: int = 0,
) -> CheckReport:
    """``phi_c => l[alpha_c]`` for all s, t at widths 1..width_bound.

    With ``samples`` > 0, additionally tries that many random (s, t) pairs at
    each width in ``sample_widths``."""
    if entry.inverse is None:
        raise ValueError(f"{entry.id} has no conditional inverse")
    report = CheckReport(f"inverse[{entry.id}]", caps={"width_bound": width_bound, "samples": samples})
    goal = Implies(entry.condition(), entry.literal(entry.inverse))
    cache = _Instances()

    def run(k, pairs):
        inst = cache.get(goal, k)
        for s, t in pairs:
            report.bump("cases")
            if not _holds(inst, s, t):
                report.fail(k=k, s=s, t=t)
                return False
        return True

    for k in range(1, width_bound + 1):
        if not run(k, itertools.product(range(1 << k), repeat=2)):
            return report
    rng = random.Random(seed)
    for k in sample_widths:
        pairs = [(rng.randrange(1 << k), rng.randrange(1 << k)) for _ in range(samples)]
        if not run(k, pairs):
            return report
    return report


# --------------------------------------------------------------------------
# Goals


@dataclass(frozen=True)
class Goal:
    id: str
    kind: str
    formula: object
    omega: WidthMap
    expected: str = "unknown"
    provenance: str = ""
    axioms: tuple = ()  # extra integer axioms for the prelude

    def to_pbv(self) -> str:
        return pretty_pbv(self.formula, self.omega)


GOAL_KINDS = ("ic-rtl'", "ic-ltr", "ic-ltr'", "lifted-equiv", "rewrite-pair")


def gen_ic_goals(entries, always_ltr: bool = False) -> list:
    """rtl', ltr' and ltr obligations as validity goals over width k.

    rtl' (``l[x] and not phi_c`` unsatisfiable) is stated as ``l[x] => phi_c``.
    ltr' is ``phi_c => l[alpha_c]``; the quantified ltr form
    ``phi_c => exists x. l[x]`` is generated when no inverse is known (or
    always, with ``always_ltr``).  Entries whose condition is the defining
    one get no rtl' or ltr goal, since both would hold by definition; their
    ltr' goal is ``l[x] => l[alpha_c]`` with x free, which is the
    quantifier-free form of ``(exists x. l[x]) => l[alpha_c]``.
    """
    goals = []
    for e in entries:
        lit = e.literal()
        if not e.exact:
            formula = Implies(lit, e.cond)
            goals.append(Goal(
                f"{e.id}.rtl", "ic-rtl'", formula, _restrict(formula),
                "valid" if e.trivial else "unknown", f"{e.source}; l[x] and not phi_c is unsat",
            ))
        if e.inverse is not None:
            hyp = lit if e.exact else e.cond
            formula = Implies(hyp, e.literal(e.inverse))
            goals.append(Goal(
                f"{e.id}.ltr-inv", "ic-ltr'", formula, _restrict(formula),
                "unknown", f"conditional inverse {pretty(e.inverse)}",
            ))
        if not e.exact and (e.inverse is None or always_ltr):
            formula = Implies(e.cond, Quant("exists", (X,), lit))
            goals.append(Goal(
                f"{e.id}.ltr", "ic-ltr", formula, _restrict(formula, (X,)),
                "unknown", "phi_c implies a solution exists",
            ))
    return goals


def coverage(entries) -> dict:
    """How the entries cover the 16 x 10 grid of literal shapes."""
    slots = grid_slots()
    seen: dict = {}
    for e in entries:
        seen[e.shape] = seen.get(e.shape, 0) + 1
    return {
        "slots": len(slots),
        "covered": sum(1 for s in slots if s in seen),
        "missing": [ICEntry(*s).id for s in slots if s not in seen],
        "duplicates": [ICEntry(*s).id for s, n in seen.items() if n > 1],
        "with_inverse": sum(1 for e in entries if e.inverse is not None),
        "trivial": sum(1 for e in entries if e.trivial),
        "exact": sum(1 for e in entries if e.exact),
        "without_goals": [e.id for e in entries if e.exact and e.inverse is None],
    }


# --------------------------------------------------------------------------
# The .ic format


def parse_ic_table(text: str) -> list:
    """Read ``(ic (literal (<op> <pos>) <rel>) (cond ...) (inverse ...))`` items."""
    reader = TermReader(_SYMBOLS)
    entries = []
    for item in read_all(text):
        if _head(item) != "ic" or len(item) != 4:
            raise ParseError("expected (ic (literal ...) (cond ...) (inverse ...))", item.pos)
        lit, cond, inv = item[1], item[2], item[3]
        if _head(lit) != "literal" or len(lit) != 3 or not isinstance(lit[1], SList) or len(lit[1]) != 2:
            raise ParseError("expected (literal (<op> <pos>) <rel>)", getattr(lit, "pos", None))
        op_atom, pos_atom = lit[1]
        if not isinstance(op_atom, Atom) or not isinstance(pos_atom, Atom) or not pos_atom.text.isdigit():
            raise ParseError("literal shape is (<op> <pos>)", lit.pos)
        if not isinstance(lit[2], Atom):
            raise ParseError("relation must be a name", lit.pos)
        op, pos, rel = op_atom.text, int(pos_atom.text), lit[2].text
        if (op, pos) not in SHAPES:
            raise ParseError(f"unsupported literal shape ({op} {pos})", lit.pos)
        if rel not in IC_RELATIONS:
            raise ParseError(f"unsupported relation {rel!r}", lit.pos)
        if _head(cond) != "cond" or len(cond) != 2:
            raise ParseError("expected (cond <formula>)", getattr(cond, "pos", None))
        if _head(inv) != "inverse" or len(inv) != 2:
            raise ParseError("expected (inverse <term>)", getattr(inv, "pos", None))
        if isinstance(cond[1], Atom) and cond[1].text == "exact":
            phi = None
        else:
            phi = reader.formula(cond[1], "bv")
        if isinstance(inv[1], Atom) and inv[1].text == "none":
            alpha = None
        else:
            alpha = reader.bv_term(inv[1])
        try:
            entries.append(ICEntry(op, pos, rel, phi, alpha, "table"))
        except ValueError as exc:
            raise ParseError(str(exc), item.pos) from None
    return entries


def load_ic_table(path) -> list:
    return parse_ic_table(Path(path).read_text())


def format_ic_table(entries) -> str:
    lines = []
    for e in entries:
        cond = "exact" if e.cond is None else pretty(e.cond)
        inv = "none" if e.inverse is None else pretty(e.inverse)
        lines.append(f"(ic (literal ({e.op} {e.pos}) {e.rel}) (cond {cond}) (inverse {inv}))")
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------
# Lifting fixed-width problems


class LiftError(Exception):
    pass


LIFT_CONSTANT_ORDER = ("zero", "one", "ones", "mins", "maxs", "width")


@dataclass(frozen=True)
class FixedProblem:
    formula: object
    width: int
    variables: tuple  # BvVar leaves in declaration order


def read_qfbv(text: str) -> FixedProblem:
    """Read a fixed-width SMT-LIB problem (declarations and asserts)."""
    symbols: dict = {}
    asserts = []
    for cmd in read_all(text):
        h = _head(cmd)
        if h in ("set-logic", "set-info", "set-option", "check-sat", "exit", "get-model"):
            continue
        if h in ("declare-fun", "declare-const"):
            name = cmd[1].text
            sort = cmd[-1]
            if h == "declare-fun" and not (isinstance(cmd[2], SList) and len(cmd[2]) == 0):
                raise LiftError(f"{name}: only constants are supported")
            if not (
                isinstance(sort, SList) and len(sort) == 3 and _head(sort) == "_"
                and sort[1].text == "BitVec" and sort[2].text.isdigit()
            ):
                raise LiftError(f"{name}: only bit-vector sorts are supported")
            symbols[name] = BvVar(name, int(sort[2].text))
        elif h == "assert":
            try:
                asserts.append(TermReader(symbols).formula(cmd[1], "bv"))
            except ParseError as exc:
                raise LiftError(str(exc)) from None
        else:
            raise LiftError(f"unsupported command {h!r}")
    if not asserts:
        raise LiftError("no assertions")
    phi = asserts[0] if len(asserts) == 1 else And(tuple(asserts))
    try:
        widths = annotate(phi, WidthMap())
    except Exception as exc:  # sort errors of the concrete problem
        raise LiftError(f"ill-sorted input: {exc}") from None
    sizes = set()
    for w in widths.values():
        sizes.add(w.value)
    return FixedProblem(phi, max(sizes) if sizes else 0, tuple(symbols.values()))


def lift_qfbv(text: str, width_one_as_bool: bool = False):
    """Abstract a single-width problem to symbolic width ``k``.

    Returns ``(formula, width_map)``.  Constants are recognised as 0, 1,
    all-ones, signed min, signed max and the width itself; any other constant
    of the lifted width is rejected.  With ``width_one_as_bool`` width-1
    subterms (flags) are kept at their concrete width."""
    problem = read_qfbv(text)
    n = problem.width
    widths = annotate(problem.formula, WidthMap())
    used = {w.value for w in widths.values()}
    other = used - {n}
    if other and not (width_one_as_bool and other == {1}):
        raise LiftError(f"several bit-widths used: {sorted(used)}")
    for node in walk(problem.formula):
        if isinstance(node, BvApp) and node.op in ("concat", "extract"):
            raise LiftError(f"{node.op} mixes bit-widths")

    names = {v.name for v in problem.variables}
    width_var = WIDTH
    while width_var in names:
        width_var += "_"
    k = IntVar(width_var)
    values = {
        "zero": IntConst(0),
        "one": IntConst(1),
        "ones": IntApp("-", (IntApp("pow2", (k,)), IntConst(1))),
        "mins": IntApp("pow2", (IntApp("-", (k, IntConst(1))),)),
        "maxs": IntApp("-", (IntApp("pow2", (IntApp("-", (k, IntConst(1))),)), IntConst(1))),
        "width": k,
    }
    mapping: dict = {}
    new_widths: dict = {}
    new_values: dict = {}
    taken = set(names)

    def const_sym(name, value, width_term):
        sym_name = name
        while sym_name in taken:
            sym_name += "_"
        sym = Sym(sym_name, SYMCONST)
        taken.add(sym_name)
        new_widths[sym] = width_term
        new_values[sym] = value
        return sym

    for v in problem.variables:
        if v.width == n and not (n == 1 and width_one_as_bool):
            sym = Sym(v.name)
            new_widths[sym] = k
        elif width_one_as_bool and v.width == 1:
            sym = Sym(v.name)
            new_widths[sym] = IntConst(1)
        else:
            raise LiftError(f"{v.name} has width {v.width}")
        mapping[v] = sym
    for node in walk(problem.formula):
        if isinstance(node, BvConst) and node not in mapping:
            if node.width == n and not (n == 1 and width_one_as_bool):
                for name in LIFT_CONSTANT_ORDER:
                    if constant_value(name, n) == node.value:
                        mapping[node] = const_sym(f"c_{name}", values[name], k)
                        break
                else:
                    raise LiftError(f"constant {node.value} of width {n} is not width-independent")
            else:
                mapping[node] = const_sym(f"c_{node.value}_1", IntConst(node.value), IntConst(1))
    phi = substitute_bv(problem.formula, mapping)
    used_syms = [s for s in new_widths if s in set(bv_symbols(phi))]
    omega = WidthMap.build(
        {s: new_widths[s] for s in used_syms},
        {s: new_values[s] for s in used_syms if s in new_values},
        (width_var,),
    )
    return phi, omega


# --------------------------------------------------------------------------
# Rewrite pairs


def rewrite_goal(index: int, lhs, rhs, omega: WidthMap, axioms=()) -> Goal:
    formula = BvPred("=", lhs, rhs)
    return Goal(f"rewrite-{index}", "rewrite-pair", formula, omega, "unknown",
                f"rewrite {pretty(lhs)} -> {pretty(rhs)}", tuple(axioms))


def rewrite_axiom(lhs, rhs, omega: WidthMap):
    """``lhs = rhs`` as an integer axiom, universally closed over its
    variables with range guards."""
    phi = BvPred("=", lhs, rhs)
    chi = make_chi(phi, omega)
    body = convert(phi, omega, chi)
    free = bv_free_vars(phi)
    if not free:
        return body
    guard = conj(*(range_guard(chi[v], omega.width(v)) for v in free))
    return Quant("forall", tuple(chi[v] for v in free), Implies(guard, body))


def rewrite_fixpoint(pairs, prover, omega: WidthMap, max_rounds: int | None = None):
    """Prove rewrite pairs in rounds, feeding proved ones back as axioms.

    ``prover`` maps a :class:`Goal` to ``"proved"`` (anything else counts as
    unproved; exceptions too).  Returns ``(proved pairs, rounds)`` where the
    final, unproductive round is counted."""
    pairs = list(pairs)
    proved: list = []
    axioms: list = []
    remaining = list(range(len(pairs)))
    rounds = 0
    while True:
        rounds += 1
        fresh = []
        for i in remaining:
            lhs, rhs = pairs[i]
            goal = rewrite_goal(i, lhs, rhs, omega, axioms)
            try:
                verdict = prover(goal)
            except Exception:
                verdict = "error"
            if verdict == "proved" or verdict is True:
                fresh.append(i)
        if not fresh:
            break
        for i in fresh:
            proved.append(pairs[i])
            axioms.append(rewrite_axiom(*pairs[i], omega))
        remaining = [i for i in remaining if i not in fresh]
        if not remaining or (max_rounds is not None and rounds >= max_rounds):
            rounds += 1 if not remaining else 0
            break
    return proved, rounds


def _fixed_free_vars(phi) -> list:
    out: dict = {}

    def go(node, bound):
        match node:
            case BvVar() if node not in bound:
                out.setdefault(node, None)
            case Quant(bound=vs, body=body):
                go(body, bound | set(vs))
            case _:
                for c in _children(node):
                    go(c, bound)

    go(phi, frozenset())
    return list(out)


def check_lift_roundtrip(text: str, width_one_as_bool: bool = False, bit_budget: int = 12) -> CheckReport:
    """Lift, instantiate at the source width and compare with the source on
    every assignment of its free variables."""
    problem = read_qfbv(text)
    phi, omega = lift_qfbv(text, width_one_as_bool)
    report = CheckReport("lift-roundtrip", caps={"bit_budget": bit_budget, "width": problem.width})
    back = instantiate(phi, omega, {omega.width_vars[0]: problem.width})
    free = _fixed_free_vars(problem.formula)
    if sum(v.width for v in free) > bit_budget:
        report.skipped.append({"bits": sum(v.width for v in free)})
        return report
    for values in itertools.product(*(range(1 << v.width) for v in free)):
        env = {v.name: x for v, x in zip(free, values)}
        report.bump("assignments")
        if eval_bv_formula(problem.formula, env) != eval_bv_formula(back, env):
            report.fail(**env)
            return report
    return report
