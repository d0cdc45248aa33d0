"""Immutable syntax trees for parametric bit-vector and integer formulas.

Both term languages share the Boolean layer (connectives, quantifiers and
truth constants).  Bit-vector atoms are :class:`BvPred`; integer atoms are
:class:`IntCmp`.  Every node is a frozen dataclass, so structural equality and
hashing come for free and trees can be shared between threads.
"""

from __future__ import annotations

from collections.abc import Iterator
from dataclasses import dataclass, field
from typing import Union

VARIABLE = "var"
SYMCONST = "const"

# Table of bit-vector function symbols: name -> arity.
BV_FUNCTIONS = {
    "bvnot": 1,
    "bvneg": 1,
    "bvand": 2,
    "bvor": 2,
    "bvxor": 2,
    "bvshl": 2,
    "bvlshr": 2,
    "bvashr": 2,
    "bvadd": 2,
    "bvsub": 2,
    "bvmul": 2,
    "bvurem": 2,
    "bvudiv": 2,
    "concat": 2,
    "extract": 1,
}

UNSIGNED_RELATIONS = ("bvult", "bvugt", "bvule", "bvuge")
SIGNED_RELATIONS = ("bvslt", "bvsgt", "bvsle", "bvsge")
BV_RELATIONS = ("=", "distinct") + UNSIGNED_RELATIONS + SIGNED_RELATIONS

INT_FUNCTIONS = ("+", "-", "*", "div", "mod", "abs")
INT_RELATIONS = ("=", "distinct", "<", "<=", ">", ">=")

# Uninterpreted symbols of the integer encoding and their arities.
UF_ARITY = {"pow2": 1, "intand": 3, "intor": 3, "intxor": 3}


# --------------------------------------------------------------------------
# Bit-vector terms


@dataclass(frozen=True)
class Sym:
    """A parametric symbol: a variable (X*) or a symbolic constant (Z*)."""

    name: str
    kind: str = VARIABLE

    @property
    def is_var(self) -> bool:
        return self.kind == VARIABLE


@dataclass(frozen=True)
class BvVar:
    """Fixed-width bit-vector variable, produced by instantiation."""

    name: str
    width: int


@dataclass(frozen=True)
class BvConst:
    """Fixed-width bit-vector constant."""

    value: int
    width: int


@dataclass(frozen=True)
class BvApp:
    op: str
    args: tuple
    params: tuple = ()

    def __post_init__(self):
        arity = BV_FUNCTIONS.get(self.op)
        if arity is None:
            raise ValueError(f"unknown bit-vector operator {self.op!r}")
        if len(self.args) != arity:
            raise ValueError(f"{self.op} expects {arity} arguments, got {len(self.args)}")
        if self.op == "extract":
            if len(self.params) != 2:
                raise ValueError("extract needs (upper, lower) bounds")
            upper, lower = self.params
            if not 0 <= lower <= upper:
                raise ValueError(f"extract bounds must satisfy 0 <= l <= u, got ({upper}, {lower})")
        elif self.params:
            raise ValueError(f"{self.op} takes no indices")


BvTerm = Union[Sym, BvVar, BvConst, BvApp]


# --------------------------------------------------------------------------
# Integer terms


@dataclass(frozen=True)
class IntConst:
    value: int


@dataclass(frozen=True)
class IntVar:
    name: str


@dataclass(frozen=True)
class IntApp:
    """Application of an interpreted integer operator or one of the UFs."""

    op: str
    args: tuple

    def __post_init__(self):
        if self.op in UF_ARITY:
            if len(self.args) != UF_ARITY[self.op]:
                raise ValueError(f"{self.op} expects {UF_ARITY[self.op]} arguments")
        elif self.op not in INT_FUNCTIONS:
            raise ValueError(f"unknown integer operator {self.op!r}")
        elif self.op == "abs" and len(self.args) != 1:
            raise ValueError("abs is unary")
        elif self.op in ("div", "mod") and len(self.args) != 2:
            raise ValueError(f"{self.op} is binary")
        elif not self.args:
            raise ValueError(f"{self.op} needs arguments")


@dataclass(frozen=True)
class IntIte:
    cond: Formula
    then: IntTerm
    other: IntTerm


IntTerm = Union[IntConst, IntVar, IntApp, IntIte]


# --------------------------------------------------------------------------
# Formulas


@dataclass(frozen=True)
class BoolConst:
    value: bool


@dataclass(frozen=True)
class BvPred:
    op: str
    lhs: BvTerm
    rhs: BvTerm

    def __post_init__(self):
        if self.op not in BV_RELATIONS:
            raise ValueError(f"unknown bit-vector relation {self.op!r}")


@dataclass(frozen=True)
class IntCmp:
    op: str
    lhs: IntTerm
    rhs: IntTerm

    def __post_init__(self):
        if self.op not in INT_RELATIONS:
            raise ValueError(f"unknown integer relation {self.op!r}")


@dataclass(frozen=True)
class Not:
    arg: Formula


@dataclass(frozen=True)
class And:
    args: tuple


@dataclass(frozen=True)
class Or:
    args: tuple


@dataclass(frozen=True)
class Implies:
    lhs: Formula
    rhs: Formula


@dataclass(frozen=True)
class Iff:
    lhs: Formula
    rhs: Formula


@dataclass(frozen=True)
class Quant:
    """Quantifier.  ``bound`` holds :class:`Sym` (bit-vector side) or ``str``
    integer variable names (integer side)."""

    kind: str  # "forall" | "exists"
    bound: tuple
    body: Formula

    def __post_init__(self):
        if self.kind not in ("forall", "exists"):
            raise ValueError(f"bad quantifier {self.kind!r}")
        if not self.bound:
            raise ValueError("quantifier binds no variables")
        for v in self.bound:
            if isinstance(v, Sym) and not v.is_var:
                raise ValueError(f"cannot quantify symbolic constant {v.name}")


Formula = Union[BoolConst, BvPred, IntCmp, Not, And, Or, Implies, Iff, Quant]

TRUE = BoolConst(True)
FALSE = BoolConst(False)


# --------------------------------------------------------------------------
# Width map


@dataclass(frozen=True)
class WidthMap:
    """The pair (widthOf, valueOf) of a parametric problem.

    ``symbols`` records every declared symbol in declaration order;
    ``width_vars`` the declared integer width variables.
    """

    symbols: tuple = ()
    width_of: tuple = ()
    value_of: tuple = ()
    width_vars: tuple = ()
    _widths: dict = field(default=None, compare=False, hash=False, repr=False)
    _values: dict = field(default=None, compare=False, hash=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "_widths", dict(self.width_of))
        object.__setattr__(self, "_values", dict(self.value_of))

    @classmethod
    def build(cls, widths: dict, values: dict | None = None, width_vars=()) -> WidthMap:
        """Convenience constructor from plain dicts keyed by :class:`Sym`."""
        values = values or {}
        syms = tuple(widths)
        for s in syms:
            if not s.is_var and s not in values:
                raise ValueError(f"symbolic constant {s.name} has no value")
        free = list(width_vars)
        for term in list(widths.values()) + list(values.values()):
            for v in int_free_vars(term):
                if v not in free:
                    free.append(v)
        return cls(
            symbols=syms,
            width_of=tuple(widths.items()),
            value_of=tuple((s, values[s]) for s in syms if s in values),
            width_vars=tuple(free),
        )

    def width(self, sym: Sym) -> IntTerm:
        try:
            return self._widths[sym]
        except KeyError:
            raise KeyError(f"no width recorded for {sym.name}") from None

    def value(self, sym: Sym) -> IntTerm:
        try:
            return self._values[sym]
        except KeyError:
            raise KeyError(f"no value recorded for {sym.name}") from None

    def has(self, sym: Sym) -> bool:
        return sym in self._widths

    def lookup(self, name: str) -> Sym | None:
        for s in self.symbols:
            if s.name == name:
                return s
        return None

    @property
    def free_width_vars(self) -> tuple:
        """fv of all range terms, extended with explicitly declared widths."""
        return self.width_vars

    def extend(self, widths: dict, values: dict | None = None) -> WidthMap:
        merged_w = dict(self.width_of)
        merged_w.update(widths)
        merged_v = dict(self.value_of)
        merged_v.update(values or {})
        return WidthMap.build(merged_w, merged_v, self.width_vars)


# --------------------------------------------------------------------------
# Traversal helpers


def children(e) -> tuple:
    match e:
        case BvApp(args=args) | IntApp(args=args) | And(args=args) | Or(args=args):
            return args
        case BvPred(lhs=l, rhs=r) | IntCmp(lhs=l, rhs=r) | Implies(lhs=l, rhs=r) | Iff(lhs=l, rhs=r):
            return (l, r)
        case Not(arg=a):
            return (a,)
        case Quant(body=b):
            return (b,)
        case IntIte(cond=c, then=t, other=o):
            return (c, t, o)
    return ()


def walk(e) -> Iterator:
    """Pre-order traversal, visiting shared subtrees once per occurrence."""
    stack = [e]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(reversed(children(node)))


def bv_symbols(e) -> list:
    """All :class:`Sym` leaves in first-occurrence order (bound ones included)."""
    seen = {}
    for node in walk(e):
        if isinstance(node, Sym):
            seen.setdefault(node, None)
        elif isinstance(node, Quant):
            for v in node.bound:
                if isinstance(v, Sym):
                    seen.setdefault(v, None)
    return list(seen)


def bv_free_vars(e) -> list:
    """Free parametric variables in first-occurrence order."""
    out: dict = {}

    def go(node, bound):
        match node:
            case Sym() if node.is_var and node not in bound:
                out.setdefault(node, None)
            case Quant(bound=vs, body=body):
                go(body, bound | {v for v in vs if isinstance(v, Sym)})
            case _:
                for c in children(node):
                    go(c, bound)

    go(e, frozenset())
    return list(out)


def int_free_vars(e) -> list:
    out: dict = {}

    def go(node, bound):
        match node:
            case IntVar(name=n) if n not in bound:
                out.setdefault(n, None)
            case Quant(bound=vs, body=body):
                go(body, bound | {v for v in vs if isinstance(v, str)})
            case _:
                for c in children(node):
                    go(c, bound)

    go(e, frozenset())
    return list(out)


def used_ufs(e) -> set:
    return {n.op for n in walk(e) if isinstance(n, IntApp) and n.op in UF_ARITY}


def contains_extract(e) -> bool:
    return any(isinstance(n, BvApp) and n.op == "extract" for n in walk(e))


# --------------------------------------------------------------------------
# Small constructors, used by the translation and the axioms.


def conj(*parts) -> Formula:
    flat = []
    for p in parts:
        if isinstance(p, And):
            flat.extend(p.args)
        elif p == TRUE:
            continue
        else:
            flat.append(p)
    if not flat:
        return TRUE
    if len(flat) == 1:
        return flat[0]
    return And(tuple(flat))


def disj(*parts) -> Formula:
    flat = []
    for p in parts:
        if isinstance(p, Or):
            flat.extend(p.args)
        elif p == FALSE:
            continue
        else:
            flat.append(p)
    if not flat:
        return FALSE
    if len(flat) == 1:
        return flat[0]
    return Or(tuple(flat))


def num(n: int) -> IntConst:
    return IntConst(n)


def ivar(name: str) -> IntVar:
    return IntVar(name)


def pow2(e) -> IntApp:
    return IntApp("pow2", (e,))


def add(*args) -> IntApp:
    return IntApp("+", args)


def sub(a, b) -> IntApp:
    return IntApp("-", (a, b))


def mul(*args) -> IntApp:
    return IntApp("*", args)


def idiv(a, b) -> IntApp:
    return IntApp("div", (a, b))


def imod(a, b) -> IntApp:
    return IntApp("mod", (a, b))


def eq(a, b) -> IntCmp:
    return IntCmp("=", a, b)


def euclid_divmod(a: int, b: int) -> tuple:
    """SMT-LIB integer division: the remainder is always in ``[0, |b|)``."""
    if b == 0:
        raise ZeroDivisionError("integer division by zero")
    q, r = divmod(a, b)
    if r < 0:
        q, r = q + 1, r - b
    return q, r
