"""Symbolic width checking for parametric formulas.

Widths are integer terms.  Two widths are considered equal when their
polynomial normal forms coincide (sums of monomials over width variables,
``pow2`` atoms and opaque subterms).  Positivity is decided syntactically:
after shifting each width variable by its lower bound, a polynomial with
non-negative coefficients and a positive constant is positive.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import count

from .ast import (
    VARIABLE,
    And,
    BoolConst,
    BvApp,
    BvConst,
    BvPred,
    BvVar,
    Iff,
    Implies,
    IntApp,
    IntCmp,
    IntConst,
    IntVar,
    Not,
    Or,
    Quant,
    Sym,
    WidthMap,
    contains_extract,
    walk,
)
from .syntax import pretty


class SortError(Exception):
    """Base class for everything sortcheck rejects."""


class AdmissibilityError(SortError):
    def __init__(self, sym: Sym | None, term, reason: str):
        self.sym = sym
        self.term = term
        who = f" of {sym.name}" if sym is not None else ""
        super().__init__(f"width{who} {pretty(term)} is not provably positive: {reason}")


class WidthMismatch(SortError):
    def __init__(self, where, left, right):
        self.left = left
        self.right = right
        super().__init__(f"width mismatch in {pretty(where)}: {pretty(left)} vs {pretty(right)}")


class UnknownSymbol(SortError):
    pass


class ExtractError(SortError):
    pass


# --------------------------------------------------------------------------
# Polynomial normal form


class Poly:
    """Immutable polynomial with integer coefficients.

    Monomials are sorted tuples of atom keys.  Atoms are ``("v", name)``,
    ``("pow2", Poly)`` or ``("t", text)`` for anything opaque.
    """

    __slots__ = ("_key", "terms")

    def __init__(self, terms: dict):
        self.terms = {m: c for m, c in terms.items() if c != 0}
        self._key = tuple(sorted(self.terms.items(), key=lambda mc: _mono_key(mc[0])))

    @classmethod
    def const(cls, c: int) -> Poly:
        return cls({(): c})

    @classmethod
    def atom(cls, a) -> Poly:
        return cls({(a,): 1})

    def __eq__(self, other):
        return isinstance(other, Poly) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        return f"Poly({pretty(self.to_term())})"

    def __add__(self, other: Poly) -> Poly:
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, 0) + c
        return Poly(out)

    def __neg__(self) -> Poly:
        return Poly({m: -c for m, c in self.terms.items()})

    def __sub__(self, other: Poly) -> Poly:
        return self + (-other)

    def __mul__(self, other: Poly) -> Poly:
        out: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = tuple(sorted(m1 + m2, key=_atom_key))
                out[m] = out.get(m, 0) + c1 * c2
        return Poly(out)

    @property
    def constant(self) -> int:
        return self.terms.get((), 0)

    def is_const(self) -> bool:
        return all(m == () for m in self.terms)

    def atoms(self) -> set:
        return {a for m in self.terms for a in m}

    def substitute(self, atom, replacement: Poly) -> Poly:
        out = Poly({})
        for m, c in self.terms.items():
            part = Poly.const(c)
            for a in m:
                part = part * (replacement if a == atom else Poly.atom(a))
            out = out + part
        return out

    def to_term(self):
        if not self.terms:
            return IntConst(0)
        parts = []
        for m, c in self._key:
            factors = [_atom_term(a) for a in m]
            if not factors:
                parts.append(IntConst(c))
                continue
            if c != 1:
                factors.insert(0, IntConst(c))
            parts.append(factors[0] if len(factors) == 1 else IntApp("*", tuple(factors)))
        # constants go last: a + 3 rather than 3 + a
        parts.sort(key=lambda p: isinstance(p, IntConst))
        return parts[0] if len(parts) == 1 else IntApp("+", tuple(parts))


def _atom_key(a) -> tuple:
    if a[0] == "pow2":
        return ("pow2", repr(a[1]._key))
    return a[:2]


def _mono_key(m) -> tuple:
    return (len(m), tuple(_atom_key(a) for a in m))


def _atom_term(a):
    if a[0] == "v":
        return IntVar(a[1])
    if a[0] == "pow2":
        return IntApp("pow2", (a[1].to_term(),))
    return a[2]


def normalize(term) -> Poly:
    """Polynomial normal form of an integer width term."""
    match term:
        case IntConst(value=v):
            return Poly.const(v)
        case IntVar(name=n):
            return Poly.atom(("v", n))
        case IntApp(op="+", args=args):
            out = Poly({})
            for a in args:
                out = out + normalize(a)
            return out
        case IntApp(op="-", args=(a,)):
            return -normalize(a)
        case IntApp(op="-", args=args):
            out = normalize(args[0])
            for a in args[1:]:
                out = out - normalize(a)
            return out
        case IntApp(op="*", args=args):
            out = Poly.const(1)
            for a in args:
                out = out * normalize(a)
            return out
        case IntApp(op="pow2", args=(a,)):
            arg = normalize(a)
            if arg.is_const() and arg.constant >= 0:
                return Poly.const(1 << arg.constant)
            return Poly.atom(("pow2", arg))
    return Poly.atom(("t", pretty(term), term))


def widths_equal(a, b) -> bool:
    return normalize(a) == normalize(b)


def normal_term(term):
    return normalize(term).to_term()


# --------------------------------------------------------------------------
# Positivity


def _lower_bounds(assumptions) -> dict:
    bounds: dict = {}

    def note(name, lb):
        bounds[name] = max(bounds.get(name, lb), lb)

    for f in assumptions or ():
        parts = f.args if isinstance(f, And) else (f,)
        for p in parts:
            if not isinstance(p, IntCmp):
                continue
            l, r = p.lhs, p.rhs
            if isinstance(l, IntVar) and isinstance(r, IntConst):
                if p.op == ">":
                    note(l.name, r.value + 1)
                elif p.op == ">=":
                    note(l.name, r.value)
            elif isinstance(l, IntConst) and isinstance(r, IntVar):
                if p.op == "<":
                    note(r.name, l.value + 1)
                elif p.op == "<=":
                    note(r.name, l.value)
    return bounds


def _shifted(poly: Poly, bounds: dict) -> Poly | None:
    """Rewrite atoms as (lower bound + non-negative slack).

    Returns None when an atom has no usable lower bound."""
    out = poly
    for a in sorted(poly.atoms(), key=_atom_key):
        if a[0] == "v":
            lb = max(bounds.get(a[1], 1), 1)
            out = out.substitute(a, Poly.atom(("v", a[1] + "'")) + Poly.const(lb))
        elif a[0] == "pow2":
            if not _nonnegative(a[1], bounds):
                return None
            # pow2(t) >= 1 for t >= 0
            out = out.substitute(a, Poly.atom(("pow2'", a[1])) + Poly.const(1))
        else:
            return None
    return out


def _nonnegative(poly: Poly, bounds: dict) -> bool:
    shifted = _shifted(poly, bounds)
    return shifted is not None and all(c >= 0 for c in shifted.terms.values())


def is_positive(term, assumptions=()) -> bool:
    shifted = _shifted(normalize(term), _lower_bounds(assumptions))
    if shifted is None:
        return False
    return all(c >= 0 for c in shifted.terms.values()) and shifted.constant > 0


@dataclass(frozen=True)
class Admissibility:
    admissible: bool
    symbol: Sym | None = None
    term: object = None
    reason: str = ""

    def __bool__(self):
        return self.admissible

    def raise_if_rejected(self):
        if not self.admissible:
            raise AdmissibilityError(self.symbol, self.term, self.reason)


def check_admissible(omega: WidthMap, assumptions=()) -> Admissibility:
    """Every width must be provably positive when all width variables are."""
    for sym, width in omega.width_of:
        if is_positive(width, assumptions):
            continue
        poly = normalize(width)
        if poly.is_const():
            reason = f"constant width {poly.constant}"
        elif any(a[0] == "t" for a in poly.atoms()):
            reason = "uses operators outside +, *, pow2"
        else:
            reason = "can be non-positive for positive width variables"
        return Admissibility(False, sym, width, reason)
    return Admissibility(True)


# --------------------------------------------------------------------------
# Well-sortedness


def annotate(phi, omega: WidthMap) -> dict:
    """Compute the width of every bit-vector subterm of ``phi``.

    Raises :class:`SortError` on the first violation."""
    widths: dict = {}

    def term(t):
        if t in widths:
            return widths[t]
        match t:
            case Sym():
                if not omega.has(t):
                    raise UnknownSymbol(f"symbol {t.name} has no width")
                w = omega.width(t)
            case BvVar(width=n) | BvConst(width=n):
                w = IntConst(n)
            case BvApp(op="extract", args=(a,), params=(u, l)):
                inner = term(a)
                poly = normalize(inner)
                if poly.is_const() and u >= poly.constant:
                    raise ExtractError(
                        f"extract [{u}:{l}] out of range for width {poly.constant} in {pretty(t)}"
                    )
                w = IntConst(u - l + 1)
            case BvApp(op="concat", args=(a, b)):
                w = IntApp("+", (term(a), term(b)))
            case BvApp(args=(a,)):
                w = term(a)
            case BvApp(args=(a, b)):
                wa, wb = term(a), term(b)
                if not widths_equal(wa, wb):
                    raise WidthMismatch(t, wa, wb)
                w = wb
            case _:
                raise SortError(f"not a bit-vector term: {t!r}")
        widths[t] = w
        return w

    def formula(f):
        match f:
            case BoolConst():
                return
            case BvPred(lhs=l, rhs=r):
                wl, wr = term(l), term(r)
                if not widths_equal(wl, wr):
                    raise WidthMismatch(f, wl, wr)
            case Not(arg=a):
                formula(a)
            case And(args=args) | Or(args=args):
                for a in args:
                    formula(a)
            case Implies(lhs=l, rhs=r) | Iff(lhs=l, rhs=r):
                formula(l)
                formula(r)
            case Quant(bound=vs, body=b):
                for v in vs:
                    if not isinstance(v, (Sym, BvVar)):
                        raise SortError(f"bad binder {v!r}")
                    if isinstance(v, Sym) and not omega.has(v):
                        raise UnknownSymbol(f"quantified symbol {v.name} has no width")
                formula(b)
            case _:
                raise SortError(f"not a bit-vector formula: {f!r}")

    formula(phi)
    return widths


def check_well_sorted(phi, omega: WidthMap, assumptions=()) -> dict:
    """Admissibility followed by width annotation."""
    check_admissible(omega, assumptions).raise_if_rejected()
    for node in walk(phi):
        if isinstance(node, Sym) and not omega.has(node):
            raise UnknownSymbol(f"symbol {node.name} is not declared")
    return annotate(phi, omega)


# --------------------------------------------------------------------------
# Extract elimination


def eliminate_extract(goal, omega: WidthMap, assumptions=()):
    """Rewrite ``s = t[u:l]`` literals into the concatenation form.

    Each literal becomes ``t = y1 ++ y2 ++ y3 => s = y2`` with fresh variables
    of widths ``n-1-u``, ``u-l+1`` and ``l`` (dropping empty pieces).  The
    fresh variables are left free, i.e. universally quantified at goal level.
    """
    if not contains_extract(goal):
        return goal, omega
    widths = annotate(goal, omega)
    taken = {s.name for s in omega.symbols} | set(omega.width_vars)
    occurrence = count()
    new_widths: dict = {}

    def fresh(stem):
        name = stem
        while name in taken:
            name += "_"
        taken.add(name)
        return Sym(name, VARIABLE)

    def split(s, ext):
        t = ext.args[0]
        u, l = ext.params
        n = widths[t]
        hi_width = normalize(n) - Poly.const(u + 1)
        if hi_width.is_const() and hi_width.constant < 0:
            raise ExtractError(f"extract [{u}:{l}] out of range for width {pretty(n)}")
        has_hi = not (hi_width.is_const() and hi_width.constant == 0)
        if not has_hi and l == 0:
            return BvPred("=", s, t)
        idx = next(occurrence)
        pieces = []
        if has_hi:
            hi_term = hi_width.to_term()
            if not is_positive(hi_term, assumptions):
                raise ExtractError(
                    f"cannot show {pretty(n)} > {u}: extract [{u}:{l}] needs an assumption"
                )
            pieces.append(fresh(f"_ex{idx}_hi"))
            new_widths[pieces[-1]] = hi_term
        mid = fresh(f"_ex{idx}_mid")
        new_widths[mid] = IntConst(u - l + 1)
        pieces.append(mid)
        if l > 0:
            pieces.append(fresh(f"_ex{idx}_lo"))
            new_widths[pieces[-1]] = IntConst(l)
        cat = pieces[-1]
        for y in reversed(pieces[:-1]):
            cat = BvApp("concat", (y, cat))
        return Implies(BvPred("=", t, cat), BvPred("=", s, mid))

    def literal(f):
        l, r = f.lhs, f.rhs
        if isinstance(r, BvApp) and r.op == "extract" and not contains_extract(l) and not contains_extract(r.args[0]):
            return split(l, r)
        if isinstance(l, BvApp) and l.op == "extract" and not contains_extract(r) and not contains_extract(l.args[0]):
            return split(r, l)
        return None

    def go(f, positive: bool, under_exists: bool):
        if not contains_extract(f):
            return f
        match f:
            case BvPred(op="="):
                if positive and not under_exists:
                    out = literal(f)
                    if out is not None:
                        return out
                raise ExtractError(f"unsupported extract context: {pretty(f)}")
            case And(args=args):
                return And(tuple(go(a, positive, under_exists) for a in args))
            case Or(args=args):
                return Or(tuple(go(a, positive, under_exists) for a in args))
            case Not(arg=a):
                return Not(go(a, not positive, under_exists))
            case Implies(lhs=l, rhs=r):
                return Implies(go(l, not positive, under_exists), go(r, positive, under_exists))
            case Quant(kind=k, bound=vs, body=b):
                blocked = under_exists or (k == "exists") == positive
                return Quant(k, vs, go(b, positive, blocked))
        raise ExtractError(f"unsupported extract context: {pretty(f)}")

    out = go(goal, True, False)
    return out, omega.extend(new_widths)
