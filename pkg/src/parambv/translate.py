"""Translation of parametric bit-vector formulas into UFNIA.

``convert`` maps bit-vector terms to integer terms: a variable ``x`` becomes
the integer variable ``_ix_x``, a symbolic constant becomes its value reduced
modulo ``pow2`` of its width, and each operator application is replaced by its
modular-arithmetic definition (``elim``).  Bitwise and/or/xor stay as the
uninterpreted ``intand``/``intor``/``intxor``.  ``translate`` adds the prelude
(range guards, positive widths, axioms of the chosen mode).
"""

from __future__ import annotations

from dataclasses import dataclass

from .ast import (
    FALSE,
    TRUE,
    UF_ARITY,
    And,
    BoolConst,
    BvApp,
    BvPred,
    Iff,
    Implies,
    IntApp,
    IntCmp,
    IntConst,
    IntIte,
    IntVar,
    Not,
    Or,
    Quant,
    Sym,
    WidthMap,
    bv_free_vars,
    bv_symbols,
    conj,
    euclid_divmod,
    used_ufs,
    walk,
)
from .axioms import MODES, axioms_for
from .sortcheck import annotate, check_well_sorted, eliminate_extract
from .syntax import pretty

VAR_PREFIX = "_ix_"

_UNSIGNED = {"bvult": "<", "bvule": "<=", "bvugt": ">", "bvuge": ">="}
_SIGNED = {"bvslt": "<", "bvsle": "<=", "bvsgt": ">", "bvsge": ">="}
_BITWISE = {"bvand": "intand", "bvor": "intor", "bvxor": "intxor"}


class TranslationError(Exception):
    pass


# --------------------------------------------------------------------------
# Folding constructors.  Only numeral arithmetic, neutral elements, small
# constants modulo pow2, and re-reduction of an already reduced operand are
# simplified.


def _is_num(t, value=None) -> bool:
    return isinstance(t, IntConst) and (value is None or t.value == value)


def _is_pow2(t) -> bool:
    return isinstance(t, IntApp) and t.op == "pow2"


def mk_add(*args):
    flat = []
    for a in args:
        if isinstance(a, IntApp) and a.op == "+":
            flat.extend(a.args)
        else:
            flat.append(a)
    total = sum(a.value for a in flat if _is_num(a))
    rest = [a for a in flat if not _is_num(a)]
    if total:
        rest.append(IntConst(total))
    if not rest:
        return IntConst(0)
    if len(rest) == 1:
        return rest[0]
    return IntApp("+", tuple(rest))


def mk_sub(a, b):
    if _is_num(a) and _is_num(b):
        return IntConst(a.value - b.value)
    if _is_num(b, 0):
        return a
    return IntApp("-", (a, b))


def mk_mul(*args):
    flat = []
    for a in args:
        if isinstance(a, IntApp) and a.op == "*":
            flat.extend(a.args)
        else:
            flat.append(a)
    product = 1
    for a in flat:
        if _is_num(a):
            product *= a.value
    if product == 0:
        return IntConst(0)
    rest = [a for a in flat if not _is_num(a)]
    if product != 1 or not rest:
        rest.insert(0, IntConst(product))
    if len(rest) == 1:
        return rest[0]
    return IntApp("*", tuple(rest))


def mk_div(a, b):
    if _is_num(a) and _is_num(b) and b.value != 0:
        return IntConst(euclid_divmod(a.value, b.value)[0])
    if _is_num(a, 0) and _is_pow2(b):
        return a
    return IntApp("div", (a, b))


def _strip_mod(e, m):
    """Drop ``mod m`` from operands of +, -, * inside a term reduced mod m."""
    match e:
        case IntApp(op="mod", args=(inner, mm)) if mm == m:
            return _strip_mod(inner, m)
        case IntApp(op="+", args=args):
            return mk_add(*(_strip_mod(a, m) for a in args))
        case IntApp(op="*", args=args):
            return mk_mul(*(_strip_mod(a, m) for a in args))
        case IntApp(op="-", args=(a, b)):
            return mk_sub(_strip_mod(a, m), _strip_mod(b, m))
    return e


def mk_mod(a, m):
    if _is_num(a) and _is_num(m) and m.value != 0:
        return IntConst(euclid_divmod(a.value, m.value)[1])
    if _is_pow2(m):
        if _is_num(a) and a.value in (0, 1):
            return a
        a = _strip_mod(a, m)
    return IntApp("mod", (a, m))


def mk_ite(c, t, e):
    if c == TRUE:
        return t
    if c == FALSE:
        return e
    if t == e:
        return t
    return IntIte(c, t, e)


_CMP = {
    "=": lambda a, b: a == b,
    "distinct": lambda a, b: a != b,
    "<": lambda a, b: a < b,
    "<=": lambda a, b: a <= b,
    ">": lambda a, b: a > b,
    ">=": lambda a, b: a >= b,
}


def mk_cmp(op, a, b):
    if _is_num(a) and _is_num(b):
        return BoolConst(_CMP[op](a.value, b.value))
    return IntCmp(op, a, b)


def mk_not(f):
    if isinstance(f, BoolConst):
        return BoolConst(not f.value)
    return Not(f)


def pow2(e):
    return IntApp("pow2", (e,))


# --------------------------------------------------------------------------
# Elim


def uts(k, x):
    """Two's-complement reading of an unsigned value ``x`` of width ``k``."""
    return mk_sub(mk_mul(IntConst(2), mk_mod(x, pow2(mk_sub(k, IntConst(1))))), x)


def elim(op: str, k, *args, fig1_urem: bool = False):
    """Integer definition of the bit-vector operator or relation ``op``.

    ``k`` is the width of the last argument; ``args`` are converted integer
    terms.  Returns an integer term, or a formula for relations.
    """
    p = pow2(k)
    match op, args:
        case "bvadd", (x, y):
            return mk_mod(mk_add(x, y), p)
        case "bvsub", (x, y):
            # x + (2^k - y) keeps the dividend non-negative
            return mk_mod(mk_add(x, mk_sub(p, y)), p)
        case "bvmul", (x, y):
            return mk_mod(mk_mul(x, y), p)
        case "bvudiv", (x, y):
            return mk_ite(mk_cmp("=", y, IntConst(0)), mk_sub(p, IntConst(1)), mk_div(x, y))
        case "bvurem", (x, y):
            zero_branch = mk_sub(p, IntConst(1)) if fig1_urem else x
            return mk_ite(mk_cmp("=", y, IntConst(0)), zero_branch, mk_mod(x, y))
        case "bvnot", (x,):
            return mk_sub(p, mk_add(x, IntConst(1)))
        case "bvneg", (x,):
            return mk_mod(mk_sub(p, x), p)
        case "bvshl", (x, y):
            return mk_mod(mk_mul(x, pow2(y)), p)
        case "bvlshr", (x, y):
            return mk_mod(mk_div(x, pow2(y)), p)
        case "bvashr", (x, y):
            msb_clear = mk_cmp("=", mk_div(x, pow2(mk_sub(k, IntConst(1)))), IntConst(0))
            shifted = elim("bvlshr", k, x, y)
            flipped = elim("bvnot", k, elim("bvlshr", k, elim("bvnot", k, x), y))
            return mk_ite(msb_clear, shifted, flipped)
        case "concat", (x, y):
            return mk_add(mk_mul(x, p), y)
        case ("bvand" | "bvor" | "bvxor"), (x, y):
            return IntApp(_BITWISE[op], (k, x, y))
        case ("=" | "distinct"), (x, y):
            return mk_cmp(op, x, y)
        case _ if op in _UNSIGNED:
            return mk_cmp(_UNSIGNED[op], *args)
        case _ if op in _SIGNED:
            x, y = args
            return mk_cmp(_SIGNED[op], uts(k, x), uts(k, y))
    raise TranslationError(f"no integer definition for {op} with {len(args)} arguments")


# --------------------------------------------------------------------------
# Conv


def var_name(sym: Sym, taken=()) -> str:
    name = VAR_PREFIX + sym.name
    while name in taken:
        name += "_"
    return name


def make_chi(phi, omega: WidthMap) -> dict:
    """Injective map from every variable of ``phi`` (free or bound) to an
    integer variable name that avoids the width variables."""
    taken = set(omega.width_vars)
    chi = {}
    for sym in bv_symbols(phi):
        if sym.is_var and sym not in chi:
            chi[sym] = var_name(sym, taken)
            taken.add(chi[sym])
    return chi


def range_guard(v: str, width):
    return conj(IntCmp("<=", IntConst(0), IntVar(v)), IntCmp("<", IntVar(v), pow2(width)))


def convert(e, omega: WidthMap, chi: dict | None = None, widths: dict | None = None, fig1_urem=False):
    """Conv: bit-vector term or formula to integer term or formula."""
    if chi is None:
        chi = make_chi(e, omega)
    if widths is None:
        widths = annotate(e, omega) if not isinstance(e, (Sym, BvApp)) else {}

    def width(t):
        if t not in widths:
            widths.update(annotate(BvPred("=", t, t), omega))
        return widths[t]

    def term(t):
        match t:
            case Sym():
                if not omega.has(t):
                    raise TranslationError(f"symbol {t.name} has no width")
                if t.is_var:
                    if t not in chi:
                        raise TranslationError(f"variable {t.name} has no integer counterpart")
                    return IntVar(chi[t])
                return mk_mod(omega.value(t), pow2(omega.width(t)))
            case BvApp(op="extract"):
                raise TranslationError("extract must be eliminated before conversion")
            case BvApp(op=op, args=args):
                return elim(op, width(args[-1]), *(term(a) for a in args), fig1_urem=fig1_urem)
        raise TranslationError(f"cannot convert {t!r}")

    def formula(f):
        match f:
            case BoolConst():
                return f
            case BvPred(op=op, lhs=l, rhs=r):
                return elim(op, width(r), term(l), term(r))
            case Not(arg=a):
                return mk_not(formula(a))
            case And(args=args):
                return And(tuple(formula(a) for a in args))
            case Or(args=args):
                return Or(tuple(formula(a) for a in args))
            case Implies(lhs=l, rhs=r):
                return Implies(formula(l), formula(r))
            case Iff(lhs=l, rhs=r):
                return Iff(formula(l), formula(r))
            case Quant(kind=kind, bound=vs, body=b):
                names = tuple(chi[v] for v in vs)
                guard = conj(*(range_guard(chi[v], omega.width(v)) for v in vs))
                body = formula(b)
                if kind == "forall":
                    return Quant(kind, names, Implies(guard, body))
                return Quant(kind, names, conj(guard, body))
        raise TranslationError(f"cannot convert {f!r}")

    if isinstance(e, (Sym, BvApp)):
        return term(e)
    return formula(e)


# --------------------------------------------------------------------------
# Whole problems


def axiom_formulas(mode: str, symbols) -> list:
    return [ax.formula for ax in axioms_for(mode, tuple(sorted(symbols)))]


@dataclass(frozen=True)
class TranslationResult:
    prelude: object
    body: object
    chi: tuple  # ((bit-vector name, integer name), ...)
    mode: str
    used_ufs: frozenset
    width_vars: tuple
    int_vars: tuple  # free integer variables of the body (χ range)
    prelude_parts: tuple = ()

    @property
    def formula(self):
        return Implies(self.prelude, self.body)

    def to_smtlib(self, sat: bool = False) -> str:
        lines = ["(set-logic UFNIA)"]
        for uf in ("pow2", "intand", "intor", "intxor"):
            if uf in self.used_ufs:
                arity = " ".join(["Int"] * UF_ARITY[uf])
                lines.append(f"(declare-fun {uf} ({arity}) Int)")
        for v in self.width_vars + self.int_vars:
            lines.append(f"(declare-const {v} Int)")
        parts = self.prelude_parts
        if not parts:
            prelude = "true"
        elif len(parts) == 1:
            prelude = pretty(parts[0])
        else:
            prelude = "(and\n    " + "\n    ".join(pretty(p) for p in parts) + ")"
        body = pretty(self.body)
        if sat:
            lines.append(f"(assert (and {prelude}\n  {body}))")
        else:
            lines.append(f"(assert (not (=> {prelude}\n  {body})))")
        lines.append("(check-sat)")
        return "\n".join(lines) + "\n"


def translate(
    phi,
    omega: WidthMap,
    mode: str = "combined",
    fig1_urem: bool = False,
    extra_axioms=(),
    assumptions=(),
) -> TranslationResult:
    """Full translation: sort check, extract elimination, Conv and prelude.

    ``extra_axioms`` are integer formulas conjoined to the prelude (used for
    rewrites proved in earlier rounds)."""
    if mode not in MODES:
        raise ValueError(f"unknown axiomatization mode {mode!r}")
    check_well_sorted(phi, omega, assumptions)
    phi, omega = eliminate_extract(phi, omega, assumptions)
    widths = annotate(phi, omega)
    chi = make_chi(phi, omega)
    body = convert(phi, omega, chi, widths, fig1_urem=fig1_urem)

    free = bv_free_vars(phi)
    ranges = []
    for sym in free:
        ranges.extend(range_guard(chi[sym], omega.width(sym)).args)
    positive = [IntCmp(">", IntVar(w), IntConst(0)) for w in omega.width_vars]
    extra = list(extra_axioms)

    used = set()
    for part in [body, *ranges, *extra]:
        used |= used_ufs(part)
    if used & {"intand", "intor", "intxor"}:
        used.add("pow2")
    axioms = axiom_formulas(mode, used)
    for ax in axioms:
        used |= used_ufs(ax)

    parts = tuple(ranges + positive + axioms + extra)
    prelude = conj(*parts)
    width_vars = tuple(omega.width_vars)
    int_vars = tuple(chi[s] for s in free)
    known = set(width_vars) | set(int_vars)
    for node in walk(body):
        if isinstance(node, IntVar) and node.name not in known and not _bound_somewhere(body, node.name):
            raise TranslationError(f"unexpected free integer variable {node.name}")
    return TranslationResult(
        prelude=prelude,
        body=body,
        chi=tuple((s.name, chi[s]) for s in chi),
        mode=mode,
        used_ufs=frozenset(used),
        width_vars=width_vars,
        int_vars=int_vars,
        prelude_parts=parts,
    )


def _bound_somewhere(e, name: str) -> bool:
    return any(isinstance(n, Quant) and name in n.bound for n in walk(e))
