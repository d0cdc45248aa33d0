"""Brute-force ground truth at concrete widths.

Two independent implementations of the fixed-width bit-vector operators are
provided: :func:`word_apply` works on unsigned integers with modular
arithmetic, :func:`bits_apply` on little-endian bit lists with ripple-carry
adders and long division.  Integer formulas are evaluated in the intended
model, where ``pow2`` is ``2**x`` and ``intand``/``intor``/``intxor`` are the
width-``k`` bitwise operations.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field

from .ast import (
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
    IntIte,
    IntVar,
    Not,
    Or,
    Quant,
    Sym,
    WidthMap,
    bv_free_vars,
    euclid_divmod,
    int_free_vars,
)
from .axioms import axioms_for
from .sortcheck import annotate, check_well_sorted, eliminate_extract
from .syntax import parse_int_term
from .translate import elim, make_chi, translate

MAX_POINTS = 1 << 16
MAX_POW2_EXPONENT = 1 << 16


class OracleError(Exception):
    pass


# --------------------------------------------------------------------------
# Bit-vector values


@dataclass(frozen=True)
class BvValue:
    width: int
    nat: int

    def __post_init__(self):
        if self.width < 1:
            raise OracleError(f"bit-vector width must be positive, got {self.width}")
        if not 0 <= self.nat < 1 << self.width:
            raise OracleError(f"{self.nat} does not fit in {self.width} bits")

    @classmethod
    def wrap(cls, width: int, value: int) -> BvValue:
        return cls(width, value % (1 << width))

    @classmethod
    def from_bits(cls, bits) -> BvValue:
        return cls(len(bits), sum(b << i for i, b in enumerate(bits)))

    def to_nat(self) -> int:
        return self.nat

    def to_int(self) -> int:
        """Two's-complement value: -msb * 2^(k-1) + value of the low k-1 bits."""
        k = self.width
        return -self.bit(k - 1) * (1 << (k - 1)) + (self.nat & ((1 << (k - 1)) - 1))

    def bit(self, i: int) -> int:
        return (self.nat >> i) & 1

    def bits(self) -> list:
        return [self.bit(i) for i in range(self.width)]


# --------------------------------------------------------------------------
# Word-level semantics


def word_apply(op: str, args, params=()):
    """SMT-LIB semantics on :class:`BvValue` operands."""
    a = args[0]
    k = a.width
    mask = (1 << k) - 1
    if op == "concat":
        b = args[1]
        return BvValue(k + b.width, (a.nat << b.width) | b.nat)
    if op == "extract":
        u, l = params
        if u >= k:
            raise OracleError(f"extract [{u}:{l}] out of range for width {k}")
        return BvValue(u - l + 1, (a.nat >> l) & ((1 << (u - l + 1)) - 1))
    if op == "bvnot":
        return BvValue(k, ~a.nat & mask)
    if op == "bvneg":
        return BvValue(k, -a.nat & mask)
    b = args[1]
    if b.width != k:
        raise OracleError(f"{op}: width mismatch {k} vs {b.width}")
    x, y = a.nat, b.nat
    match op:
        case "bvand":
            r = x & y
        case "bvor":
            r = x | y
        case "bvxor":
            r = x ^ y
        case "bvadd":
            r = x + y
        case "bvsub":
            r = x - y
        case "bvmul":
            r = x * y
        case "bvudiv":
            r = mask if y == 0 else x // y
        case "bvurem":
            r = x if y == 0 else x % y
        case "bvshl":
            r = 0 if y >= k else x << y
        case "bvlshr":
            r = 0 if y >= k else x >> y
        case "bvashr":
            r = a.to_int() >> min(y, k)
        case _:
            return _word_relation(op, a, b)
    return BvValue(k, r & mask)


def _word_relation(op, a: BvValue, b: BvValue) -> bool:
    match op:
        case "=":
            return a.nat == b.nat
        case "distinct":
            return a.nat != b.nat
        case "bvult":
            return a.nat < b.nat
        case "bvule":
            return a.nat <= b.nat
        case "bvugt":
            return a.nat > b.nat
        case "bvuge":
            return a.nat >= b.nat
        case "bvslt":
            return a.to_int() < b.to_int()
        case "bvsle":
            return a.to_int() <= b.to_int()
        case "bvsgt":
            return a.to_int() > b.to_int()
        case "bvsge":
            return a.to_int() >= b.to_int()
    raise OracleError(f"unknown operator {op}")


# --------------------------------------------------------------------------
# Bit-array semantics (little-endian lists), written without integer
# arithmetic on whole words.


def _ripple_add(xs, ys, carry=0):
    out = []
    for x, y in zip(xs, ys):
        out.append(x ^ y ^ carry)
        carry = (x & y) | (carry & (x ^ y))
    return out, carry


def _invert(xs):
    return [1 - x for x in xs]


def _negate(xs):
    return _ripple_add(_invert(xs), [0] * len(xs), 1)[0]


def _ult(xs, ys) -> bool:
    for x, y in zip(reversed(xs), reversed(ys)):
        if x != y:
            return x < y
    return False


def _slt(xs, ys) -> bool:
    if xs[-1] != ys[-1]:
        return xs[-1] == 1
    return _ult(xs, ys)


def _shift_amount(ys, k):
    """Shift distance, clamped to k (larger shifts move every bit out)."""
    n = sum(1 << i for i, y in enumerate(ys) if y)
    return min(n, k)


def _shl(xs, n):
    return ([0] * n + xs)[: len(xs)]


def _shr(xs, n, fill=0):
    return xs[n:] + [fill] * min(n, len(xs))


def _long_division(xs, ys):
    k = len(xs)
    if not any(ys):
        return [1] * k, list(xs)
    quotient = [0] * k
    rem = [0] * k
    for i in reversed(range(k)):
        rem = [xs[i]] + rem[:-1]
        if not _ult(rem, ys):
            rem = _ripple_add(rem, _negate(ys))[0]
            quotient[i] = 1
    return quotient, rem


def bits_apply(op: str, args, params=()):
    a = args[0].bits()
    k = len(a)
    if op == "concat":
        return BvValue.from_bits(args[1].bits() + a)
    if op == "extract":
        u, l = params
        if u >= k:
            raise OracleError(f"extract [{u}:{l}] out of range for width {k}")
        return BvValue.from_bits(a[l : u + 1])
    if op == "bvnot":
        return BvValue.from_bits(_invert(a))
    if op == "bvneg":
        return BvValue.from_bits(_negate(a))
    b = args[1].bits()
    if len(b) != k:
        raise OracleError(f"{op}: width mismatch {k} vs {len(b)}")
    match op:
        case "bvand":
            r = [x & y for x, y in zip(a, b)]
        case "bvor":
            r = [x | y for x, y in zip(a, b)]
        case "bvxor":
            r = [x ^ y for x, y in zip(a, b)]
        case "bvadd":
            r = _ripple_add(a, b)[0]
        case "bvsub":
            r = _ripple_add(a, _negate(b))[0]
        case "bvmul":
            r = [0] * k
            for i, y in enumerate(b):
                if y:
                    r = _ripple_add(r, _shl(a, i))[0]
        case "bvudiv":
            r = _long_division(a, b)[0]
        case "bvurem":
            r = _long_division(a, b)[1]
        case "bvshl":
            r = _shl(a, _shift_amount(b, k))
        case "bvlshr":
            r = _shr(a, _shift_amount(b, k))
        case "bvashr":
            r = _shr(a, _shift_amount(b, k), fill=a[-1])
        case "=":
            return a == b
        case "distinct":
            return a != b
        case "bvult":
            return _ult(a, b)
        case "bvule":
            return not _ult(b, a)
        case "bvugt":
            return _ult(b, a)
        case "bvuge":
            return not _ult(a, b)
        case "bvslt":
            return _slt(a, b)
        case "bvsle":
            return not _slt(b, a)
        case "bvsgt":
            return _slt(b, a)
        case "bvsge":
            return not _slt(a, b)
        case _:
            raise OracleError(f"unknown operator {op}")
    return BvValue.from_bits(r)


SEMANTICS = {"word": word_apply, "bits": bits_apply}


# --------------------------------------------------------------------------
# Instantiation and bit-vector evaluation


def eval_width(term, width_vals: dict) -> int:
    return compile_int(term)(dict(width_vals))


def instantiate(phi, omega: WidthMap, width_vals: dict):
    """Replace parametric symbols by fixed-width variables and constants."""
    cache: dict = {}

    def leaf(sym: Sym):
        if sym in cache:
            return cache[sym]
        w = eval_width(omega.width(sym), width_vals)
        if w < 1:
            raise OracleError(f"width of {sym.name} is {w} under {width_vals}")
        if sym.is_var:
            out = BvVar(sym.name, w)
        else:
            out = BvConst(eval_width(omega.value(sym), width_vals) % (1 << w), w)
        cache[sym] = out
        return out

    def go(e):
        match e:
            case Sym():
                return leaf(e)
            case BvApp(op=op, args=args, params=ps):
                return BvApp(op, tuple(go(a) for a in args), ps)
            case BvPred(op=op, lhs=l, rhs=r):
                return BvPred(op, go(l), go(r))
            case Not(arg=a):
                return Not(go(a))
            case And(args=args):
                return And(tuple(go(a) for a in args))
            case Or(args=args):
                return Or(tuple(go(a) for a in args))
            case Implies(lhs=l, rhs=r):
                return Implies(go(l), go(r))
            case Iff(lhs=l, rhs=r):
                return Iff(go(l), go(r))
            case Quant(kind=k, bound=vs, body=b):
                return Quant(k, tuple(leaf(v) for v in vs), go(b))
        return e

    return go(phi)


def eval_bv(t, var_vals: dict, semantics: str = "word") -> BvValue:
    """Value of a fixed-width term; ``var_vals`` maps variable names to naturals."""
    apply = SEMANTICS[semantics]
    match t:
        case BvVar(name=n, width=w):
            if n not in var_vals:
                raise OracleError(f"no value for {n}")
            return BvValue(w, var_vals[n])
        case BvConst(value=v, width=w):
            return BvValue(w, v)
        case BvApp(op=op, args=args, params=ps):
            return apply(op, [eval_bv(a, var_vals, semantics) for a in args], ps)
        case Sym():
            raise OracleError(f"symbol {t.name} is not instantiated")
    raise OracleError(f"not a fixed-width term: {t!r}")


def eval_bv_formula(phi, var_vals: dict, semantics: str = "word") -> bool:
    apply = SEMANTICS[semantics]

    def go(f, env):
        match f:
            case BoolConst(value=v):
                return v
            case BvPred(op=op, lhs=l, rhs=r):
                return apply(op, [eval_bv(l, env, semantics), eval_bv(r, env, semantics)])
            case Not(arg=a):
                return not go(a, env)
            case And(args=args):
                return all(go(a, env) for a in args)
            case Or(args=args):
                return any(go(a, env) for a in args)
            case Implies(lhs=l, rhs=r):
                return not go(l, env) or go(r, env)
            case Iff(lhs=l, rhs=r):
                return go(l, env) == go(r, env)
            case Quant(kind=kind, bound=vs, body=b):
                ranges = [range(1 << v.width) for v in vs]
                points = 1
                for r in ranges:
                    points *= len(r)
                if points > MAX_POINTS:
                    raise OracleError(f"quantifier domain of {points} points exceeds the cap")
                combos = itertools.product(*ranges)
                test = (go(b, {**env, **{v.name: x for v, x in zip(vs, xs)}}) for xs in combos)
                return all(test) if kind == "forall" else any(test)
        raise OracleError(f"not a fixed-width formula: {f!r}")

    return go(phi, dict(var_vals))


# --------------------------------------------------------------------------
# Integer evaluation in the intended model


def _pow2(x):
    if x < 0:
        raise OracleError(f"pow2 of negative argument {x}")
    if x > MAX_POW2_EXPONENT:
        raise OracleError(f"pow2 argument {x} too large to evaluate")
    return 1 << x


def _bitwise(fn):
    def apply(k, x, y):
        if k < 0 or x < 0 or y < 0:
            raise OracleError(f"bitwise operation on negative operands ({k}, {x}, {y})")
        return fn(x, y) & ((1 << k) - 1)

    return apply


INTENDED = {
    "pow2": _pow2,
    "intand": _bitwise(lambda x, y: x & y),
    "intor": _bitwise(lambda x, y: x | y),
    "intxor": _bitwise(lambda x, y: x ^ y),
}


def _div(a, b):
    if b == 0:
        raise OracleError("division by zero")
    return euclid_divmod(a, b)[0]


def _mod(a, b):
    if b == 0:
        raise OracleError("modulo by zero")
    return euclid_divmod(a, b)[1]


_CMP = {
    "=": lambda a, b: a == b,
    "distinct": lambda a, b: a != b,
    "<": lambda a, b: a < b,
    "<=": lambda a, b: a <= b,
    ">": lambda a, b: a > b,
    ">=": lambda a, b: a >= b,
}


def _guard_atoms(f):
    match f:
        case And(args=args):
            for a in args:
                yield from _guard_atoms(a)
        case IntCmp():
            yield f


def _bounds(kind, names, body):
    """Per bound variable, compiled (lower, upper-exclusive) from the guard."""
    match kind, body:
        case "forall", Implies(lhs=g):
            guard = g
        case "exists", And(args=args):
            guard = And(args)
        case _:
            guard = body
    lower, upper = {}, {}
    for atom in _guard_atoms(guard):
        op, l, r = atom.op, atom.lhs, atom.rhs
        if isinstance(r, IntVar) and r.name in names and op in ("<", "<="):
            op, l, r = {"<": ">", "<=": ">="}[op], r, l
        if not (isinstance(l, IntVar) and l.name in names):
            continue
        v = l.name
        if v in int_free_vars(r):
            continue
        bound = compile_int(r)
        if op == ">=":
            lower.setdefault(v, (bound, 0))
        elif op == ">":
            lower.setdefault(v, (bound, 1))
        elif op == "<":
            upper.setdefault(v, (bound, 0))
        elif op == "<=":
            upper.setdefault(v, (bound, 1))
    out = []
    for v in names:
        if v not in lower or v not in upper:
            raise OracleError(f"quantified variable {v} has no finite guard")
        out.append((v, lower[v], upper[v]))
    return out


def compile_int(e, ufs: dict | None = None):
    """Compile an integer term or formula into ``env -> value``."""
    ufs = {**INTENDED, **(ufs or {})}
    return _compile(e, ufs)


def _compile(e, ufs):
    c = lambda x: _compile(x, ufs)
    match e:
        case IntConst(value=v):
            return lambda env: v
        case IntVar(name=n):
            def var(env):
                try:
                    return env[n]
                except KeyError:
                    raise OracleError(f"no value for integer variable {n}") from None
            return var
        case IntApp(op="+", args=args):
            fs = [c(a) for a in args]
            return lambda env: sum(f(env) for f in fs)
        case IntApp(op="-", args=(a,)):
            f = c(a)
            return lambda env: -f(env)
        case IntApp(op="-", args=args):
            first, *rest = [c(a) for a in args]
            return lambda env: first(env) - sum(f(env) for f in rest)
        case IntApp(op="*", args=args):
            fs = [c(a) for a in args]

            def product(env):
                out = 1
                for f in fs:
                    out *= f(env)
                return out
            return product
        case IntApp(op="div", args=(a, b)):
            fa, fb = c(a), c(b)
            return lambda env: _div(fa(env), fb(env))
        case IntApp(op="mod", args=(a, b)):
            fa, fb = c(a), c(b)
            return lambda env: _mod(fa(env), fb(env))
        case IntApp(op="abs", args=(a,)):
            f = c(a)
            return lambda env: abs(f(env))
        case IntApp(op=op, args=args):
            fs = [c(a) for a in args]
            return lambda env: ufs[op](*(f(env) for f in fs))
        case IntIte(cond=cond, then=t, other=o):
            fc, ft, fo = c(cond), c(t), c(o)
            return lambda env: ft(env) if fc(env) else fo(env)
        case BoolConst(value=v):
            return lambda env: v
        case IntCmp(op=op, lhs=l, rhs=r):
            fl, fr, cmp = c(l), c(r), _CMP[op]
            return lambda env: cmp(fl(env), fr(env))
        case Not(arg=a):
            f = c(a)
            return lambda env: not f(env)
        case And(args=args):
            fs = [c(a) for a in args]
            return lambda env: all(f(env) for f in fs)
        case Or(args=args):
            fs = [c(a) for a in args]
            return lambda env: any(f(env) for f in fs)
        case Implies(lhs=l, rhs=r):
            fl, fr = c(l), c(r)
            return lambda env: not fl(env) or fr(env)
        case Iff(lhs=l, rhs=r):
            fl, fr = c(l), c(r)
            return lambda env: fl(env) == fr(env)
        case Quant(kind=kind, bound=names, body=body):
            bounds = _bounds(kind, names, body)
            fb = c(body)
            want = kind == "forall"

            def quant(env):
                env = dict(env)
                visited = [0]

                def go(i):
                    if i == len(bounds):
                        visited[0] += 1
                        if visited[0] > MAX_POINTS:
                            raise OracleError("quantifier domain exceeds the enumeration cap")
                        return fb(env) == want
                    v, (lo, lo_strict), (hi, hi_incl) = bounds[i]
                    start = lo(env) + lo_strict
                    stop = hi(env) + hi_incl
                    if stop - start > MAX_POINTS:
                        raise OracleError(f"domain of {v} exceeds the enumeration cap")
                    for x in range(start, stop):
                        env[v] = x
                        if not go(i + 1):
                            return False
                    return True

                ok = go(0)
                return ok if want else not ok
            return quant
    raise OracleError(f"cannot evaluate {type(e).__name__} in the integer model")


def eval_int_intended(e, env: dict):
    return compile_int(e)(dict(env))


# --------------------------------------------------------------------------
# Reports


@dataclass
class CheckReport:
    """Outcome of an exhaustive check; rendered as text or JSON."""

    check: str
    passed: bool = True
    counts: dict = field(default_factory=dict)
    caps: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)
    skipped: list = field(default_factory=list)

    def bump(self, key: str, n: int = 1):
        self.counts[key] = self.counts.get(key, 0) + n

    def fail(self, **witness):
        self.passed = False
        self.failures.append(witness)

    def to_dict(self) -> dict:
        return {
            "check": self.check,
            "passed": self.passed,
            "counts": dict(sorted(self.counts.items())),
            "caps": self.caps,
            "failures": self.failures,
            "skipped": self.skipped,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def to_text(self) -> str:
        lines = [f"{self.check}: {'PASS' if self.passed else 'FAIL'}"]
        for key, n in sorted(self.counts.items()):
            lines.append(f"  {key}: {n}")
        if self.skipped:
            lines.append(f"  skipped: {len(self.skipped)} (over budget)")
        for w in self.failures[:10]:
            lines.append("  failure: " + ", ".join(f"{k}={v}" for k, v in w.items()))
        return "\n".join(lines)


# --------------------------------------------------------------------------
# Translation equivalence


def _width_valuations(width_vars, bound):
    for combo in itertools.product(range(1, bound + 1), repeat=len(width_vars)):
        yield dict(zip(width_vars, combo))


def check_translation_equiv(
    phi,
    omega: WidthMap,
    mode: str = "combined",
    width_bound: int = 4,
    bit_budget: int = 16,
    fig1_urem: bool = False,
    stop_at_first: bool = True,
) -> CheckReport:
    """Compare the bit-vector formula with its translation at small widths.

    Free variables range over all values.  When extract elimination introduced
    helper variables, the translated side is quantified over them, since they
    are universally quantified in the goal."""
    report = CheckReport(
        "translation-equivalence",
        caps={"width_bound": width_bound, "bit_budget": bit_budget, "mode": mode, "fig1_urem": fig1_urem},
    )
    check_well_sorted(phi, omega)
    result = translate(phi, omega, mode, fig1_urem=fig1_urem)
    phi2, omega2 = eliminate_extract(phi, omega)
    chi = make_chi(phi2, omega2)
    body = compile_int(result.body)
    originals = bv_free_vars(phi)
    helpers = [v for v in bv_free_vars(phi2) if v not in originals]

    for widths in _width_valuations(omega.width_vars, width_bound):
        try:
            inst = instantiate(phi, omega, widths)
            sizes = {v: eval_width(omega2.width(v), widths) for v in originals + helpers}
        except OracleError as exc:
            report.skipped.append({"widths": widths, "reason": str(exc)})
            continue
        if any(s < 1 for s in sizes.values()):
            report.skipped.append({"widths": widths, "reason": "non-positive width"})
            continue
        bits = sum(sizes.values())
        if bits > bit_budget:
            report.skipped.append({"widths": widths, "reason": f"{bits} bits over budget"})
            continue
        annotate(inst, WidthMap())
        report.bump("valuations")
        for values in itertools.product(*(range(1 << sizes[v]) for v in originals)):
            assignment = {v.name: x for v, x in zip(originals, values)}
            env = dict(widths)
            env.update({chi[v]: x for v, x in zip(originals, values)})
            expected = eval_bv_formula(inst, assignment)
            if helpers:
                actual = True
                for extra in itertools.product(*(range(1 << sizes[v]) for v in helpers)):
                    env.update({chi[v]: x for v, x in zip(helpers, extra)})
                    if not body(env):
                        actual = False
                        break
            else:
                actual = body(env)
            report.bump("assignments")
            if expected != actual:
                report.fail(widths=widths, values=assignment, bit_vector=expected, integer=actual)
                if stop_at_first:
                    return report
    return report


# --------------------------------------------------------------------------
# Operator-level soundness of Elim


BINARY_OPS = ("bvand", "bvor", "bvxor", "bvadd", "bvsub", "bvmul", "bvudiv", "bvurem",
              "bvshl", "bvlshr", "bvashr")
UNARY_OPS = ("bvnot", "bvneg")
RELATIONS = ("=", "distinct", "bvult", "bvule", "bvugt", "bvuge", "bvslt", "bvsle", "bvsgt", "bvsge")


def check_elim_soundness(k_max: int = 5, fig1_urem: bool = False, ops=None) -> CheckReport:
    """Every operator's integer definition against both bit-vector oracles.

    Operands are exhaustive for each width ``1..k_max``; concat is checked
    for all width pairs with ``k1 + k2 <= k_max + 1``; extract through the
    concatenation scheme by :func:`check_extract_scheme`."""
    report = CheckReport("elim-soundness", caps={"k_max": k_max, "fig1_urem": fig1_urem})
    wanted = set(ops) if ops is not None else None
    xs, ys, ks = IntVar("x"), IntVar("y"), IntVar("k")

    def run(op, arity, k, defn):
        for args in itertools.product(range(1 << k), repeat=arity):
            vals = [BvValue(k, a) for a in args]
            ref = word_apply(op, vals)
            alt = bits_apply(op, vals)
            if ref != alt:
                report.fail(op=op, k=k, args=list(args), word=str(ref), bits=str(alt))
                continue
            env = {"k": k, "x": args[0], "y": args[-1]}
            got = defn(env)
            want = ref.to_nat() if isinstance(ref, BvValue) else ref
            report.bump(op)
            if got != want:
                report.fail(op=op, k=k, args=list(args), expected=want, got=got)

    for op in UNARY_OPS + BINARY_OPS + RELATIONS:
        if wanted is not None and op not in wanted:
            continue
        arity = 1 if op in UNARY_OPS else 2
        args = (xs,) if arity == 1 else (xs, ys)
        defn = compile_int(elim(op, ks, *args, fig1_urem=fig1_urem))
        for k in range(1, k_max + 1):
            run(op, arity, k, defn)

    if wanted is None or "concat" in wanted:
        for k1 in range(1, k_max + 1):
            for k2 in range(1, k_max + 2 - k1):
                defn = compile_int(elim("concat", IntConst(k2), xs, ys))
                for a in range(1 << k1):
                    for b in range(1 << k2):
                        va, vb = BvValue(k1, a), BvValue(k2, b)
                        ref = word_apply("concat", [va, vb])
                        if ref != bits_apply("concat", [va, vb]):
                            report.fail(op="concat", widths=[k1, k2], args=[a, b])
                        report.bump("concat")
                        if defn({"x": a, "y": b}) != ref.to_nat():
                            report.fail(op="concat", widths=[k1, k2], args=[a, b])
    return report


def check_extract_scheme(n_max: int = 5, bit_budget: int = 16) -> CheckReport:
    """``s = t[u:l]`` against its concatenation rewrite, all n <= n_max."""
    report = CheckReport("extract-scheme", caps={"n_max": n_max, "bit_budget": bit_budget})
    from .ast import VARIABLE

    for n in range(1, n_max + 1):
        for u in range(n):
            for l in range(u + 1):
                t = Sym("t", VARIABLE)
                s = Sym("s", VARIABLE)
                omega = WidthMap.build({t: IntConst(n), s: IntConst(u - l + 1)})
                phi = BvPred("=", s, BvApp("extract", (t,), (u, l)))
                sub = check_translation_equiv(phi, omega, "qf", 1, bit_budget)
                report.bump("slices")
                report.bump("assignments", sub.counts.get("assignments", 0))
                report.skipped.extend(sub.skipped)
                if not sub.passed:
                    report.fail(n=n, u=u, l=l, witness=sub.failures[0])
    return report


# --------------------------------------------------------------------------
# Axioms in the intended model


def _role_domain(role, env, k_max, exp_max, int_range, symbol):
    if role == "width":
        top = exp_max if symbol == "pow2" else k_max
        return range(1, top + 1)
    if role == "int":
        return range(*int_range)
    width = role[3:]
    k = int(width) if width.isdigit() else env[width]
    return range(1 << k)


def check_axiom_validity(
    mode: str = "combined",
    k_max: int = 6,
    exp_max: int = 16,
    int_range=(-256, 256),
) -> CheckReport:
    """Every axiom instance of ``mode`` under the intended interpretation.

    Width-role variables range over ``1..k_max`` (``1..exp_max`` for pow2
    axioms), bit-vector-role variables over all values of their width, and
    unconstrained integers over ``int_range``."""
    if k_max > 8:
        raise ValueError("k_max above 8 is out of exhaustive reach")
    report = CheckReport(
        f"axiom-validity[{mode}]",
        caps={"k_max": k_max, "exp_max": exp_max, "int_range": list(int_range)},
    )
    for ax in axioms_for(mode):
        key = f"{ax.symbol}/{ax.mode}/{ax.name}"
        if not ax.roles:
            report.bump(key)
            if not eval_int_intended(ax.formula, {}):
                report.fail(axiom=key)
            continue
        inner = compile_int(ax.formula.body)
        names = [v for v, _ in ax.roles]

        def enumerate_roles(i, env):
            if i == len(ax.roles):
                yield env
                return
            v, role = ax.roles[i]
            for x in _role_domain(role, env, k_max, exp_max, int_range, ax.symbol):
                yield from enumerate_roles(i + 1, {**env, v: x})

        for env in enumerate_roles(0, {}):
            report.bump(key)
            if not inner(env):
                report.fail(axiom=key, witness={n: env[n] for n in names})
                break
    return report


# --------------------------------------------------------------------------
# Encoding lemmas


_HSELECT = parse_int_term("(mod (div n (pow2 i)) 2)")


def recursive_bitwise(symbol: str):
    """The bitwise UF as defined by its full-mode recursion alone.

    The returned function interprets ``symbol`` by evaluating the right-hand
    side of the recursion axiom, with recursive calls again going through the
    axiom rather than through Python's bitwise operators."""
    (ax,) = [a for a in axioms_for("full", (symbol, "pow2")) if a.symbol == symbol]
    rhs = ax.formula.body.rhs.rhs  # forall ... (=> guard (= (f k x y) rhs))
    compiled = {}

    def f(k, x, y):
        return compiled["rhs"]({"k": k, "x": x, "y": y})

    compiled["rhs"] = compile_int(rhs, ufs={symbol: f})
    return f


def check_lemma_suite(k_max: int = 5) -> CheckReport:
    """Concatenation/slicing identities, bit selection and the bitwise
    recursion against both bit-vector oracles, exhaustively for k <= k_max."""
    if k_max > 6:
        raise ValueError("k_max above 6 is out of exhaustive reach")
    report = CheckReport("lemma-suite", caps={"k_max": k_max})
    hselect = compile_int(_HSELECT)
    recursions = {s: recursive_bitwise(s) for s in ("intand", "intor", "intxor")}
    bv_ops = {"intand": "bvand", "intor": "bvor", "intxor": "bvxor"}

    for k in range(1, k_max + 1):
        for n in range(1 << k):
            a = BvValue(k, n)
            for i in (0, 1):
                got = word_apply("concat", [BvValue(1, i), a]).to_nat()
                report.bump("concat-bit")
                if got != (1 << k) * i + n:
                    report.fail(lemma="concat-bit", k=k, i=i, a=n)
            if k >= 2:
                low = bits_apply("extract", [a], (k - 2, 0)).to_nat()
                report.bump("mod-low-slice")
                if n % (1 << (k - 1)) != low:
                    report.fail(lemma="mod-low-slice", k=k, a=n)
                high = bits_apply("extract", [a], (k - 1, 1)).to_nat()
                report.bump("div-high-slice")
                if n // 2 != high:
                    report.fail(lemma="div-high-slice", k=k, a=n)
            bits = a.bits()
            for i in range(k):
                report.bump("h-select")
                if hselect({"n": n, "i": i}) != bits[i]:
                    report.fail(lemma="h-select", k=k, i=i, a=n)
            for m in range(1 << k):
                b = BvValue(k, m)
                for symbol, f in recursions.items():
                    op = bv_ops[symbol]
                    want = bits_apply(op, [a, b]).to_nat()
                    report.bump(f"bitwise-{op}")
                    if f(k, n, m) != want or word_apply(op, [a, b]).to_nat() != want:
                        report.fail(lemma=f"bitwise-{op}", k=k, a=n, b=m)
    return report


__all__ = [
    "BvValue",
    "CheckReport",
    "OracleError",
    "bits_apply",
    "check_axiom_validity",
    "check_elim_soundness",
    "check_extract_scheme",
    "check_lemma_suite",
    "check_translation_equiv",
    "compile_int",
    "eval_bv",
    "eval_bv_formula",
    "eval_int_intended",
    "instantiate",
    "word_apply",
]
