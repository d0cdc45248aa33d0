"""S-expression reading and printing for both term languages.

The printer emits SMT-LIB 2 concrete syntax.  ``parse_*`` functions invert
it given a symbol table, so ``parse(pretty(e)) == e`` for every tree built
from the node classes in :mod:`parambv.ast`.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .ast import (
    BV_FUNCTIONS,
    BV_RELATIONS,
    INT_FUNCTIONS,
    INT_RELATIONS,
    SYMCONST,
    UF_ARITY,
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
    IntIte,
    IntVar,
    Not,
    Or,
    Quant,
    Sym,
    WidthMap,
    walk,
)


class ParseError(Exception):
    def __init__(self, message: str, pos: tuple | None = None):
        self.pos = pos
        where = f"{pos[0]}:{pos[1]}: " if pos else ""
        super().__init__(where + message)


class DeclarationError(ParseError):
    pass


# --------------------------------------------------------------------------
# Reader


@dataclass(frozen=True)
class Atom:
    text: str
    pos: tuple


class SList(list):
    """A parenthesised list that remembers where it started."""

    pos: tuple = (0, 0)


_TOKEN = re.compile(r"""\s+|;[^\n]*|\(|\)|\|[^|]*\||"[^"]*"|[^\s()|;"]+""")


def read_all(text: str) -> list:
    """Read every top-level S-expression in ``text``."""
    stack: list = [SList()]
    line, col = 1, 1
    for m in _TOKEN.finditer(text):
        tok = m.group()
        pos = (line, col)
        nl = tok.count("\n")
        if nl:
            line += nl
            col = len(tok) - tok.rfind("\n")
        else:
            col += len(tok)
        if tok[0].isspace() or tok[0] == ";":
            continue
        if tok == "(":
            lst = SList()
            lst.pos = pos
            stack.append(lst)
        elif tok == ")":
            if len(stack) == 1:
                raise ParseError("unbalanced ')'", pos)
            done = stack.pop()
            stack[-1].append(done)
        else:
            stack[-1].append(Atom(tok, pos))
    consumed = sum(len(m.group()) for m in _TOKEN.finditer(text))
    if consumed != len(text):
        raise ParseError("unreadable character in input")
    if len(stack) != 1:
        raise ParseError("unclosed '('", stack[-1].pos)
    return list(stack[0])


def read_one(text: str):
    items = read_all(text)
    if len(items) != 1:
        raise ParseError(f"expected exactly one expression, found {len(items)}")
    return items[0]


def _pos(sx) -> tuple:
    return sx.pos


def _head(sx) -> str | None:
    if isinstance(sx, SList) and sx and isinstance(sx[0], Atom):
        return sx[0].text
    return None


# --------------------------------------------------------------------------
# Printer


def pretty(e) -> str:
    """Render a term or formula as SMT-LIB 2 text (deterministic)."""
    match e:
        case Sym(name=n) | BvVar(name=n) | IntVar(name=n):
            return n
        case BvConst(value=v, width=w):
            return f"(_ bv{v} {w})"
        case BvApp(op="extract", args=(a,), params=(u, l)):
            return f"((_ extract {u} {l}) {pretty(a)})"
        case BvApp(op=op, args=args):
            return f"({op} {' '.join(pretty(a) for a in args)})"
        case IntConst(value=v):
            return str(v) if v >= 0 else f"(- {-v})"
        case IntApp(op=op, args=args):
            return f"({op} {' '.join(pretty(a) for a in args)})"
        case IntIte(cond=c, then=t, other=o):
            return f"(ite {pretty(c)} {pretty(t)} {pretty(o)})"
        case BoolConst(value=v):
            return "true" if v else "false"
        case BvPred(op=op, lhs=l, rhs=r) | IntCmp(op=op, lhs=l, rhs=r):
            return f"({op} {pretty(l)} {pretty(r)})"
        case Not(arg=a):
            return f"(not {pretty(a)})"
        case And(args=args):
            return f"(and {' '.join(pretty(a) for a in args)})"
        case Or(args=args):
            return f"(or {' '.join(pretty(a) for a in args)})"
        case Implies(lhs=l, rhs=r):
            return f"(=> {pretty(l)} {pretty(r)})"
        case Iff(lhs=l, rhs=r):
            return f"(= {pretty(l)} {pretty(r)})"
        case Quant(kind=q, bound=vs, body=b):
            if all(isinstance(v, str) for v in vs):
                binders = " ".join(f"({v} Int)" for v in vs)
            else:
                binders = " ".join(v.name for v in vs)
            return f"({q} ({binders}) {pretty(b)})"
    raise TypeError(f"cannot print {type(e).__name__}")


# --------------------------------------------------------------------------
# Parser

_FORMULA_HEADS = {"not", "and", "or", "=>", "forall", "exists", "=", "distinct"}
_BV_CONST = re.compile(r"#b[01]+|#x[0-9a-fA-F]+")
_NUMERAL = re.compile(r"0|[1-9][0-9]*")


def _is_formula(sx) -> bool:
    if isinstance(sx, Atom):
        return sx.text in ("true", "false")
    h = _head(sx)
    return h in _FORMULA_HEADS or h in BV_RELATIONS or h in INT_RELATIONS


def parse_bv_literal(text: str) -> BvConst | None:
    if text.startswith("#b") and _BV_CONST.fullmatch(text):
        return BvConst(int(text[2:], 2), len(text) - 2)
    if text.startswith("#x") and _BV_CONST.fullmatch(text):
        return BvConst(int(text[2:], 16), 4 * (len(text) - 2))
    return None


class TermReader:
    """Converts S-expressions into AST nodes.

    ``symbols`` maps bit-vector identifiers to their leaf (:class:`Sym` or
    :class:`BvVar`).  Integer identifiers need no declaration unless
    ``int_names`` is given, in which case unknown names are rejected.
    """

    def __init__(self, symbols: dict | None = None, int_names: set | None = None):
        self.symbols = dict(symbols or {})
        self.int_names = int_names

    # -- formulas ---------------------------------------------------------

    def formula(self, sx, side: str = "bv", bound=frozenset()):
        if isinstance(sx, Atom):
            if sx.text == "true":
                return BoolConst(True)
            if sx.text == "false":
                return BoolConst(False)
            raise ParseError(f"expected a formula, got {sx.text!r}", sx.pos)
        h = _head(sx)
        if h is None:
            raise ParseError("expected an operator", _pos(sx))
        args = sx[1:]
        if h == "not":
            self._arity(sx, 1)
            return Not(self.formula(args[0], side, bound))
        if h in ("and", "or"):
            if len(args) < 2:
                raise ParseError(f"{h} needs at least two arguments", _pos(sx))
            parts = tuple(self.formula(a, side, bound) for a in args)
            return And(parts) if h == "and" else Or(parts)
        if h == "=>":
            self._arity(sx, 2)
            return Implies(self.formula(args[0], side, bound), self.formula(args[1], side, bound))
        if h in ("forall", "exists"):
            return self._quant(sx, h, side, bound)
        if h == "=" and len(args) == 2 and (_is_formula(args[0]) or _is_formula(args[1])):
            return Iff(self.formula(args[0], side, bound), self.formula(args[1], side, bound))
        if side == "bv":
            if h in BV_RELATIONS:
                self._arity(sx, 2)
                return BvPred(h, self.bv_term(args[0], bound), self.bv_term(args[1], bound))
        else:
            if h in INT_RELATIONS:
                self._arity(sx, 2)
                return IntCmp(h, self.int_term(args[0], bound), self.int_term(args[1], bound))
        raise ParseError(f"unknown predicate {h!r}", _pos(sx))

    def _quant(self, sx, kind, side, bound):
        self._arity(sx, 2)
        binders = sx[1]
        if not isinstance(binders, SList) or not binders:
            raise ParseError("quantifier needs a non-empty binder list", _pos(sx))
        if side == "bv":
            names = []
            for b in binders:
                if not isinstance(b, Atom):
                    raise ParseError("bit-vector binders are plain declared names", _pos(sx))
                leaf = self.symbols.get(b.text)
                if leaf is None:
                    raise ParseError(f"undeclared symbol {b.text!r}", b.pos)
                if isinstance(leaf, Sym) and not leaf.is_var:
                    raise ParseError(f"cannot quantify symbolic constant {b.text!r}", b.pos)
                names.append(leaf)
            return Quant(kind, tuple(names), self.formula(sx[2], side, bound))
        names = []
        for b in binders:
            if (
                not isinstance(b, SList)
                or len(b) != 2
                or not isinstance(b[0], Atom)
                or not isinstance(b[1], Atom)
                or b[1].text != "Int"
            ):
                raise ParseError("integer binders have the form (name Int)", _pos(sx))
            names.append(b[0].text)
        return Quant(kind, tuple(names), self.formula(sx[2], side, bound | set(names)))

    @staticmethod
    def _arity(sx, n):
        if len(sx) - 1 != n:
            raise ParseError(f"{_head(sx)} expects {n} arguments, got {len(sx) - 1}", _pos(sx))

    # -- bit-vector terms -------------------------------------------------

    def bv_term(self, sx, bound=frozenset()):
        if isinstance(sx, Atom):
            lit = parse_bv_literal(sx.text)
            if lit is not None:
                return lit
            leaf = self.symbols.get(sx.text)
            if leaf is None:
                raise ParseError(f"undeclared symbol {sx.text!r}", sx.pos)
            return leaf
        if len(sx) == 3 and _head(sx) == "_":
            # (_ bvN W)
            name, width = sx[1], sx[2]
            if (
                isinstance(name, Atom)
                and name.text.startswith("bv")
                and _NUMERAL.fullmatch(name.text[2:])
                and isinstance(width, Atom)
                and _NUMERAL.fullmatch(width.text)
            ):
                w = int(width.text)
                v = int(name.text[2:])
                if w <= 0 or v >= 1 << w:
                    raise ParseError(f"constant {v} does not fit width {w}", _pos(sx))
                return BvConst(v, w)
            raise ParseError("malformed indexed constant", _pos(sx))
        if not sx:
            raise ParseError("empty application", _pos(sx))
        head = sx[0]
        if isinstance(head, SList):
            # ((_ extract u l) t)
            if (
                len(head) == 4
                and _head(head) == "_"
                and isinstance(head[1], Atom)
                and head[1].text == "extract"
                and all(isinstance(a, Atom) and _NUMERAL.fullmatch(a.text) for a in head[2:])
            ):
                if len(sx) != 2:
                    raise ParseError("extract takes one argument", _pos(sx))
                upper, lower = int(head[2].text), int(head[3].text)
                if lower > upper:
                    raise ParseError("extract bounds need l <= u", _pos(sx))
                return BvApp("extract", (self.bv_term(sx[1], bound),), (upper, lower))
            raise ParseError("unknown indexed operator", _pos(sx))
        op = head.text
        if op not in BV_FUNCTIONS or op == "extract":
            raise ParseError(f"unknown operator {op!r}", head.pos)
        n = BV_FUNCTIONS[op]
        if len(sx) - 1 != n:
            raise ParseError(f"{op} expects {n} arguments, got {len(sx) - 1}", head.pos)
        return BvApp(op, tuple(self.bv_term(a, bound) for a in sx[1:]))

    # -- integer terms ----------------------------------------------------

    def int_term(self, sx, bound=frozenset()):
        if isinstance(sx, Atom):
            if _NUMERAL.fullmatch(sx.text):
                return IntConst(int(sx.text))
            if sx.text in UF_ARITY or sx.text in INT_FUNCTIONS:
                raise ParseError(f"operator {sx.text!r} used as a value", sx.pos)
            if self.int_names is not None and sx.text not in self.int_names and sx.text not in bound:
                raise ParseError(f"undeclared integer symbol {sx.text!r}", sx.pos)
            return IntVar(sx.text)
        h = _head(sx)
        if h is None:
            raise ParseError("expected an integer operator", _pos(sx))
        args = sx[1:]
        if h == "ite":
            self._arity(sx, 3)
            return IntIte(
                self.formula(args[0], "int", bound),
                self.int_term(args[1], bound),
                self.int_term(args[2], bound),
            )
        if h == "-" and len(args) == 1 and isinstance(args[0], Atom) and _NUMERAL.fullmatch(args[0].text):
            value = int(args[0].text)
            if value != 0:
                return IntConst(-value)
        if h in UF_ARITY or h in INT_FUNCTIONS:
            try:
                return IntApp(h, tuple(self.int_term(a, bound) for a in args))
            except ValueError as exc:
                raise ParseError(str(exc), _pos(sx)) from None
        raise ParseError(f"unknown integer operator {h!r}", _pos(sx))


def parse_formula(text: str, symbols: dict | None = None, side: str = "bv"):
    return TermReader(symbols).formula(read_one(text), side)


def parse_bv_term(text: str, symbols: dict | None = None):
    return TermReader(symbols).bv_term(read_one(text))


def parse_int_term(text: str):
    return TermReader().int_term(read_one(text))


def parse_int_formula(text: str):
    return TermReader().formula(read_one(text), "int")


# --------------------------------------------------------------------------
# .pbv problems


def constant_symbol(value: int, width: int) -> Sym:
    return Sym(f"_bv{value}_{width}", SYMCONST)


def desugar_constants(phi, omega: WidthMap):
    """Replace concrete constants by symbolic constants with concrete widths."""
    found = {}
    for node in walk(phi):
        if isinstance(node, BvConst):
            found.setdefault(node, constant_symbol(node.value, node.width))
    if not found:
        return phi, omega
    new_w = {}
    new_v = {}
    for c, sym in found.items():
        existing = omega.lookup(sym.name)
        if existing is not None and existing != sym:
            raise DeclarationError(f"name {sym.name} is reserved for constants")
        new_w[sym] = IntConst(c.width)
        new_v[sym] = IntConst(c.value)
    return substitute_bv(phi, found), omega.extend(new_w, new_v)


def substitute_bv(e, mapping: dict):
    """Replace bit-vector leaves (or whole subterms) according to ``mapping``."""
    if e in mapping:
        return mapping[e]
    match e:
        case BvApp(op=op, args=args, params=ps):
            return BvApp(op, tuple(substitute_bv(a, mapping) for a in args), ps)
        case BvPred(op=op, lhs=l, rhs=r):
            return BvPred(op, substitute_bv(l, mapping), substitute_bv(r, mapping))
        case Not(arg=a):
            return Not(substitute_bv(a, mapping))
        case And(args=args):
            return And(tuple(substitute_bv(a, mapping) for a in args))
        case Or(args=args):
            return Or(tuple(substitute_bv(a, mapping) for a in args))
        case Implies(lhs=l, rhs=r):
            return Implies(substitute_bv(l, mapping), substitute_bv(r, mapping))
        case Iff(lhs=l, rhs=r):
            return Iff(substitute_bv(l, mapping), substitute_bv(r, mapping))
        case Quant(kind=k, bound=vs, body=b):
            # binders are renamed along with their occurrences
            return Quant(k, tuple(mapping.get(v, v) for v in vs), substitute_bv(b, mapping))
    return e


_IDENT = re.compile(r"[A-Za-z~!@$%^&*_+=<>.?/\-][0-9A-Za-z~!@$%^&*_+=<>.?/\-]*")
_RESERVED = set(BV_FUNCTIONS) | set(BV_RELATIONS) | set(UF_ARITY) | set(INT_FUNCTIONS) | {
    "not", "and", "or", "=>", "forall", "exists", "ite", "true", "false", "_", "Int",
}


def _identifier(atom, what: str) -> str:
    if not isinstance(atom, Atom) or not _IDENT.fullmatch(atom.text) or atom.text in _RESERVED:
        text = atom.text if isinstance(atom, Atom) else "(...)"
        raise ParseError(f"bad {what} name {text!r}", getattr(atom, "pos", None))
    return atom.text


def parse_pbv(text: str):
    """Read a ``.pbv`` problem.  Returns ``(formula, width_map)``."""
    widths: dict = {}
    values: dict = {}
    width_vars: list = []
    symbols: dict = {}
    asserts = []
    for cmd in read_all(text):
        h = _head(cmd)
        if h == "declare-width":
            if len(cmd) != 2:
                raise ParseError("declare-width takes one name", _pos(cmd))
            name = _identifier(cmd[1], "width")
            if name in width_vars or name in symbols:
                raise DeclarationError(f"duplicate symbol {name!r}", cmd[1].pos)
            width_vars.append(name)
        elif h == "declare-pbv":
            if len(cmd) < 4:
                raise ParseError("declare-pbv needs a name and :bits", _pos(cmd))
            name = _identifier(cmd[1], "symbol")
            if name in symbols or name in width_vars:
                raise DeclarationError(f"duplicate symbol {name!r}", cmd[1].pos)
            opts = {}
            rest = cmd[2:]
            if len(rest) % 2:
                raise ParseError("declare-pbv options come in :key value pairs", _pos(cmd))
            for key, val in zip(rest[::2], rest[1::2]):
                if not isinstance(key, Atom) or key.text not in (":bits", ":value"):
                    raise ParseError(f"unknown option {getattr(key, 'text', '(...)')!r}", _pos(cmd))
                if key.text in opts:
                    raise DeclarationError(f"repeated option {key.text}", key.pos)
                opts[key.text] = val
            if ":bits" not in opts:
                raise DeclarationError(f"{name} has no :bits", _pos(cmd))
            reader = TermReader(int_names=set(width_vars))
            kind = SYMCONST if ":value" in opts else VARIABLE
            sym = Sym(name, kind)
            widths[sym] = reader.int_term(opts[":bits"])
            if kind == SYMCONST:
                values[sym] = reader.int_term(opts[":value"])
            symbols[name] = sym
        elif h == "assert":
            if len(cmd) != 2:
                raise ParseError("assert takes one formula", _pos(cmd))
            asserts.append(TermReader(symbols).formula(cmd[1], "bv"))
        elif h in ("check-sat", "set-logic", "set-info", "set-option", "exit"):
            continue
        else:
            raise ParseError(f"unknown command {h!r}", _pos(cmd))
    if not asserts:
        phi = BoolConst(True)
    elif len(asserts) == 1:
        phi = asserts[0]
    else:
        phi = And(tuple(asserts))
    omega = WidthMap.build(widths, values, width_vars)
    return desugar_constants(phi, omega)


def pretty_pbv(phi, omega: WidthMap) -> str:
    """Render a problem in ``.pbv`` form; :func:`parse_pbv` reads it back."""
    lines = [f"(declare-width {w})" for w in omega.width_vars]
    for sym in omega.symbols:
        line = f"(declare-pbv {sym.name} :bits {pretty(omega.width(sym))}"
        if not sym.is_var:
            line += f" :value {pretty(omega.value(sym))}"
        lines.append(line + ")")
    lines.append(f"(assert {pretty(phi)})")
    return "\n".join(lines) + "\n"
