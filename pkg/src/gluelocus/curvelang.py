"""A tiny expression language for parametric curves and surfaces.

Maps are written as three comma-separated expressions in brackets, e.g.
``[cos(u), sin(u), u]`` or ``[0, 4*u^3 + v, 3*u^4]``.  Supported syntax:
decimal literals (with optional exponent), the variables ``u`` and ``v``,
the constants ``pi`` and ``sqrt2``, ``+ - * /``, ``^`` with a non-negative
integer exponent, unary minus, parentheses and the functions ``sin``,
``cos`` and ``sqrt``.  ``^`` binds tighter than unary minus, so ``-u^2`` is
``-(u^2)``.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Tuple, Union

import numpy as np

from . import jets
from .errors import ArityError, ParseError
from .jets import Jet, VecJet

K_MAX = 12
CONSTANTS = {"pi": math.pi, "sqrt2": math.sqrt(2.0)}
FUNCTIONS = ("sin", "cos", "sqrt")
VARIABLES = ("u", "v")


# -- AST ---------------------------------------------------------------------

@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Const:
    name: str


@dataclass(frozen=True)
class Neg:
    arg: "Expr"


@dataclass(frozen=True)
class Call:
    name: str
    arg: "Expr"


@dataclass(frozen=True)
class Bin:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Pow:
    base: "Expr"
    exponent: int


Expr = Union[Num, Var, Const, Neg, Call, Bin, Pow]


@dataclass(frozen=True)
class ParametricMap:
    components: Tuple[Expr, Expr, Expr]
    arity: str  # "curve" or "surface"

    def __str__(self):
        return to_source(self)


# -- tokenizer ---------------------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:(?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<ident>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^(),\[\]]))"
)


def _tokenize(source):
    tokens = []
    pos = 0
    while pos < len(source):
        if source[pos:].strip() == "":
            break
        m = _TOKEN.match(source, pos)
        if m is None or m.end() == pos:
            start = pos + (len(source[pos:]) - len(source[pos:].lstrip()))
            raise ParseError(f"unexpected character {source[start]!r}", start)
        kind = m.lastgroup
        text = m.group(kind)
        tokens.append((kind, text, m.start(kind)))
        pos = m.end()
    tokens.append(("end", "", len(source)))
    return tokens


_OPERAND_START = {"number", "identifier", "(", "-", "+"}


class _Parser:
    def __init__(self, source):
        self.source = source
        self.tokens = _tokenize(source)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, text):
        kind, value, offset = self.peek()
        if value != text or kind not in ("op",):
            raise ParseError(f"unexpected {_describe(self.peek())}", offset, {text})
        return self.advance()

    def parse_map(self):
        self.expect("[")
        comps = [self.parse_expr()]
        for _ in range(2):
            self.expect(",")
            comps.append(self.parse_expr())
        self.expect("]")
        kind, _, offset = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected {_describe(self.peek())}", offset, {"end of input"})
        return tuple(comps)

    def parse_single(self):
        expr = self.parse_expr()
        kind, _, offset = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected {_describe(self.peek())}", offset, {"end of input", "+", "-", "*", "/"})
        return expr

    def parse_expr(self):
        left = self.parse_term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.advance()[1]
            left = Bin(op, left, self.parse_term())
        return left

    def parse_term(self):
        left = self.parse_unary()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.advance()[1]
            left = Bin(op, left, self.parse_unary())
        return left

    def parse_unary(self):
        kind, value, _ = self.peek()
        if kind == "op" and value == "-":
            self.advance()
            return Neg(self.parse_unary())
        if kind == "op" and value == "+":
            self.advance()
            return self.parse_unary()
        return self.parse_power()

    def parse_power(self):
        base = self.parse_primary()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            self.advance()
            kind, value, offset = self.peek()
            if kind != "number" or not re.fullmatch(r"\d+", value):
                raise ParseError("exponent must be a non-negative integer literal", offset, {"integer"})
            self.advance()
            base = Pow(base, int(value))
        return base

    def parse_primary(self):
        kind, value, offset = self.peek()
        if kind == "number":
            self.advance()
            return Num(float(value))
        if kind == "ident":
            self.advance()
            if value in FUNCTIONS:
                self.expect("(")
                arg = self.parse_expr()
                self.expect(")")
                return Call(value, arg)
            if value in VARIABLES:
                return Var(value)
            if value in CONSTANTS:
                return Const(value)
            raise ParseError(f"unknown identifier {value!r}", offset, {"u", "v", "pi", "sqrt2", *FUNCTIONS})
        if kind == "op" and value == "(":
            self.advance()
            inner = self.parse_expr()
            self.expect(")")
            return inner
        raise ParseError(f"unexpected {_describe(self.peek())}", offset, _OPERAND_START)


def _describe(tok):
    kind, value, _ = tok
    return "end of input" if kind == "end" else repr(value)


def uses_variable(expr, name):
    if isinstance(expr, Var):
        return expr.name == name
    if isinstance(expr, (Neg, Call)):
        return uses_variable(expr.arg, name)
    if isinstance(expr, Bin):
        return uses_variable(expr.left, name) or uses_variable(expr.right, name)
    if isinstance(expr, Pow):
        return uses_variable(expr.base, name)
    return False


def _make_map(comps, arity):
    has_v = any(uses_variable(c, "v") for c in comps)
    if arity is None:
        arity = "surface" if has_v else "curve"
    if arity not in ("curve", "surface"):
        raise ValueError(f"arity must be 'curve' or 'surface', not {arity!r}")
    if arity == "curve" and has_v:
        raise ArityError("a curve map may only reference u")
    return ParametricMap(tuple(comps), arity)


def parse(source, arity=None):
    """Parse ``"[x, y, z]"`` (or a sequence of three strings) into a map.

    ``arity`` is ``"curve"``, ``"surface"`` or ``None`` to infer it from the
    presence of ``v``.
    """
    if not isinstance(source, str):
        parts = list(source)
        if len(parts) != 3:
            raise ParseError("a map needs exactly three components", 0, {"3 components"})
        return _make_map([parse_expr(p) for p in parts], arity)
    return _make_map(_Parser(source).parse_map(), arity)


def parse_expr(source):
    """Parse a single scalar expression."""
    return _Parser(source).parse_single()


# -- printing ----------------------------------------------------------------

def expr_to_source(expr):
    if isinstance(expr, Num):
        return repr(float(expr.value))
    if isinstance(expr, (Var, Const)):
        return expr.name
    if isinstance(expr, Neg):
        return f"(-{expr_to_source(expr.arg)})"
    if isinstance(expr, Call):
        return f"{expr.name}({expr_to_source(expr.arg)})"
    if isinstance(expr, Bin):
        return f"({expr_to_source(expr.left)} {expr.op} {expr_to_source(expr.right)})"
    if isinstance(expr, Pow):
        return f"{expr_to_source(expr.base)}^{expr.exponent}"
    raise TypeError(f"not an expression node: {expr!r}")


def to_source(pmap):
    """Canonical, fully parenthesised text of a map; ``parse`` inverts it."""
    return "[" + ", ".join(expr_to_source(c) for c in pmap.components) + "]"


# -- symbolic helpers --------------------------------------------------------

def _is_num(e, value=None):
    return isinstance(e, Num) and (value is None or e.value == value)


def _add(a, b):
    if _is_num(a, 0.0):
        return b
    if _is_num(b, 0.0):
        return a
    return Bin("+", a, b)


def _sub(a, b):
    if _is_num(b, 0.0):
        return a
    if _is_num(a, 0.0):
        return Neg(b)
    return Bin("-", a, b)


def _mul(a, b):
    if _is_num(a, 0.0) or _is_num(b, 0.0):
        return Num(0.0)
    if _is_num(a, 1.0):
        return b
    if _is_num(b, 1.0):
        return a
    return Bin("*", a, b)


def diff(expr, var):
    """Symbolic partial derivative of ``expr`` with respect to ``var``."""
    if isinstance(expr, (Num, Const)):
        return Num(0.0)
    if isinstance(expr, Var):
        return Num(1.0 if expr.name == var else 0.0)
    if isinstance(expr, Neg):
        d = diff(expr.arg, var)
        return Num(0.0) if _is_num(d, 0.0) else Neg(d)
    if isinstance(expr, Bin):
        dl, dr = diff(expr.left, var), diff(expr.right, var)
        if expr.op == "+":
            return _add(dl, dr)
        if expr.op == "-":
            return _sub(dl, dr)
        if expr.op == "*":
            return _add(_mul(dl, expr.right), _mul(expr.left, dr))
        if expr.op == "/":
            num = _sub(_mul(dl, expr.right), _mul(expr.left, dr))
            if _is_num(num, 0.0):
                return Num(0.0)
            return Bin("/", num, Pow(expr.right, 2))
    if isinstance(expr, Pow):
        n = expr.exponent
        if n == 0:
            return Num(0.0)
        db = diff(expr.base, var)
        inner = Num(1.0) if n == 1 else (expr.base if n == 2 else Pow(expr.base, n - 1))
        return _mul(_mul(Num(float(n)), inner), db)
    if isinstance(expr, Call):
        da = diff(expr.arg, var)
        if _is_num(da, 0.0):
            return Num(0.0)
        if expr.name == "sin":
            return _mul(Call("cos", expr.arg), da)
        if expr.name == "cos":
            return Neg(_mul(Call("sin", expr.arg), da))
        if expr.name == "sqrt":
            return Bin("/", da, Bin("*", Num(2.0), expr))
    raise TypeError(f"not an expression node: {expr!r}")


def partial(pmap, var):
    """The map of partial derivatives ``d pmap / d var``."""
    return ParametricMap(tuple(diff(c, var) for c in pmap.components), pmap.arity)


def substitute(expr, var, value):
    """Replace a variable by a numeric literal."""
    if isinstance(expr, Var):
        return Num(float(value)) if expr.name == var else expr
    if isinstance(expr, Neg):
        return Neg(substitute(expr.arg, var, value))
    if isinstance(expr, Call):
        return Call(expr.name, substitute(expr.arg, var, value))
    if isinstance(expr, Bin):
        return Bin(expr.op, substitute(expr.left, var, value), substitute(expr.right, var, value))
    if isinstance(expr, Pow):
        return Pow(substitute(expr.base, var, value), expr.exponent)
    return expr


def restrict(pmap, v0=0.0):
    """The curve ``u -> pmap(u, v0)``."""
    return ParametricMap(tuple(substitute(c, "v", v0) for c in pmap.components), "curve")


# -- evaluation --------------------------------------------------------------

def _eval(expr, env, lift):
    if isinstance(expr, Num):
        return lift(expr.value)
    if isinstance(expr, Const):
        return lift(CONSTANTS[expr.name])
    if isinstance(expr, Var):
        return env[expr.name]
    if isinstance(expr, Neg):
        return -_eval(expr.arg, env, lift)
    if isinstance(expr, Bin):
        a = _eval(expr.left, env, lift)
        b = _eval(expr.right, env, lift)
        if expr.op == "+":
            return a + b
        if expr.op == "-":
            return a - b
        if expr.op == "*":
            return a * b
        return a / b
    if isinstance(expr, Pow):
        return _eval(expr.base, env, lift) ** expr.exponent
    if isinstance(expr, Call):
        arg = _eval(expr.arg, env, lift)
        return env["__fns__"][expr.name](arg)
    raise TypeError(f"not an expression node: {expr!r}")


_JET_FNS = {"sin": jets.sin, "cos": jets.cos, "sqrt": jets.sqrt}


def _np_sqrt(x):
    with np.errstate(invalid="ignore"):
        return np.sqrt(x)


_FLOAT_FNS = {"sin": np.sin, "cos": np.cos, "sqrt": _np_sqrt}


def eval_expr_jet(expr, u0, v0=0.0, order=jets.DEFAULT_ORDER, wrt="u"):
    """Jet of a scalar expression along ``wrt`` with the other variable fixed."""
    if order > K_MAX:
        raise ValueError(f"jet order {order} exceeds K_MAX={K_MAX}")
    if wrt not in VARIABLES:
        raise ValueError("wrt must be 'u' or 'v'")
    u0 = np.asarray(u0, dtype=float)
    v0 = np.asarray(v0, dtype=float)
    moving, fixed = (u0, v0) if wrt == "u" else (v0, u0)
    batch = np.broadcast_shapes(moving.shape, fixed.shape)
    moving = np.broadcast_to(moving, batch)
    base = moving if moving.ndim else float(moving)
    var = Jet.variable(moving, order)
    var.base_point = base
    other = Jet.constant(np.broadcast_to(fixed, batch), order, base)

    def lift(c):
        return Jet.constant(np.full(batch, c), order, base)

    env = {wrt: var, ("v" if wrt == "u" else "u"): other, "__fns__": _JET_FNS}
    out = _eval(expr, env, lift)
    return out


def eval_jet(pmap, u0, v0=0.0, order=jets.DEFAULT_ORDER, wrt="u"):
    """Vector jet of ``pmap`` along ``wrt`` at ``(u0, v0)``; batched over arrays."""
    comps = [eval_expr_jet(c, u0, v0, order, wrt) for c in pmap.components]
    return VecJet.from_components(*comps)


def eval_expr(expr, u, v=0.0):
    """Plain float evaluation (no jets); broadcasts over numpy arrays."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    shape = np.broadcast_shapes(u.shape, v.shape)
    env = {"u": np.broadcast_to(u, shape), "v": np.broadcast_to(v, shape), "__fns__": _FLOAT_FNS}
    return np.broadcast_to(_eval(expr, env, lambda c: np.full(shape, c)), shape) * 1.0


def evaluate(pmap, u, v=0.0):
    """Point values of ``pmap``; result has shape ``(3, *batch)``."""
    return np.stack([eval_expr(c, u, v) for c in pmap.components])
