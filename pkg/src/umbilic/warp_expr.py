"""Warp expressions in one variable ``t``: parse, print, differentiate, evaluate.

Grammar, loosest binding first::

    expr    := term (('+' | '-') term)*
    term    := power (('*' | '/') power)*
    power   := unary (('^' | '**') ['-'] INTEGER)?
    unary   := '-' unary | primary
    primary := NUMBER | 't' | 'pi' | 'e' | FUNC '(' expr ')' | '(' expr ')'

Unary minus binds tighter than ``^``, so ``-t^2`` is ``(-t)^2``.  Exponents
are integer literals; general powers are written with ``exp``/``log``.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Callable, Union

from .errors import ExprDomainError, ExprSyntaxError, UnknownIdentifierError

__all__ = [
    "Const", "Var", "Neg", "BinOp", "Pow", "Call", "Expr",
    "parse_warp_expr", "to_text", "differentiate", "eval_ast", "compile_ast",
    "FUNCTIONS",
]


@dataclass(frozen=True)
class Const:
    value: float


@dataclass(frozen=True)
class Var:
    name: str = "t"


@dataclass(frozen=True)
class Neg:
    arg: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Pow:
    base: "Expr"
    exponent: int


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Expr"


Expr = Union[Const, Var, Neg, BinOp, Pow, Call]

FUNCTIONS = ("sin", "cos", "tan", "sinh", "cosh", "tanh", "exp", "log", "sqrt")
_ALIASES = {"ln": "log"}
_CONSTANTS = {"pi": math.pi, "e": math.e}

# --------------------------------------------------------------------------
# Parsing
# --------------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>\*\*|[-+*/^()])
    """,
    re.VERBOSE,
)


@dataclass
class _Token:
    kind: str
    text: str
    offset: int  # byte offset into the UTF-8 encoded source


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    pos = 0
    byte_pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ExprSyntaxError(f"unexpected character {text[pos]!r}", byte_pos)
        piece = m.group()
        if m.lastgroup != "ws":
            tokens.append(_Token(m.lastgroup, piece, byte_pos))
        pos = m.end()
        byte_pos += len(piece.encode("utf-8"))
    tokens.append(_Token("end", "", byte_pos))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0

    @property
    def tok(self) -> _Token:
        return self.tokens[self.i]

    def advance(self) -> _Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, text: str) -> None:
        if self.tok.text != text:
            found = self.tok.text or "end of input"
            raise ExprSyntaxError(f"expected {text!r}, found {found!r}", self.tok.offset)
        self.advance()

    def parse(self) -> Expr:
        node = self.expr()
        if self.tok.kind != "end":
            raise ExprSyntaxError(f"unexpected token {self.tok.text!r}", self.tok.offset)
        return node

    def expr(self) -> Expr:
        node = self.term()
        while self.tok.text in ("+", "-"):
            op = self.advance().text
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Expr:
        node = self.power()
        while self.tok.text in ("*", "/"):
            op = self.advance().text
            node = BinOp(op, node, self.power())
        return node

    def power(self) -> Expr:
        base = self.unary()
        if self.tok.text in ("^", "**"):
            self.advance()
            sign = 1
            if self.tok.text == "-":
                self.advance()
                sign = -1
            tok = self.tok
            if tok.kind != "num" or not tok.text.isdigit():
                raise ExprSyntaxError("integer exponent required", tok.offset)
            self.advance()
            return Pow(base, sign * int(tok.text))
        return base

    def unary(self) -> Expr:
        if self.tok.text == "-":
            self.advance()
            return Neg(self.unary())
        return self.primary()

    def primary(self) -> Expr:
        tok = self.tok
        if tok.kind == "num":
            self.advance()
            return Const(float(tok.text))
        if tok.kind == "ident":
            self.advance()
            name = _ALIASES.get(tok.text, tok.text)
            if name == "t":
                return Var()
            if name in _CONSTANTS:
                return Const(_CONSTANTS[name])
            if name in FUNCTIONS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Call(name, arg)
            raise UnknownIdentifierError(f"unknown identifier {tok.text!r}", tok.offset)
        if tok.text == "(":
            self.advance()
            node = self.expr()
            self.expect(")")
            return node
        found = tok.text or "end of input"
        raise ExprSyntaxError(f"unexpected token {found!r}", tok.offset)


def parse_warp_expr(text: str) -> Expr:
    """Parse ``text`` into an expression tree.

    Raises ExprSyntaxError (with ``offset``) on malformed input and
    UnknownIdentifierError on names other than ``t``, ``pi``, ``e`` and the
    supported functions.
    """
    if not text or not text.strip():
        raise ExprSyntaxError("empty expression", 0)
    return _Parser(text).parse()


# --------------------------------------------------------------------------
# Printing
# --------------------------------------------------------------------------

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}


def _prec(node: Expr) -> int:
    if isinstance(node, BinOp):
        return _PREC[node.op]
    if isinstance(node, Pow):
        return 3
    if isinstance(node, Neg):
        return 4
    return 5


def to_text(node: Expr) -> str:
    """Canonical infix text; ``parse_warp_expr(to_text(e))`` rebuilds ``e``
    for every tree the parser can produce."""
    if isinstance(node, Const):
        text = repr(float(node.value))
        return f"({text})" if node.value < 0 or text.startswith("-") else text
    if isinstance(node, Var):
        return "t"
    if isinstance(node, Call):
        return f"{node.func}({to_text(node.arg)})"
    if isinstance(node, Neg):
        inner = to_text(node.arg)
        return "-" + (f"({inner})" if _prec(node.arg) < 4 else inner)
    if isinstance(node, Pow):
        base = to_text(node.base)
        if _prec(node.base) < 4:
            base = f"({base})"
        return f"{base}^{node.exponent}"
    p = _PREC[node.op]
    left = to_text(node.left)
    right = to_text(node.right)
    if _prec(node.left) < p:
        left = f"({left})"
    if _prec(node.right) <= p:
        right = f"({right})"
    return f"{left} {node.op} {right}"


# --------------------------------------------------------------------------
# Differentiation
# --------------------------------------------------------------------------

_ZERO = Const(0.0)
_ONE = Const(1.0)


def _is(node: Expr, value: float) -> bool:
    return isinstance(node, Const) and node.value == value


def _add(a: Expr, b: Expr) -> Expr:
    if _is(a, 0.0):
        return b
    if _is(b, 0.0):
        return a
    return BinOp("+", a, b)


def _sub(a: Expr, b: Expr) -> Expr:
    if _is(b, 0.0):
        return a
    if _is(a, 0.0):
        return Neg(b)
    return BinOp("-", a, b)


def _mul(a: Expr, b: Expr) -> Expr:
    if _is(a, 0.0) or _is(b, 0.0):
        return _ZERO
    if _is(a, 1.0):
        return b
    if _is(b, 1.0):
        return a
    return BinOp("*", a, b)


def _div(a: Expr, b: Expr) -> Expr:
    if _is(a, 0.0):
        return _ZERO
    if _is(b, 1.0):
        return a
    return BinOp("/", a, b)


def _neg(a: Expr) -> Expr:
    return _ZERO if _is(a, 0.0) else Neg(a)


def differentiate(node: Expr) -> Expr:
    """Exact derivative with respect to ``t``.

    Only zeros and ones are folded; equivalence with a hand-written
    derivative is a matter of evaluation, not of tree shape.
    """
    if isinstance(node, Const):
        return _ZERO
    if isinstance(node, Var):
        return _ONE
    if isinstance(node, Neg):
        return _neg(differentiate(node.arg))
    if isinstance(node, BinOp):
        u, v = node.left, node.right
        du, dv = differentiate(u), differentiate(v)
        if node.op == "+":
            return _add(du, dv)
        if node.op == "-":
            return _sub(du, dv)
        if node.op == "*":
            return _add(_mul(du, v), _mul(u, dv))
        return _div(_sub(_mul(du, v), _mul(u, dv)), Pow(v, 2))
    if isinstance(node, Pow):
        n = node.exponent
        if n == 0:
            return _ZERO
        inner = _ONE if n == 1 else Pow(node.base, n - 1)
        return _mul(_mul(Const(float(n)), inner), differentiate(node.base))
    u = node.arg
    du = differentiate(u)
    f = node.func
    if f == "sin":
        outer = Call("cos", u)
    elif f == "cos":
        outer = Neg(Call("sin", u))
    elif f == "tan":
        return _div(du, Pow(Call("cos", u), 2))
    elif f == "sinh":
        outer = Call("cosh", u)
    elif f == "cosh":
        outer = Call("sinh", u)
    elif f == "tanh":
        return _div(du, Pow(Call("cosh", u), 2))
    elif f == "exp":
        outer = node
    elif f == "log":
        return _div(du, u)
    elif f == "sqrt":
        return _div(du, _mul(Const(2.0), node))
    else:  # pragma: no cover - parser rejects unknown functions
        raise ValueError(f"unknown function {f}")
    return _mul(outer, du)


# --------------------------------------------------------------------------
# Evaluation
# --------------------------------------------------------------------------

def _check(value: float, node: Expr) -> float:
    if not math.isfinite(value):
        raise ExprDomainError("non-finite value", to_text(node))
    return value


def _log(x, node):
    if x <= 0.0:
        raise ExprDomainError("log of non-positive argument", to_text(node))
    return math.log(x)


def _sqrt(x, node):
    if x < 0.0:
        raise ExprDomainError("sqrt of negative argument", to_text(node))
    return math.sqrt(x)


def _guard(fn):
    def wrapped(x, node):
        try:
            return fn(x)
        except (OverflowError, ValueError):
            raise ExprDomainError("argument out of range", to_text(node)) from None
    return wrapped


_FUNC_IMPL = {
    "sin": _guard(math.sin),
    "cos": _guard(math.cos),
    "tan": _guard(math.tan),
    "sinh": _guard(math.sinh),
    "cosh": _guard(math.cosh),
    "tanh": _guard(math.tanh),
    "exp": _guard(math.exp),
    "log": _log,
    "sqrt": _sqrt,
}


def compile_ast(node: Expr) -> Callable[[float], float]:
    """Turn a tree into a closure ``t -> value``; used on hot ODE paths."""
    if isinstance(node, Const):
        value = float(node.value)
        return lambda t: value
    if isinstance(node, Var):
        return lambda t: t
    if isinstance(node, Neg):
        arg = compile_ast(node.arg)
        return lambda t: -arg(t)
    if isinstance(node, Call):
        arg = compile_ast(node.arg)
        impl = _FUNC_IMPL[node.func]
        return lambda t: _check(impl(arg(t), node), node)
    if isinstance(node, Pow):
        base = compile_ast(node.base)
        n = node.exponent

        def power(t):
            b = base(t)
            if b == 0.0 and n < 0:
                raise ExprDomainError("zero raised to a negative power", to_text(node))
            try:
                return _check(b ** n, node)
            except OverflowError:
                raise ExprDomainError("overflow", to_text(node)) from None
        return power

    left = compile_ast(node.left)
    right = compile_ast(node.right)
    op = node.op
    if op == "+":
        return lambda t: _check(left(t) + right(t), node)
    if op == "-":
        return lambda t: _check(left(t) - right(t), node)
    if op == "*":
        return lambda t: _check(left(t) * right(t), node)

    def divide(t):
        d = right(t)
        if d == 0.0:
            raise ExprDomainError("division by zero", to_text(node))
        return _check(left(t) / d, node)
    return divide


def eval_ast(node: Expr, t: float) -> float:
    """Evaluate ``node`` at ``t``; domain violations raise ExprDomainError."""
    if not math.isfinite(t):
        raise ExprDomainError("non-finite t", to_text(node))
    return compile_ast(node)(float(t))
