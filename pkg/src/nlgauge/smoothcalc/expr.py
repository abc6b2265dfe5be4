"""Arithmetic expressions over chart coordinates.

Grammar (``^`` takes an integer exponent; unary minus binds tighter than ``^``)::

    expr   := term (("+" | "-") term)*
    term   := factor (("*" | "/") factor)*
    factor := base ("^" int)?
    base   := number | ident | func "(" expr ")" | "(" expr ")" | "-" base
    func   := "sin" | "cos" | "exp"
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable, Sequence, Union

from nlgauge.smoothcalc import dual

FUNCTIONS = {"sin": dual.sin, "cos": dual.cos, "exp": dual.exp}


class ExprError(ValueError):
    pass


class ExprSyntaxError(ExprError):
    def __init__(self, message: str, offset: int, source: str = ""):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset
        self.source = source


class UnknownIdentifierError(ExprError):
    def __init__(self, name: str, offset: int):
        super().__init__(f"unknown identifier {name!r} at offset {offset}")
        self.name = name
        self.offset = offset


# -- AST -------------------------------------------------------------------

@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Add:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Sub:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Mul:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Div:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Neg:
    operand: "Expr"


@dataclass(frozen=True)
class Pow:
    base: "Expr"
    exponent: int


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Expr"


Expr = Union[Num, Var, Add, Sub, Mul, Div, Neg, Pow, Call]


# -- lexer -----------------------------------------------------------------

_TOKEN = re.compile(
    r"(?P<ws>\s+)"
    r"|(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<op>[-+*/^()])"
)


def _tokenize(source: str):
    pos = 0
    out = []
    while pos < len(source):
        m = _TOKEN.match(source, pos)
        if m is None:
            raise ExprSyntaxError(f"unexpected character {source[pos]!r}", pos, source)
        kind = m.lastgroup
        if kind != "ws":
            out.append((kind, m.group(), pos))
        pos = m.end()
    out.append(("end", "", len(source)))
    return out


class _Parser:
    def __init__(self, source: str, labels: Sequence[str] | None):
        self.source = source
        self.toks = _tokenize(source)
        self.i = 0
        self.labels = None if labels is None else set(labels)

    def peek(self):
        return self.toks[self.i]

    def take(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def fail(self, message, tok=None):
        tok = tok or self.peek()
        what = "end of input" if tok[0] == "end" else repr(tok[1])
        raise ExprSyntaxError(f"{message}, found {what}", tok[2], self.source)

    def expect(self, text):
        tok = self.peek()
        if tok[1] != text or tok[0] != "op":
            self.fail(f"expected {text!r}")
        return self.take()

    def expr(self):
        node = self.term()
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            op = self.take()[1]
            rhs = self.term()
            node = Add(node, rhs) if op == "+" else Sub(node, rhs)
        return node

    def term(self):
        node = self.factor()
        while self.peek()[0] == "op" and self.peek()[1] in "*/":
            op = self.take()[1]
            rhs = self.factor()
            node = Mul(node, rhs) if op == "*" else Div(node, rhs)
        return node

    def factor(self):
        node = self.base()
        if self.peek()[:2] == ("op", "^"):
            self.take()
            sign = 1
            if self.peek()[:2] == ("op", "-"):
                self.take()
                sign = -1
            tok = self.peek()
            if tok[0] != "num" or not tok[1].isdigit():
                self.fail("expected integer exponent")
            self.take()
            node = Pow(node, sign * int(tok[1]))
        return node

    def base(self):
        tok = self.peek()
        kind, text, pos = tok
        if kind == "num":
            self.take()
            return Num(float(text))
        if kind == "ident":
            self.take()
            if text in FUNCTIONS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Call(text, arg)
            if self.labels is not None and text not in self.labels:
                raise UnknownIdentifierError(text, pos)
            return Var(text)
        if kind == "op" and text == "(":
            self.take()
            node = self.expr()
            self.expect(")")
            return node
        if kind == "op" and text == "-":
            self.take()
            return Neg(self.base())
        self.fail("expected number, identifier, function or '('")


def parse_expr(source: str, chart=None) -> Expr:
    """Parse ``source``; identifiers must be labels of ``chart`` when one is given.

    ``chart`` may be a :class:`~nlgauge.smoothcalc.maps.Chart` or a plain list
    of labels.
    """
    if not source or not source.strip():
        raise ExprSyntaxError("empty expression", 0, source)
    labels = getattr(chart, "labels", chart)
    p = _Parser(source, labels)
    node = p.expr()
    if p.peek()[0] != "end":
        p.fail("unexpected trailing input")
    return node


# -- printing --------------------------------------------------------------

def _prec(node) -> int:
    if isinstance(node, (Add, Sub)):
        return 1
    if isinstance(node, (Mul, Div)):
        return 2
    if isinstance(node, Pow):
        return 3
    if isinstance(node, Neg):
        return 4
    return 5


def to_source(node: Expr) -> str:
    """Render ``node`` so that ``parse_expr(to_source(node)) == node``."""

    def wrap(child, min_prec):
        text = to_source(child)
        return f"({text})" if _prec(child) < min_prec else text

    if isinstance(node, Num):
        return repr(float(node.value))
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Add):
        return f"{wrap(node.left, 1)} + {wrap(node.right, 2)}"
    if isinstance(node, Sub):
        return f"{wrap(node.left, 1)} - {wrap(node.right, 2)}"
    if isinstance(node, Mul):
        return f"{wrap(node.left, 2)}*{wrap(node.right, 3)}"
    if isinstance(node, Div):
        return f"{wrap(node.left, 2)}/{wrap(node.right, 3)}"
    if isinstance(node, Pow):
        return f"{wrap(node.base, 4)}^{node.exponent}"
    if isinstance(node, Neg):
        return f"-{wrap(node.operand, 4)}"
    if isinstance(node, Call):
        return f"{node.func}({to_source(node.arg)})"
    raise TypeError(f"not an expression node: {node!r}")


# -- evaluation ------------------------------------------------------------

def compile_expr(node: Expr, labels: Sequence[str]) -> Callable:
    """Return ``fn(point)`` evaluating ``node`` with dual-aware arithmetic."""
    index = {name: i for i, name in enumerate(labels)}

    def build(n):
        if isinstance(n, Num):
            v = n.value
            return lambda x: v
        if isinstance(n, Var):
            if n.name not in index:
                raise UnknownIdentifierError(n.name, -1)
            k = index[n.name]
            return lambda x: x[k]
        if isinstance(n, Neg):
            f = build(n.operand)
            return lambda x: -f(x)
        if isinstance(n, Pow):
            f, e = build(n.base), n.exponent
            return lambda x: f(x) ** e
        if isinstance(n, Call):
            f, g = build(n.arg), FUNCTIONS[n.func]
            return lambda x: g(f(x))
        a, b = build(n.left), build(n.right)
        if isinstance(n, Add):
            return lambda x: a(x) + b(x)
        if isinstance(n, Sub):
            return lambda x: a(x) - b(x)
        if isinstance(n, Mul):
            return lambda x: a(x) * b(x)
        if isinstance(n, Div):
            return lambda x: a(x) / b(x)
        raise TypeError(f"not an expression node: {n!r}")

    return build(node)
