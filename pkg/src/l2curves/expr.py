"""Curvature-law expressions: a small recursive-descent parser and evaluator.

Grammar (``^`` is right-associative and binds tighter than unary minus,
so ``-2^2`` is -4 and ``2^-1`` is 0.5)::

    expr  := term (('+' | '-') term)*
    term  := unary (('*' | '/') unary)*
    unary := '-' unary | power
    power := atom ('^' unary)?
    atom  := number | ident | ident '(' expr ')' | '(' expr ')'

Identifiers are the law variable (``rho`` or ``v``) and the functions
exp, log, sinh, cosh, tanh and sqrt.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union

import numpy as np

from .quadrature import Variable

FUNCTIONS = {
    "exp": np.exp,
    "log": np.log,
    "sinh": np.sinh,
    "cosh": np.cosh,
    "tanh": np.tanh,
    "sqrt": np.sqrt,
}
VARIABLES = {"rho": Variable.RHO, "v": Variable.V}

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<ident>[A-Za-z_]\w*)|(?P<op>[-+*/^()]))"
)


class ExprError(ValueError):
    """A malformed expression; ``position`` is the 0-based column."""

    def __init__(self, message: str, position: int, source: str = ""):
        self.position = position
        self.source = source
        super().__init__(f"{message} at position {position}")


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Neg:
    operand: "Node"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Node"


Node = Union[Num, Var, Neg, BinOp, Call]


def _tokenize(source: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    n = len(source)
    while pos < n:
        if source[pos:].strip() == "":
            break
        m = _TOKEN.match(source, pos)
        if m is None:
            col = pos + len(source[pos:]) - len(source[pos:].lstrip())
            raise ExprError(f"unexpected character {source[col]!r}", col, source)
        kind = m.lastgroup
        tokens.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    tokens.append(("end", "", len(source)))
    return tokens


class _Parser:
    def __init__(self, source: str, variable: Variable):
        self.source = source
        self.variable = variable
        self.tokens = _tokenize(source)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def error(self, message: str, tok=None):
        tok = tok or self.peek()
        return ExprError(message, tok[2], self.source)

    def expect(self, text: str):
        tok = self.take()
        if tok[1] != text or tok[0] != "op":
            found = "end of input" if tok[0] == "end" else repr(tok[1])
            raise self.error(f"expected {text!r}, found {found}", tok)

    def parse(self) -> Node:
        if self.peek()[0] == "end":
            raise self.error("empty expression")
        node = self.expr()
        if self.peek()[0] != "end":
            raise self.error(f"unexpected {self.peek()[1]!r}")
        return node

    def expr(self) -> Node:
        node = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Node:
        node = self.unary()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.take()[1]
            node = BinOp(op, node, self.unary())
        return node

    def unary(self) -> Node:
        if self.peek()[0] == "op" and self.peek()[1] == "-":
            self.take()
            return Neg(self.unary())
        return self.power()

    def power(self) -> Node:
        base = self.atom()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            self.take()
            return BinOp("^", base, self.unary())
        return base

    def atom(self) -> Node:
        tok = self.take()
        kind, text, _ = tok
        if kind == "num":
            return Num(float(text))
        if kind == "ident":
            if text in FUNCTIONS:
                if self.peek()[1] != "(":
                    raise self.error(f"function {text} needs an argument in parentheses")
                self.take()
                arg = self.expr()
                self.expect(")")
                return Call(text, arg)
            if text in VARIABLES:
                if VARIABLES[text] is not self.variable:
                    raise self.error(
                        f"variable {text} is not allowed in a law of {self.variable.value}", tok)
                return Var(text)
            raise self.error(f"unknown identifier {text}", tok)
        if kind == "op" and text == "(":
            node = self.expr()
            self.expect(")")
            return node
        found = "end of input" if kind == "end" else repr(text)
        raise self.error(f"expected a number, identifier or '(', found {found}", tok)


def evaluate(node: Node, value):
    """Evaluate an expression tree elementwise at ``value`` (the law variable)."""
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Var):
        return value
    if isinstance(node, Neg):
        return -evaluate(node.operand, value)
    if isinstance(node, Call):
        return FUNCTIONS[node.func](evaluate(node.arg, value))
    a = evaluate(node.left, value)
    b = evaluate(node.right, value)
    if node.op == "+":
        return a + b
    if node.op == "-":
        return a - b
    if node.op == "*":
        return a * b
    if node.op == "/":
        return np.divide(a, b)
    return np.power(a, b)


@dataclass(frozen=True)
class KappaExpr:
    """A parsed curvature law kappa(rho) or kappa(v)."""

    source: str
    variable: Variable
    ast: Node

    def __call__(self, value):
        x = np.asarray(value, dtype=float)
        with np.errstate(all="ignore"):
            out = evaluate(self.ast, x)
        return np.asarray(out, dtype=float) * np.ones_like(x)


def parse_kappa(source: str, variable) -> KappaExpr:
    """Parse a curvature law in the given variable.

    Raises:
        ExprError: on a syntax error, an unknown identifier, or the other
            law variable.

    >>> parse_kappa("2 + 1/rho", "rho")(1.0)
    array(3.)
    """
    variable = Variable(variable)
    return KappaExpr(source, variable, _Parser(source, variable).parse())
