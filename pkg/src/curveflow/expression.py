"""Recursive-descent parser for forcing expressions.

Grammar (whitespace is insignificant)::

    expr     := term (('+' | '-') term)*
    term     := factor (('*' | '/') factor)*
    factor   := base ('^' integer)?
    base     := number | variable | '(' expr ')' | '-' base
    variable := 'S' | 'S_theta' | 'S_thetatheta' | 'kappa' | 'theta'
              | 'sin(theta)' | 'cos(theta)'

Note that ``-x^2`` reads as ``(-x)^2`` because negation binds at ``base``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Mapping, Union

import numpy as np

from .errors import ForcingSyntaxError, UnknownIdentifierError

__all__ = [
    "VARIABLES",
    "Num",
    "Var",
    "Neg",
    "BinOp",
    "Pow",
    "Node",
    "parse_expression",
    "evaluate",
    "evaluate_with_s_derivative",
    "variables_of",
    "unparse",
]

VARIABLES = ("S", "S_theta", "S_thetatheta", "kappa", "theta", "sin(theta)", "cos(theta)")
_PLAIN_NAMES = {"S", "S_theta", "S_thetatheta", "kappa", "theta"}


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
class Pow:
    base: "Node"
    exponent: int


Node = Union[Num, Var, Neg, BinOp, Pow]


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^()])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Token:
    kind: str  # 'num', 'ident', 'op', 'eof'
    text: str
    pos: int


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ForcingSyntaxError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        if kind != "ws":
            tokens.append(_Token(kind, m.group(), pos))
        pos = m.end()
    tokens.append(_Token("eof", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0

    @property
    def tok(self) -> _Token:
        return self.tokens[self.i]

    def _advance(self) -> _Token:
        t = self.tokens[self.i]
        self.i += 1
        return t

    def _expect(self, kind, text=None) -> _Token:
        t = self.tok
        if t.kind != kind or (text is not None and t.text != text):
            want = text if text is not None else kind
            got = "end of input" if t.kind == "eof" else repr(t.text)
            raise ForcingSyntaxError(f"expected {want!r}, found {got}", t.pos)
        return self._advance()

    def parse(self) -> Node:
        node = self.expr()
        if self.tok.kind != "eof":
            raise ForcingSyntaxError(f"unexpected {self.tok.text!r}", self.tok.pos)
        return node

    def expr(self) -> Node:
        node = self.term()
        while self.tok.kind == "op" and self.tok.text in "+-":
            op = self._advance().text
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Node:
        node = self.factor()
        while self.tok.kind == "op" and self.tok.text in "*/":
            op = self._advance().text
            node = BinOp(op, node, self.factor())
        return node

    def factor(self) -> Node:
        node = self.base()
        if self.tok.kind == "op" and self.tok.text == "^":
            self._advance()
            t = self.tok
            if t.kind != "num" or not t.text.isdigit():
                got = "end of input" if t.kind == "eof" else repr(t.text)
                raise ForcingSyntaxError(f"exponent must be a non-negative integer, found {got}", t.pos)
            self._advance()
            node = Pow(node, int(t.text))
        return node

    def base(self) -> Node:
        t = self.tok
        if t.kind == "num":
            self._advance()
            return Num(float(t.text))
        if t.kind == "ident":
            return self._variable()
        if t.kind == "op" and t.text == "(":
            self._advance()
            node = self.expr()
            self._expect("op", ")")
            return node
        if t.kind == "op" and t.text == "-":
            self._advance()
            return Neg(self.base())
        got = "end of input" if t.kind == "eof" else repr(t.text)
        raise ForcingSyntaxError(f"expected a number, variable or '(', found {got}", t.pos)

    def _variable(self) -> Node:
        t = self._advance()
        if t.text in _PLAIN_NAMES:
            return Var(t.text)
        if t.text in ("sin", "cos"):
            self._expect("op", "(")
            arg = self.tok
            if arg.kind != "ident" or arg.text != "theta":
                raise ForcingSyntaxError(f"{t.text}() only accepts theta", arg.pos)
            self._advance()
            self._expect("op", ")")
            return Var(f"{t.text}(theta)")
        raise UnknownIdentifierError(t.text, t.pos)


def parse_expression(text: str) -> Node:
    return _Parser(text).parse()


def variables_of(node: Node) -> set[str]:
    if isinstance(node, Var):
        return {node.name}
    if isinstance(node, Num):
        return set()
    if isinstance(node, Neg):
        return variables_of(node.operand)
    if isinstance(node, Pow):
        return variables_of(node.base)
    return variables_of(node.left) | variables_of(node.right)


def evaluate(node: Node, env: Mapping[str, np.ndarray]):
    """Evaluate ``node`` with numpy semantics; ``env`` maps variable names to arrays."""
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Var):
        return env[node.name]
    if isinstance(node, Neg):
        return -evaluate(node.operand, env)
    if isinstance(node, Pow):
        return evaluate(node.base, env) ** node.exponent
    a = evaluate(node.left, env)
    b = evaluate(node.right, env)
    if node.op == "+":
        return a + b
    if node.op == "-":
        return a - b
    if node.op == "*":
        return a * b
    return a / b


def evaluate_with_s_derivative(node: Node, env: Mapping[str, np.ndarray]):
    """Forward-mode evaluation returning ``(value, d value / d S)``.

    Every variable other than ``S`` is held fixed.
    """
    if isinstance(node, Num):
        return node.value, 0.0
    if isinstance(node, Var):
        return env[node.name], (1.0 if node.name == "S" else 0.0)
    if isinstance(node, Neg):
        v, d = evaluate_with_s_derivative(node.operand, env)
        return -v, -d
    if isinstance(node, Pow):
        v, d = evaluate_with_s_derivative(node.base, env)
        p = node.exponent
        if p == 0:
            return v ** 0, 0.0 * d
        return v ** p, p * v ** (p - 1) * d
    a, da = evaluate_with_s_derivative(node.left, env)
    b, db = evaluate_with_s_derivative(node.right, env)
    if node.op == "+":
        return a + b, da + db
    if node.op == "-":
        return a - b, da - db
    if node.op == "*":
        return a * b, da * b + a * db
    return a / b, (da * b - a * db) / (b * b)


def unparse(node: Node) -> str:
    """Fully parenthesised text that re-parses to an equal tree."""
    if isinstance(node, Num):
        return repr(node.value)
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Neg):
        return f"-({unparse(node.operand)})"
    if isinstance(node, Pow):
        return f"({unparse(node.base)})^{node.exponent}"
    return f"({unparse(node.left)} {node.op} {unparse(node.right)})"
