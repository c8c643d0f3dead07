"""Expression language for immersion components.

Grammar (whitespace is insignificant)::

    expr     := term (("+" | "-") term)*
    term     := unary (("*" | "/") unary)*
    unary    := "-" unary | power
    power    := atom ("^" exponent)?
    exponent := "-"* (INT | "(" exponent ")") ("^" exponent)?
    atom     := NUMBER | IDENT | IDENT "(" expr ")" | "(" expr ")"

``^`` binds tighter than unary minus, so ``-x^2`` is ``-(x^2)``, and it is
right-associative (``2^3^2`` is ``2^9``). Exponents must be integer literals.
Recognised functions are ``sin cos tan exp log sqrt``; ``pi`` and ``e`` are
predefined constants.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Mapping, Sequence, Union

import numpy as np

from .errors import LexError, ParseError
from .jet import Jet2

FUNCTIONS = ("sin", "cos", "tan", "exp", "log", "sqrt")
CONSTANTS = {"pi": math.pi, "e": math.e}
RESERVED = frozenset(FUNCTIONS) | frozenset(CONSTANTS)

# tokens ---------------------------------------------------------------------


@dataclass(frozen=True)
class Token:
    kind: str  # "num", "ident", "op", "lparen", "rparen", "comma"
    text: str
    offset: int  # byte offset into the UTF-8 source

    def __repr__(self):
        return f"{self.kind}:{self.text}@{self.offset}"


_NUMBER = re.compile(r"(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?")
_IDENT = re.compile(r"[A-Za-z_][A-Za-z_0-9]*")
_SINGLE = {"+": "op", "-": "op", "*": "op", "/": "op", "^": "op",
           "(": "lparen", ")": "rparen", ",": "comma"}


def tokenize(source: str) -> list[Token]:
    tokens = []
    i = 0
    byte = 0
    while i < len(source):
        c = source[i]
        if c.isspace():
            byte += len(c.encode())
            i += 1
            continue
        if c in _SINGLE:
            tokens.append(Token(_SINGLE[c], c, byte))
            i += 1
            byte += 1
            continue
        m = _NUMBER.match(source, i) if (c.isdigit() or c == ".") else None
        if m is None and c.isascii() and (c.isalpha() or c == "_"):
            m = _IDENT.match(source, i)
            kind = "ident"
        else:
            kind = "num"
        if m is None:
            raise LexError(f"unexpected character {c!r}", byte)
        text = m.group(0)
        tokens.append(Token(kind, text, byte))
        i = m.end()
        byte += len(text)
    return tokens


# AST --------------------------------------------------------------------------


@dataclass(frozen=True)
class Const:
    value: float


@dataclass(frozen=True)
class Param:
    name: str


@dataclass(frozen=True)
class Neg:
    arg: "ExprNode"


@dataclass(frozen=True)
class BinOp:
    op: str  # one of + - * /
    left: "ExprNode"
    right: "ExprNode"


@dataclass(frozen=True)
class Pow:
    base: "ExprNode"
    exponent: int


@dataclass(frozen=True)
class Call:
    fn: str
    arg: "ExprNode"


ExprNode = Union[Const, Param, Neg, BinOp, Pow, Call]


def parameters(node: ExprNode) -> set[str]:
    """Names of all parameters referenced by ``node``."""
    if isinstance(node, Param):
        return {node.name}
    if isinstance(node, Const):
        return set()
    if isinstance(node, BinOp):
        return parameters(node.left) | parameters(node.right)
    if isinstance(node, Neg):
        return parameters(node.arg)
    if isinstance(node, Pow):
        return parameters(node.base)
    return parameters(node.arg)


# parser ----------------------------------------------------------------------


class _Parser:
    def __init__(self, tokens: Sequence[Token], end: int):
        self.tokens = list(tokens)
        self.pos = 0
        self.end = end

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def offset(self):
        tok = self.peek()
        return tok.offset if tok is not None else self.end

    def at(self, text):
        tok = self.peek()
        return tok is not None and tok.text == text

    def advance(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, text):
        if not self.at(text):
            found = self.peek()
            what = repr(found.text) if found else "end of input"
            raise ParseError(f"expected {text!r}, found {what}", self.offset())
        return self.advance()

    def expr(self):
        node = self.term()
        while self.at("+") or self.at("-"):
            op = self.advance().text
            node = BinOp(op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.at("*") or self.at("/"):
            op = self.advance().text
            node = BinOp(op, node, self.unary())
        return node

    def unary(self):
        if self.at("-"):
            self.advance()
            return Neg(self.unary())
        return self.power()

    def power(self):
        base = self.atom()
        if self.at("^"):
            self.advance()
            return Pow(base, self.exponent())
        return base

    def exponent(self):
        sign = 1
        while self.at("-"):
            self.advance()
            sign = -sign
        tok = self.peek()
        if tok is not None and tok.kind == "lparen":
            self.advance()
            value = self.exponent()
            self.expect(")")
        elif tok is not None and tok.kind == "num" and tok.text.isdigit():
            self.advance()
            value = int(tok.text)
        else:
            raise ParseError("exponent must be an integer literal", self.offset())
        if self.at("^"):
            at = self.offset()
            self.advance()
            power = self.exponent()
            if power < 0:
                raise ParseError("exponent must be an integer literal", at)
            value = value**power
        return sign * value

    def atom(self):
        tok = self.peek()
        if tok is None:
            raise ParseError("unexpected end of input", self.end)
        if tok.kind == "num":
            self.advance()
            return Const(float(tok.text))
        if tok.kind == "lparen":
            self.advance()
            node = self.expr()
            self.expect(")")
            return node
        if tok.kind == "ident":
            self.advance()
            if self.at("("):
                if tok.text not in FUNCTIONS:
                    raise ParseError(f"unknown function {tok.text!r}", tok.offset)
                self.advance()
                arg = self.expr()
                if self.at(","):
                    raise ParseError(f"{tok.text} takes exactly one argument", self.offset())
                self.expect(")")
                return Call(tok.text, arg)
            if tok.text in FUNCTIONS:
                raise ParseError(f"function {tok.text!r} used without argument", tok.offset)
            if tok.text in CONSTANTS:
                return Const(CONSTANTS[tok.text])
            return Param(tok.text)
        raise ParseError(f"unexpected {tok.text!r}", tok.offset)


def parse(tokens: Sequence[Token], end: int | None = None) -> ExprNode:
    """Build an AST from ``tokens``; the whole sequence must be consumed."""
    if end is None:
        end = tokens[-1].offset + len(tokens[-1].text.encode()) if tokens else 0
    p = _Parser(tokens, end)
    node = p.expr()
    if p.peek() is not None:
        raise ParseError(f"unexpected {p.peek().text!r}", p.offset())
    return node


def parse_expression(source: str, params: Sequence[str] | None = None) -> ExprNode:
    """Tokenize and parse ``source``; optionally check every identifier is a parameter."""
    tokens = tokenize(source)
    node = parse(tokens, len(source.encode()))
    if params is not None:
        known = set(params)
        for tok in tokens:
            if tok.kind == "ident" and tok.text not in RESERVED and tok.text not in known:
                raise ParseError(f"unknown parameter {tok.text!r}", tok.offset)
    return node


# printing -------------------------------------------------------------------


def to_source(node: ExprNode) -> str:
    """Fully parenthesised source text that parses back to an equivalent tree."""
    if isinstance(node, Const):
        text = repr(float(node.value))
        if "inf" in text or "nan" in text:
            raise ValueError(f"cannot print non-finite constant {node.value}")
        return f"({text})" if math.copysign(1.0, node.value) < 0 else text
    if isinstance(node, Param):
        return node.name
    if isinstance(node, Neg):
        return f"(-{to_source(node.arg)})"
    if isinstance(node, BinOp):
        return f"({to_source(node.left)} {node.op} {to_source(node.right)})"
    if isinstance(node, Pow):
        return f"({to_source(node.base)}^({node.exponent}))"
    return f"{node.fn}({to_source(node.arg)})"


# evaluation -------------------------------------------------------------------

_JET_FN = {
    "sin": Jet2.sin, "cos": Jet2.cos, "tan": Jet2.tan,
    "exp": Jet2.exp, "log": Jet2.log, "sqrt": Jet2.sqrt,
}


def eval_jet(node: ExprNode, point: Mapping[str, object], params: Sequence[str] | None = None) -> Jet2:
    """Value, gradient and Hessian of ``node`` at ``point``.

    ``params`` fixes the order of the derivative axes; it defaults to the
    insertion order of ``point``. Entries of ``point`` may be arrays of a
    common shape, in which case the jet is batched over that shape.
    """
    if params is None:
        params = list(point)
    d = len(params)
    shape = np.broadcast_shapes(*(np.shape(point[p]) for p in params)) if d else ()
    seeds = {
        name: Jet2.variable(np.broadcast_to(np.asarray(point[name], dtype=float), shape), i, d)
        for i, name in enumerate(params)
    }

    def walk(n):
        if isinstance(n, Const):
            return Jet2.constant(n.value, d, shape)
        if isinstance(n, Param):
            try:
                return seeds[n.name]
            except KeyError:
                raise KeyError(f"parameter {n.name!r} is not bound") from None
        if isinstance(n, Neg):
            return -walk(n.arg)
        if isinstance(n, BinOp):
            a, b = walk(n.left), walk(n.right)
            if n.op == "+":
                return a + b
            if n.op == "-":
                return a - b
            if n.op == "*":
                return a * b
            return a / b
        if isinstance(n, Pow):
            return walk(n.base).ipow(n.exponent)
        return _JET_FN[n.fn](walk(n.arg))

    return walk(node)
