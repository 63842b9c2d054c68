"""Textual DSL for entire functions of one complex variable.

Grammar (``^`` binds tighter than unary minus)::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | power
    power  := atom ('^' exponent)?
    exponent := INT ('^' exponent)?
    atom   := NUMBER | 'i' | 'z' | FUNC '(' expr ')' | '(' expr ')'

Evaluation is vectorised over numpy arrays; scalar calls go through a
one-element array so that a point evaluated alone gives bit-for-bit the same
value as the same point inside a raster.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from typing import Union

import numpy as np

FUNCTIONS = ("sin", "cos", "exp", "sinh", "cosh")
_UFUNCS = {
    "sin": np.sin,
    "cos": np.cos,
    "exp": np.exp,
    "sinh": np.sinh,
    "cosh": np.cosh,
}


class ParseError(ValueError):
    """Lexing or parsing failure at a character offset of the source."""

    def __init__(self, position: int, message: str):
        super().__init__(f"{message} (at offset {position})")
        self.position = position
        self.message = message


class TokenKind(enum.Enum):
    NUMBER = "number"
    IDENTIFIER = "identifier"
    PLUS = "plus"
    MINUS = "minus"
    STAR = "star"
    SLASH = "slash"
    CARET = "caret"
    LPAREN = "lparen"
    RPAREN = "rparen"
    COMMA = "comma"


@dataclass(frozen=True)
class Token:
    kind: TokenKind
    lexeme: str
    position: int


_PUNCT = {
    "+": TokenKind.PLUS,
    "-": TokenKind.MINUS,
    "*": TokenKind.STAR,
    "/": TokenKind.SLASH,
    "^": TokenKind.CARET,
    "(": TokenKind.LPAREN,
    ")": TokenKind.RPAREN,
    ",": TokenKind.COMMA,
}
_NUMBER_RE = re.compile(r"(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?", re.ASCII)
_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z_0-9]*", re.ASCII)


def tokenize(source: str) -> list[Token]:
    tokens = []
    pos = 0
    n = len(source)
    while pos < n:
        ch = source[pos]
        if ch.isspace():
            pos += 1
            continue
        if ch in _PUNCT:
            tokens.append(Token(_PUNCT[ch], ch, pos))
            pos += 1
            continue
        m = _NUMBER_RE.match(source, pos)
        if m:
            tokens.append(Token(TokenKind.NUMBER, m.group(0), pos))
            pos = m.end()
            continue
        m = _IDENT_RE.match(source, pos)
        if m:
            tokens.append(Token(TokenKind.IDENTIFIER, m.group(0), pos))
            pos = m.end()
            continue
        raise ParseError(pos, f"illegal character {ch!r}")
    return tokens


# -- syntax tree -------------------------------------------------------------


@dataclass(frozen=True)
class Constant:
    value: complex


@dataclass(frozen=True)
class Variable:
    pass


@dataclass(frozen=True)
class Unary:
    function: str  # one of FUNCTIONS or "neg"
    child: "ExprNode"


@dataclass(frozen=True)
class Binary:
    operator: str  # add, sub, mul, div, pow
    left: "ExprNode"
    right: "ExprNode"

    def __post_init__(self):
        if self.operator == "pow":
            r = self.right
            ok = (
                isinstance(r, Constant)
                and r.value.imag == 0
                and r.value.real >= 0
                and float(r.value.real).is_integer()
            )
            if not ok:
                raise ValueError("pow exponent must be a nonnegative integer constant")


ExprNode = Union[Constant, Variable, Unary, Binary]

Z = Variable()

_BINOPS = {
    TokenKind.PLUS: "add",
    TokenKind.MINUS: "sub",
    TokenKind.STAR: "mul",
    TokenKind.SLASH: "div",
}


class _Parser:
    def __init__(self, source: str):
        self.source = source
        self.tokens = tokenize(source)
        self.i = 0

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def advance(self) -> Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def error(self, message: str, tok: Token | None = None) -> ParseError:
        pos = tok.position if tok is not None else len(self.source)
        return ParseError(pos, message)

    def expect(self, kind: TokenKind) -> Token:
        tok = self.peek()
        if tok is None or tok.kind is not kind:
            found = "end of input" if tok is None else repr(tok.lexeme)
            raise self.error(f"expected {kind.value}, found {found}", tok)
        return self.advance()

    def parse(self) -> ExprNode:
        if not self.tokens:
            raise self.error("empty expression")
        node = self.expr()
        tok = self.peek()
        if tok is not None:
            if tok.kind is TokenKind.RPAREN:
                raise self.error("unbalanced ')'", tok)
            raise self.error(f"unexpected {tok.lexeme!r}", tok)
        return node

    def expr(self) -> ExprNode:
        node = self.term()
        while (tok := self.peek()) is not None and tok.kind in (TokenKind.PLUS, TokenKind.MINUS):
            self.advance()
            node = Binary(_BINOPS[tok.kind], node, self.term())
        return node

    def term(self) -> ExprNode:
        node = self.unary()
        while (tok := self.peek()) is not None and tok.kind in (TokenKind.STAR, TokenKind.SLASH):
            self.advance()
            node = Binary(_BINOPS[tok.kind], node, self.unary())
        return node

    def unary(self) -> ExprNode:
        tok = self.peek()
        if tok is not None and tok.kind is TokenKind.MINUS:
            self.advance()
            return Unary("neg", self.unary())
        return self.power()

    def power(self) -> ExprNode:
        base = self.atom()
        tok = self.peek()
        if tok is not None and tok.kind is TokenKind.CARET:
            self.advance()
            return Binary("pow", base, Constant(complex(self.exponent())))
        return base

    def exponent(self) -> int:
        tok = self.peek()
        if tok is None:
            raise self.error("dangling '^'")
        if tok.kind is TokenKind.MINUS:
            raise self.error("negative exponent not allowed", tok)
        if tok.kind is not TokenKind.NUMBER:
            raise self.error("exponent must be a nonnegative integer literal", tok)
        self.advance()
        value = float(tok.lexeme)
        if not value.is_integer():
            raise self.error(f"non-integer exponent {tok.lexeme!r}", tok)
        value = int(value)
        nxt = self.peek()
        if nxt is not None and nxt.kind is TokenKind.CARET:
            self.advance()
            value = value ** self.exponent()
        return value

    def atom(self) -> ExprNode:
        tok = self.peek()
        if tok is None:
            raise self.error("unexpected end of input")
        if tok.kind is TokenKind.NUMBER:
            self.advance()
            return Constant(complex(float(tok.lexeme)))
        if tok.kind is TokenKind.LPAREN:
            self.advance()
            node = self.expr()
            if self.peek() is None:
                raise self.error("unclosed '('", tok)
            self.expect(TokenKind.RPAREN)
            return node
        if tok.kind is TokenKind.IDENTIFIER:
            self.advance()
            name = tok.lexeme
            if name == "z":
                return Z
            if name == "i":
                return Constant(1j)
            if name in FUNCTIONS:
                nxt = self.peek()
                if nxt is None or nxt.kind is not TokenKind.LPAREN:
                    raise self.error(f"function {name!r} requires parentheses", tok)
                lparen = self.advance()
                arg = self.expr()
                if self.peek() is None:
                    raise self.error("unclosed '('", lparen)
                self.expect(TokenKind.RPAREN)
                return Unary(name, arg)
            raise self.error(f"unknown identifier {name!r}", tok)
        raise self.error(f"unexpected {tok.lexeme!r}", tok)


def parse(source: str) -> ExprNode:
    """Parse DSL text into an immutable expression tree."""
    return _Parser(source).parse()


# -- evaluation --------------------------------------------------------------


def _ipow(base: np.ndarray, n: int) -> np.ndarray:
    result = np.ones_like(base)
    while n:
        if n & 1:
            result = result * base
        n >>= 1
        if n:
            base = base * base
    return result


def _eval(node: ExprNode, z: np.ndarray) -> np.ndarray:
    if isinstance(node, Variable):
        return z
    if isinstance(node, Constant):
        return np.full_like(z, node.value)
    if isinstance(node, Unary):
        child = _eval(node.child, z)
        if node.function == "neg":
            return -child
        return _UFUNCS[node.function](child)
    left = _eval(node.left, z)
    op = node.operator
    if op == "pow":
        return _ipow(left, int(node.right.value.real))
    right = _eval(node.right, z)
    if op == "add":
        return left + right
    if op == "sub":
        return left - right
    if op == "mul":
        return left * right
    return left / right


def evaluate_array(expr: ExprNode, z) -> np.ndarray:
    """Evaluate ``expr`` elementwise over a complex array; non-finite values propagate."""
    z = np.asarray(z, dtype=np.complex128)
    with np.errstate(all="ignore"):
        return _eval(expr, z)


def evaluate(expr: ExprNode, z: complex) -> complex:
    return complex(evaluate_array(expr, np.array([z], dtype=np.complex128))[0])


class ExprFunction:
    """Picklable callable wrapping an expression; accepts scalars or arrays."""

    def __init__(self, expr: ExprNode | str):
        self.expr = parse(expr) if isinstance(expr, str) else expr

    def __call__(self, z):
        if np.ndim(z) == 0:
            return evaluate(self.expr, z)
        return evaluate_array(self.expr, z)

    def __repr__(self):
        return f"ExprFunction({to_source(self.expr)!r})"


# -- printing ----------------------------------------------------------------

_PREC = {"add": 1, "sub": 1, "mul": 2, "div": 2, "neg": 3, "pow": 4}
_SYMBOL = {"add": "+", "sub": "-", "mul": "*", "div": "/"}


def _format_real(x: float) -> str:
    if float(x).is_integer() and abs(x) < 1e16:
        return str(int(x))
    return repr(float(x))


def _constant_source(c: complex) -> tuple[str, int]:
    # returns (text, precedence of the produced text)
    if c == 1j:
        return "i", 5
    if c.imag == 0:
        if c.real < 0 or (c.real == 0 and str(c.real).startswith("-")):
            return f"-{_format_real(-c.real)}", 3
        return _format_real(c.real), 5
    if c.real == 0:
        return f"{_format_real(c.imag)}*i", 2
    sign = "+" if c.imag >= 0 else "-"
    return f"{_format_real(c.real)}{sign}{_format_real(abs(c.imag))}*i", 1


def _src(node: ExprNode) -> tuple[str, int]:
    if isinstance(node, Variable):
        return "z", 5
    if isinstance(node, Constant):
        return _constant_source(node.value)
    if isinstance(node, Unary):
        inner, p = _src(node.child)
        if node.function == "neg":
            return "-" + (inner if p >= 3 else f"({inner})"), 3
        return f"{node.function}({inner})", 5
    if node.operator == "pow":
        base, p = _src(node.left)
        if p < 5:
            base = f"({base})"
        return f"{base}^{int(node.right.value.real)}", 4
    prec = _PREC[node.operator]
    left, lp = _src(node.left)
    right, rp = _src(node.right)
    if lp < prec:
        left = f"({left})"
    # left-associative: an equal-precedence right operand needs parentheses
    if rp <= prec:
        right = f"({right})"
    return f"{left}{_SYMBOL[node.operator]}{right}", prec


def to_source(expr: ExprNode) -> str:
    """Render ``expr`` as DSL text that parses back to an equal-valued tree."""
    return _src(expr)[0]


# -- constructors ------------------------------------------------------------


def substitute(expr: ExprNode, replacement: ExprNode) -> ExprNode:
    """Replace every occurrence of z in ``expr`` by ``replacement``."""
    if isinstance(expr, Variable):
        return replacement
    if isinstance(expr, Constant):
        return expr
    if isinstance(expr, Unary):
        return Unary(expr.function, substitute(expr.child, replacement))
    if expr.operator == "pow":
        return Binary("pow", substitute(expr.left, replacement), expr.right)
    return Binary(expr.operator, substitute(expr.left, replacement), substitute(expr.right, replacement))


def make_symmetric_from_odd(G: ExprNode | str, d: complex) -> ExprNode:
    """Build f(z) = d/2 + G(z - d/2).

    When G is odd the result satisfies f(d - z) = d - f(z), so f commutes
    with its reflection g = d - f.
    """
    if isinstance(G, str):
        G = parse(G)
    d = complex(d)
    if d == 0:
        return G
    half = Constant(d / 2)
    return Binary("add", half, substitute(G, Binary("sub", Z, half)))
