"""A small expression language for real functions of one variable.

Grammar (no implicit multiplication)::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | power
    power  := atom ('^' unary)?
    atom   := number | var | const | ident '(' expr (',' expr)? ')' | '(' expr ')'

so ``^`` binds tighter than unary minus (``-2^2 == -4``) and is right
associative, while ``+ - * /`` associate to the left.  ``pi`` and ``e`` are
folded to numeric constants at parse time.

Evaluation is vectorized over numpy arrays and raises :class:`DomainError`
as soon as any intermediate value stops being finite.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Callable, Tuple, Union

import numpy as np

from .errors import DomainError, ExprSyntaxError, UnknownIdentifier


@dataclass(frozen=True)
class Num:
    value: float

    def __post_init__(self):
        v = float(self.value)
        if not math.isfinite(v) or v < 0:
            # the grammar has no negative literals; negation is a Neg node
            raise ValueError(f"Num must hold a finite non-negative value, got {v}")
        object.__setattr__(self, "value", v)


@dataclass(frozen=True)
class Var:
    name: str = "x"


@dataclass(frozen=True)
class Neg:
    arg: "Node"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Call:
    name: str
    args: Tuple["Node", ...]


Node = Union[Num, Var, Neg, BinOp, Call]

FUNCTIONS = {
    "sin": 1,
    "cos": 1,
    "exp": 1,
    "log": 1,
    "sqrt": 1,
    "abs": 1,
    "min": 2,
    "max": 2,
}
CONSTANTS = {"pi": math.pi, "e": math.e}

_TOKEN = re.compile(
    r"\s*(?:"
    r"(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<op>[-+*/^(),])"
    r")"
)


@dataclass(frozen=True)
class _Tok:
    kind: str  # num | ident | op | end
    text: str
    offset: int


def _tokenize(text: str):
    pos = 0
    toks = []
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            toks.append(_Tok("end", "", len(text)))
            return toks
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            raise ExprSyntaxError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        toks.append(_Tok(kind, m.group(kind), m.start(kind)))
        pos = m.end()


class _Parser:
    def __init__(self, text: str, variable: str):
        self.toks = _tokenize(text)
        self.i = 0
        self.variable = variable

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def advance(self) -> _Tok:
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, text: str):
        if self.tok.text != text or self.tok.kind != "op":
            self.fail(repr(text))
        return self.advance()

    def fail(self, expected: str):
        t = self.tok
        found = "end of input" if t.kind == "end" else repr(t.text)
        raise ExprSyntaxError(f"unexpected {found}", t.offset, expected)

    def parse(self) -> Node:
        node = self.expr()
        if self.tok.kind != "end":
            self.fail("operator or end of input")
        return node

    def expr(self) -> Node:
        node = self.term()
        while self.tok.kind == "op" and self.tok.text in "+-":
            op = self.advance().text
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Node:
        node = self.unary()
        while self.tok.kind == "op" and self.tok.text in "*/":
            op = self.advance().text
            node = BinOp(op, node, self.unary())
        return node

    def unary(self) -> Node:
        if self.tok.kind == "op" and self.tok.text == "-":
            self.advance()
            return Neg(self.unary())
        return self.power()

    def power(self) -> Node:
        base = self.atom()
        if self.tok.kind == "op" and self.tok.text == "^":
            self.advance()
            return BinOp("^", base, self.unary())
        return base

    def atom(self) -> Node:
        t = self.tok
        if t.kind == "num":
            self.advance()
            return Num(float(t.text))
        if t.kind == "ident":
            self.advance()
            if t.text == self.variable:
                return Var(t.text)
            if t.text in FUNCTIONS:
                return self.call(t)
            if t.text in CONSTANTS:
                return Num(CONSTANTS[t.text])
            raise UnknownIdentifier(t.text, t.offset)
        if t.kind == "op" and t.text == "(":
            self.advance()
            node = self.expr()
            self.expect(")")
            return node
        self.fail("number, variable, function or '('")

    def call(self, name_tok: _Tok) -> Node:
        arity = FUNCTIONS[name_tok.text]
        self.expect("(")
        args = [self.expr()]
        while self.tok.kind == "op" and self.tok.text == ",":
            self.advance()
            args.append(self.expr())
        if len(args) != arity:
            raise ExprSyntaxError(
                f"{name_tok.text}() takes {arity} argument(s), got {len(args)}",
                name_tok.offset,
            )
        self.expect(")")
        return Call(name_tok.text, tuple(args))


def parse(text: str, variable: str = "x") -> Node:
    """Parse ``text`` into an AST in which ``variable`` is the free variable."""
    if not text or not text.strip():
        raise ExprSyntaxError("empty expression", 0, "an expression")
    return _Parser(text, variable).parse()


def to_text(node: Node) -> str:
    """Canonical, fully parenthesized text; ``parse(to_text(a)) == a``."""
    if isinstance(node, Num):
        return repr(node.value)
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Neg):
        return f"(-{to_text(node.arg)})"
    if isinstance(node, BinOp):
        return f"({to_text(node.left)} {node.op} {to_text(node.right)})"
    if isinstance(node, Call):
        return f"{node.name}({', '.join(to_text(a) for a in node.args)})"
    raise TypeError(f"not an expression node: {node!r}")


def _witness(x, mask) -> float:
    if np.ndim(mask) == 0:
        return float(np.ravel(x)[0])
    return float(np.broadcast_to(x, np.shape(mask))[mask][0])


def _check(value, what: str, x):
    bad = ~np.isfinite(value)
    if np.any(bad):
        raise DomainError(f"{what} is not finite at x={_witness(x, bad)!r}")
    return value


def _domain(mask, what: str, x):
    if np.any(mask):
        raise DomainError(f"{what} at x={_witness(x, mask)!r}")


def _eval(node: Node, x):
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Var):
        return x
    if isinstance(node, Neg):
        return -_eval(node.arg, x)
    if isinstance(node, BinOp):
        a = _eval(node.left, x)
        b = _eval(node.right, x)
        with np.errstate(all="ignore"):
            if node.op == "+":
                r = np.add(a, b)
            elif node.op == "-":
                r = np.subtract(a, b)
            elif node.op == "*":
                r = np.multiply(a, b)
            elif node.op == "/":
                r = np.divide(a, b)
                return _check(r, "division", x)
            else:
                r = np.power(np.asarray(a, dtype=float), b)
                return _check(r, "power", x)
        return _check(r, f"'{node.op}'", x)
    if isinstance(node, Call):
        args = [_eval(a, x) for a in node.args]
        name = node.name
        with np.errstate(all="ignore"):
            if name == "log":
                _domain(np.asarray(args[0]) <= 0, "log of non-positive value", x)
                r = np.log(args[0])
            elif name == "sqrt":
                _domain(np.asarray(args[0]) < 0, "sqrt of negative value", x)
                r = np.sqrt(args[0])
            elif name == "min":
                r = np.minimum(args[0], args[1])
            elif name == "max":
                r = np.maximum(args[0], args[1])
            else:
                r = getattr(np, name)(args[0])
        return _check(r, f"{name}()", x)
    raise TypeError(f"not an expression node: {node!r}")


def evaluate(node: Node, x):
    """Evaluate at a scalar (returns float) or elementwise over an array."""
    if np.ndim(x) == 0:
        return float(_eval(node, float(x)))
    x = np.asarray(x, dtype=float)
    return np.broadcast_to(np.asarray(_eval(node, x), dtype=float), x.shape).copy()


def compile_expr(node: Node) -> Callable:
    return lambda x: evaluate(node, x)


def is_constant(node: Node) -> bool:
    if isinstance(node, Num):
        return True
    if isinstance(node, Var):
        return False
    if isinstance(node, Neg):
        return is_constant(node.arg)
    if isinstance(node, BinOp):
        return is_constant(node.left) and is_constant(node.right)
    return all(is_constant(a) for a in node.args)
