"""Scalar expressions: parsing, printing, point and interval evaluation.

Grammar (``^`` binds tighter than unary minus, and is right-associative)::

    expr    = term   { ("+" | "-") term } ;
    term    = unary  { ("*" | "/") unary } ;
    unary   = "-" unary | power ;
    power   = atom [ "^" unary ] ;
    atom    = number | name | func "(" expr ")" | "(" expr ")" ;
    func    = "exp" | "log" | "sin" | "cos" | "sqrt" ;

So ``-a^2`` is ``-(a^2)`` and ``a^b^c`` is ``a^(b^c)``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .interval import Interval

UNARY_FUNCS = ("exp", "log", "sin", "cos", "sqrt")
BINARY_OPS = {"+": "add", "-": "sub", "*": "mul", "/": "div", "^": "pow"}
_SYMBOL = {v: k for k, v in BINARY_OPS.items()}


class ExprError(ValueError):
    pass


class ParseError(ExprError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class UnknownIdentifierError(ExprError):
    def __init__(self, name: str, position: int):
        super().__init__(f"unknown identifier {name!r} at position {position}")
        self.name = name
        self.position = position


class DomainError(ExprError):
    """An operator was applied outside its real domain."""


# ---------------------------------------------------------------------------
# AST


@dataclass(frozen=True)
class Const:
    value: float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Unary:
    op: str  # "neg" or one of UNARY_FUNCS
    arg: Node


@dataclass(frozen=True)
class Binary:
    op: str  # add, sub, mul, div, pow
    left: Node
    right: Node


Node = Const | Var | Unary | Binary


@dataclass(frozen=True)
class ExprAst:
    """A parsed expression together with the variable names it was declared over."""

    root: Node
    variables: tuple[str, ...]

    def __str__(self):
        return to_text(self.root)

    def used_variables(self) -> set[str]:
        return _collect_vars(self.root, set())


def _collect_vars(node: Node, out: set) -> set:
    if isinstance(node, Var):
        out.add(node.name)
    elif isinstance(node, Unary):
        _collect_vars(node.arg, out)
    elif isinstance(node, Binary):
        _collect_vars(node.left, out)
        _collect_vars(node.right, out)
    return out


# ---------------------------------------------------------------------------
# Tokenizer / parser

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^()])
    """,
    re.VERBOSE,
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        if kind != "ws":
            tokens.append((kind, m.group(), pos))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, variables: Sequence[str]):
        self.tokens = _tokenize(text)
        self.i = 0
        self.variables = set(variables)

    def peek(self):
        return self.tokens[self.i]

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value: str):
        kind, text, pos = self.advance()
        if text != value or kind != "op":
            found = "end of input" if kind == "end" else repr(text)
            raise ParseError(f"expected {value!r}, found {found}", pos)

    def parse(self) -> Node:
        node = self.expr()
        kind, text, pos = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected token {text!r}", pos)
        return node

    def expr(self) -> Node:
        node = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.advance()[1]
            node = Binary(BINARY_OPS[op], node, self.term())
        return node

    def term(self) -> Node:
        node = self.unary()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.advance()[1]
            node = Binary(BINARY_OPS[op], node, self.unary())
        return node

    def unary(self) -> Node:
        if self.peek()[:2] == ("op", "-"):
            self.advance()
            return Unary("neg", self.unary())
        return self.power()

    def power(self) -> Node:
        base = self.atom()
        if self.peek()[:2] == ("op", "^"):
            self.advance()
            return Binary("pow", base, self.unary())
        return base

    def atom(self) -> Node:
        kind, text, pos = self.advance()
        if kind == "num":
            return Const(float(text))
        if kind == "name":
            if text in UNARY_FUNCS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Unary(text, arg)
            if text not in self.variables:
                raise UnknownIdentifierError(text, pos)
            return Var(text)
        if (kind, text) == ("op", "("):
            node = self.expr()
            self.expect(")")
            return node
        found = "end of input" if kind == "end" else repr(text)
        raise ParseError(f"unexpected {found}", pos)


def parse(text: str, variables: Sequence[str]) -> ExprAst:
    """Parse ``text`` into an :class:`ExprAst` over the declared ``variables``.

    Raises :class:`ParseError` (with the offending position) on malformed
    input and :class:`UnknownIdentifierError` for names that are neither a
    declared variable nor a supported function call.
    """
    if not text or not text.strip():
        raise ParseError("empty expression", 0)
    return ExprAst(_Parser(text, variables).parse(), tuple(variables))


# ---------------------------------------------------------------------------
# Printer

_PREC = {"add": 1, "sub": 1, "mul": 2, "div": 2, "neg": 3, "pow": 4}


def _prec(node: Node) -> int:
    if isinstance(node, Binary):
        return _PREC[node.op]
    if isinstance(node, Unary) and node.op == "neg":
        return 3
    return 5


def _wrap(node: Node, cond: bool) -> str:
    s = to_text(node)
    return f"({s})" if cond else s


def to_text(node: Node) -> str:
    """Render a node with the minimum parentheses needed to re-parse it identically."""
    if isinstance(node, Const):
        return repr(node.value)
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Unary):
        if node.op == "neg":
            return "-" + _wrap(node.arg, _prec(node.arg) < 3)
        return f"{node.op}({to_text(node.arg)})"
    p = _PREC[node.op]
    if node.op == "pow":
        left = _wrap(node.left, _prec(node.left) <= p)
        right = _wrap(node.right, _prec(node.right) < 3)
        return f"{left}^{right}"
    left = _wrap(node.left, _prec(node.left) < p)
    right = _wrap(node.right, _prec(node.right) <= p)
    return f"{left} {_SYMBOL[node.op]} {right}"


# ---------------------------------------------------------------------------
# Evaluation


def _integer_exponent(node: Node) -> int | None:
    """Return the exponent if ``node`` is a literal integer (possibly negated)."""
    sign = 1
    while isinstance(node, Unary) and node.op == "neg":
        sign = -sign
        node = node.arg
    if isinstance(node, Const) and float(node.value).is_integer():
        return sign * int(node.value)
    return None


class _ScalarLib:
    exp = staticmethod(math.exp)
    log = staticmethod(math.log)
    sin = staticmethod(math.sin)
    cos = staticmethod(math.cos)
    sqrt = staticmethod(math.sqrt)
    any = staticmethod(bool)


class _ArrayLib:
    exp = staticmethod(np.exp)
    log = staticmethod(np.log)
    sin = staticmethod(np.sin)
    cos = staticmethod(np.cos)
    sqrt = staticmethod(np.sqrt)
    any = staticmethod(np.any)


def _evaluate(node: Node, env, lib):
    if isinstance(node, Const):
        return node.value
    if isinstance(node, Var):
        return env[node.name]
    if isinstance(node, Unary):
        x = _evaluate(node.arg, env, lib)
        if node.op == "neg":
            return -x
        if node.op == "log" and lib.any(x <= 0):
            raise DomainError("log of non-positive value")
        if node.op == "sqrt" and lib.any(x < 0):
            raise DomainError("sqrt of negative value")
        return getattr(lib, node.op)(x)
    x = _evaluate(node.left, env, lib)
    if node.op == "pow":
        n = _integer_exponent(node.right)
        if n is not None:
            if n < 0 and lib.any(x == 0):
                raise DomainError("zero raised to a negative power")
            return x**n
        y = _evaluate(node.right, env, lib)
        if lib.any(x <= 0):
            raise DomainError("real-exponent power of a non-positive base")
        return lib.exp(y * lib.log(x))
    y = _evaluate(node.right, env, lib)
    if node.op == "add":
        return x + y
    if node.op == "sub":
        return x - y
    if node.op == "mul":
        return x * y
    if lib.any(y == 0):
        raise DomainError("division by zero")
    return x / y


def _check_assignment(ast: ExprAst, assignment: Mapping):
    missing = ast.used_variables() - set(assignment)
    if missing:
        raise ExprError(f"no value for variable(s) {sorted(missing)}")


def eval_point(ast: ExprAst, assignment: Mapping[str, float]) -> float:
    """Evaluate at a real point. Raises :class:`DomainError` outside the real domain."""
    _check_assignment(ast, assignment)
    env = {k: float(v) for k, v in assignment.items()}
    try:
        return float(_evaluate(ast.root, env, _ScalarLib))
    except (OverflowError, ZeroDivisionError) as exc:
        raise DomainError(str(exc)) from exc


def eval_array(ast: ExprAst, assignment: Mapping[str, np.ndarray]) -> np.ndarray:
    """Vectorised :func:`eval_point`: every variable maps to an array of equal shape."""
    _check_assignment(ast, assignment)
    env = {k: np.asarray(v, dtype=float) for k, v in assignment.items()}
    shape = np.broadcast_shapes(*(a.shape for a in env.values())) if env else ()
    with np.errstate(over="raise", invalid="raise", divide="raise"):
        try:
            out = _evaluate(ast.root, env, _ArrayLib)
        except FloatingPointError as exc:
            raise DomainError(str(exc)) from exc
    return np.broadcast_to(np.asarray(out, dtype=float), shape).copy()


# ---------------------------------------------------------------------------
# Natural interval extension


def _imul(x: Interval, y: Interval) -> Interval:
    p = (x.lo * y.lo, x.lo * y.hi, x.hi * y.lo, x.hi * y.hi)
    return Interval(min(p), max(p))


def _idiv(x: Interval, y: Interval) -> Interval:
    if y.lo <= 0 <= y.hi:
        raise DomainError(f"division by interval {y} containing zero")
    return _imul(x, Interval(1.0 / y.hi, 1.0 / y.lo))


def _ipow_int(x: Interval, n: int) -> Interval:
    if n == 0:
        return Interval(1.0, 1.0)
    if n < 0:
        return _idiv(Interval(1.0, 1.0), _ipow_int(x, -n))
    a, b = x.lo**n, x.hi**n
    if n % 2:
        return Interval(a, b)
    if x.lo >= 0:
        return Interval(a, b)
    if x.hi <= 0:
        return Interval(b, a)
    return Interval(0.0, max(a, b))


def _hits(x: Interval, phase: float) -> bool:
    """True if ``phase + 2*pi*k`` lies in ``x`` for some integer k."""
    k = math.ceil((x.lo - phase) / (2 * math.pi))
    return phase + 2 * math.pi * k <= x.hi


def _iperiodic(x: Interval, fn, peak: float, trough: float) -> Interval:
    if x.width >= 2 * math.pi:
        return Interval(-1.0, 1.0)
    a, b = fn(x.lo), fn(x.hi)
    lo, hi = min(a, b), max(a, b)
    if _hits(x, peak):
        hi = 1.0
    if _hits(x, trough):
        lo = -1.0
    return Interval(lo, hi)


def _ieval(node: Node, env: Mapping[str, Interval]) -> Interval:
    if isinstance(node, Const):
        return Interval(node.value, node.value)
    if isinstance(node, Var):
        return env[node.name]
    if isinstance(node, Unary):
        x = _ieval(node.arg, env)
        op = node.op
        if op == "neg":
            return Interval(-x.hi, -x.lo)
        if op == "exp":
            return Interval(math.exp(x.lo), math.exp(x.hi))
        if op == "log":
            if x.lo <= 0:
                raise DomainError(f"log of interval {x} reaching non-positive values")
            return Interval(math.log(x.lo), math.log(x.hi))
        if op == "sqrt":
            if x.lo < 0:
                raise DomainError(f"sqrt of interval {x} reaching negative values")
            return Interval(math.sqrt(x.lo), math.sqrt(x.hi))
        if op == "sin":
            return _iperiodic(x, math.sin, math.pi / 2, -math.pi / 2)
        return _iperiodic(x, math.cos, 0.0, math.pi)
    x = _ieval(node.left, env)
    if node.op == "pow":
        n = _integer_exponent(node.right)
        if n is not None:
            return _ipow_int(x, n)
        y = _ieval(node.right, env)
        if x.lo <= 0:
            raise DomainError(f"real-exponent power of interval {x} reaching non-positive values")
        ln = Interval(math.log(x.lo), math.log(x.hi))
        t = _imul(y, ln)
        return Interval(math.exp(t.lo), math.exp(t.hi))
    y = _ieval(node.right, env)
    if node.op == "add":
        return Interval(x.lo + y.lo, x.hi + y.hi)
    if node.op == "sub":
        return Interval(x.lo - y.hi, x.hi - y.lo)
    if node.op == "mul":
        return _imul(x, y)
    return _idiv(x, y)


def eval_interval(ast: ExprAst, assignment: Mapping[str, Interval]) -> Interval:
    """Natural interval extension: each node evaluated with its interval counterpart.

    Plain floating point, no outward rounding.
    """
    _check_assignment(ast, assignment)
    try:
        return _ieval(ast.root, assignment)
    except OverflowError as exc:
        raise DomainError(str(exc)) from exc
