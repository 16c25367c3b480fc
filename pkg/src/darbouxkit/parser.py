"""Recursive-descent parser for the expression and operator grammar.

::

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := ('-' | '+') factor | base ('^' ['-'] integer)?
    base   := integer | 'x' | 'y' | ident jet-suffix? | 'Dx' | 'Dy'
            | 'exp(' expr ')' | 'ln(' expr ')'
            | 'diff(' expr (',' ('x' | 'y'))+ ')' | '(' expr ')'

``Dx`` and ``Dy`` are only meaningful in operator text.  There ``*`` is
operator composition, so ``Dx*x`` is ``x*Dx + 1``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Mapping

from . import expr as E

RESERVED = frozenset({"x", "y", "exp", "ln", "diff", "Dx", "Dy"})


class ParseError(ValueError):
    """Syntax error or unknown token; ``position`` is a 0-based offset."""

    def __init__(self, message: str, position: int, text: str = ""):
        super().__init__(f"{message} at position {position}")
        self.message = message
        self.position = position
        self.text = text


@dataclass(frozen=True)
class Node:
    """Parse-tree node.  ``op`` is one of num, var, jet, dop, neg, add, sub,
    mul, div, pow, exp, ln, diff; ``args`` holds children or leaf data."""

    op: str
    args: tuple
    pos: int = 0


_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+)|(?P<name>[A-Za-z][A-Za-z0-9]*(?:_[A-Za-z0-9]*)?)|(?P<sym>[-+*/^(),]))"
)


def tokenize(text: str) -> list:
    tokens = []
    pos = 0
    n = len(text)
    while pos < n:
        if text[pos].isspace():
            pos += 1
            continue
        match = _TOKEN.match(text, pos)
        if match is None or match.end() == pos:
            raise ParseError(f"unknown token {text[pos]!r}", pos, text)
        kind = match.lastgroup
        start = match.start(kind)
        tokens.append((kind, match.group(kind), start))
        pos = match.end()
    tokens.append(("end", "", n))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value: str):
        kind, val, pos = self.advance()
        if val != value or kind == "end":
            found = "end of input" if kind == "end" else repr(val)
            raise ParseError(f"expected {value!r}, found {found}", pos, self.text)

    def error(self, message: str, pos: int):
        return ParseError(message, pos, self.text)

    def parse(self) -> Node:
        node = self.expr()
        kind, val, pos = self.peek()
        if kind != "end":
            raise self.error(f"unexpected {val!r}", pos)
        return node

    def expr(self) -> Node:
        node = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "sym":
            _, val, pos = self.advance()
            node = Node("add" if val == "+" else "sub", (node, self.term()), pos)
        return node

    def term(self) -> Node:
        node = self.factor()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "sym":
            _, val, pos = self.advance()
            node = Node("mul" if val == "*" else "div", (node, self.factor()), pos)
        return node

    def factor(self) -> Node:
        kind, val, pos = self.peek()
        if kind == "sym" and val in ("-", "+"):
            self.advance()
            inner = self.factor()
            return Node("neg", (inner,), pos) if val == "-" else inner
        node = self.base()
        if self.peek()[1] == "^" and self.peek()[0] == "sym":
            _, _, ppos = self.advance()
            sign = 1
            if self.peek()[1] == "-":
                self.advance()
                sign = -1
            kind, val, npos = self.advance()
            if kind != "num":
                raise self.error("exponent must be an integer", npos)
            node = Node("pow", (node, sign * int(val)), ppos)
        return node

    def base(self) -> Node:
        kind, val, pos = self.advance()
        if kind == "num":
            return Node("num", (Fraction(int(val)),), pos)
        if kind == "sym" and val == "(":
            node = self.expr()
            self.expect(")")
            return node
        if kind == "name":
            if "_" in val:
                return self.jet_name(val, pos)
            if val in ("x", "y"):
                return Node("var", (val,), pos)
            if val in ("Dx", "Dy"):
                return Node("dop", (val[1],), pos)
            if val in ("exp", "ln"):
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Node(val, (arg,), pos)
            if val == "diff":
                self.expect("(")
                arg = self.expr()
                variables = []
                while self.peek()[1] == ",":
                    self.advance()
                    vkind, vval, vpos = self.advance()
                    if vval not in ("x", "y"):
                        raise self.error(f"diff variable must be x or y, found {vval!r}", vpos)
                    variables.append(vval)
                if not variables:
                    raise self.error("diff needs at least one variable", self.peek()[2])
                self.expect(")")
                return Node("diff", (arg, tuple(variables)), pos)
            return Node("jet", (val, 0, 0), pos)
        if kind == "end":
            raise self.error("unexpected end of input", pos)
        raise self.error(f"unexpected {val!r}", pos)

    def jet_name(self, val: str, pos: int) -> Node:
        head, _, suffix = val.partition("_")
        if head in RESERVED:
            raise self.error(f"reserved word {head!r} cannot carry a jet suffix", pos)
        if not suffix or set(suffix) - {"x", "y"}:
            raise self.error(f"unknown token {val!r}: jet suffix must be x/y letters", pos)
        return Node("jet", (head, suffix.count("x"), suffix.count("y")), pos)


def parse_tree(text: str) -> Node:
    """Parse ``text`` into a :class:`Node` tree without evaluating it."""
    return _Parser(text).parse()


# --------------------------------------------------------------------------
# tree -> Expr


def build_expr(node: Node) -> E.Expr:
    op, args = node.op, node.args
    if op == "num":
        return E.const(args[0])
    if op == "var":
        return E.X if args[0] == "x" else E.Y
    if op == "jet":
        return E.jet(*args)
    if op == "dop":
        raise ParseError(f"operator D{args[0]} in a scalar expression", node.pos)
    if op == "neg":
        return -build_expr(args[0])
    if op in ("add", "sub", "mul", "div"):
        left, right = build_expr(args[0]), build_expr(args[1])
        if op == "add":
            return left + right
        if op == "sub":
            return left - right
        if op == "mul":
            return left * right
        return left / right
    if op == "pow":
        return build_expr(args[0]) ** args[1]
    if op == "exp":
        return E.exp(build_expr(args[0]))
    if op == "ln":
        return E.ln(build_expr(args[0]))
    if op == "diff":
        result = build_expr(args[0])
        for var in args[1]:
            result = E.diff(result, var)
        return result
    raise ValueError(f"unknown node {op!r}")


def parse(text: str) -> E.Expr:
    """Parse and normalize a scalar expression."""
    return build_expr(parse_tree(text))


# --------------------------------------------------------------------------
# tree -> LPDO


def build_operator(node: Node):
    from .lpdo import LPDO

    op, args = node.op, node.args
    if op == "dop":
        return LPDO.D(args[0])
    if op in ("num", "var", "jet", "exp", "ln", "diff"):
        return LPDO.scalar(build_expr(node))
    if op == "neg":
        return -build_operator(args[0])
    if op in ("add", "sub", "mul", "div"):
        left, right = build_operator(args[0]), build_operator(args[1])
        if op == "add":
            return left + right
        if op == "sub":
            return left - right
        if op == "mul":
            return left.compose(right)
        if right.order > 0:
            raise ParseError("can only divide an operator by a function", node.pos)
        return left.compose(LPDO.scalar(right.coeff(0, 0).reciprocal()))
    if op == "pow":
        base = build_operator(args[0])
        if args[1] < 0:
            if base.order > 0:
                raise ParseError("negative power of a differential operator", node.pos)
            return LPDO.scalar(base.coeff(0, 0) ** args[1])
        result = LPDO.scalar(E.ONE)
        for _ in range(args[1]):
            result = result.compose(base)
        return result
    raise ValueError(f"unknown node {op!r}")


def parse_operator(text: str):
    """Parse operator text such as ``"Dx*Dy + a*Dx + b*Dy + c"``."""
    return build_operator(parse_tree(text))


# --------------------------------------------------------------------------
# independent rational evaluation (test oracle)


class EvaluationError(ArithmeticError):
    pass


def evaluate_tree(node: Node, point: Mapping[str, Fraction],
                  jet_value: Callable[[str, int, int], Fraction] | None = None) -> Fraction:
    """Evaluate a kernel-free, diff-free tree at a rational point.

    ``point`` maps ``"x"``, ``"y"`` and jet names (``"a_xy"``) to values;
    ``jet_value`` is consulted for jets missing from ``point``.  Raises
    :class:`EvaluationError` on a pole.
    """
    op, args = node.op, node.args
    if op == "num":
        return args[0]
    if op == "var":
        return Fraction(point[args[0]])
    if op == "jet":
        name = E.JetVar(*args).name
        if name in point:
            return Fraction(point[name])
        if jet_value is None:
            raise EvaluationError(f"no value for {name}")
        return Fraction(jet_value(*args))
    if op == "neg":
        return -evaluate_tree(args[0], point, jet_value)
    if op in ("add", "sub", "mul", "div"):
        a = evaluate_tree(args[0], point, jet_value)
        b = evaluate_tree(args[1], point, jet_value)
        if op == "add":
            return a + b
        if op == "sub":
            return a - b
        if op == "mul":
            return a * b
        if b == 0:
            raise EvaluationError("pole")
        return a / b
    if op == "pow":
        base = evaluate_tree(args[0], point, jet_value)
        if base == 0 and args[1] < 0:
            raise EvaluationError("pole")
        return base ** args[1]
    raise EvaluationError(f"cannot evaluate {op!r} exactly")


def tree_size(node: Node) -> int:
    return 1 + sum(tree_size(a) for a in node.args if isinstance(a, Node))


__all__ = [
    "ParseError",
    "EvaluationError",
    "Node",
    "RESERVED",
    "tokenize",
    "parse_tree",
    "parse",
    "build_expr",
    "parse_operator",
    "build_operator",
    "evaluate_tree",
    "tree_size",
]
