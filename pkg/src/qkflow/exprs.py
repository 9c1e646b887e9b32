"""Restricted expression grammar for scenario files.

Coefficient functions are built from numbers, active-coordinate and
parameter names, ``+ - * / **`` and the functions exp, sin, cos, log, sqrt.
Expressions evaluate to order-2 jets so every scenario loaded from a file
gets exact derivatives, same as the built-ins.
"""

from __future__ import annotations

import re
from fractions import Fraction

from .scalars import Jet, jcos, jexp, jlog, jsin, jsqrt

_FUNCS = {"exp": jexp, "sin": jsin, "cos": jcos, "log": jlog, "sqrt": jsqrt}

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+(?:\.\d*)?(?:[eE][+-]?\d+)?|\.\d+)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>\*\*|[()+\-*/]))"
)


class ExprError(ValueError):
    pass


def tokenize(src: str) -> list[tuple[str, str]]:
    out = []
    pos = 0
    while pos < len(src):
        m = _TOKEN.match(src, pos)
        if m is None:
            raise ExprError(f"bad character at position {pos} in {src!r}")
        pos = m.end()
        for kind in ("num", "name", "op"):
            val = m.group(kind)
            if val is not None:
                out.append((kind, val))
                break
    return out


class Expr:
    """Parsed expression; evaluate with an environment of named jets."""

    def __init__(self, src: str):
        self.src = src
        self._tokens = tokenize(src)
        self._pos = 0
        self._ast = self._parse_sum()
        if self._pos != len(self._tokens):
            raise ExprError(f"trailing tokens in {src!r}")

    # recursive descent ------------------------------------------------

    def _peek(self):
        return self._tokens[self._pos] if self._pos < len(self._tokens) else (None, None)

    def _take(self, want=None):
        kind, val = self._peek()
        if kind is None or (want is not None and val != want):
            raise ExprError(f"expected {want!r} in {self.src!r}")
        self._pos += 1
        return kind, val

    def _parse_sum(self):
        node = self._parse_product()
        while self._peek() == ("op", "+") or self._peek() == ("op", "-"):
            _, op = self._take()
            rhs = self._parse_product()
            node = (op, node, rhs)
        return node

    def _parse_product(self):
        node = self._parse_power()
        while self._peek() == ("op", "*") or self._peek() == ("op", "/"):
            _, op = self._take()
            rhs = self._parse_power()
            node = (op, node, rhs)
        return node

    def _parse_power(self):
        node = self._parse_unary()
        if self._peek() == ("op", "**"):
            self._take()
            rhs = self._parse_power()
            node = ("**", node, rhs)
        return node

    def _parse_unary(self):
        if self._peek() == ("op", "-"):
            self._take()
            return ("neg", self._parse_unary())
        if self._peek() == ("op", "+"):
            self._take()
            return self._parse_unary()
        return self._parse_atom()

    def _parse_atom(self):
        kind, val = self._peek()
        if kind == "num":
            self._take()
            return ("num", val)
        if kind == "name":
            self._take()
            if self._peek() == ("op", "("):
                if val not in _FUNCS:
                    raise ExprError(f"unknown function {val!r} in {self.src!r}")
                self._take("(")
                arg = self._parse_sum()
                self._take(")")
                return ("call", val, arg)
            return ("var", val)
        if kind == "op" and val == "(":
            self._take()
            node = self._parse_sum()
            self._take(")")
            return node
        raise ExprError(f"unexpected token {val!r} in {self.src!r}")

    # evaluation ----------------------------------------------------------

    def names(self) -> set[str]:
        out: set[str] = set()

        def walk(node):
            tag = node[0]
            if tag == "var":
                out.add(node[1])
            elif tag == "num":
                pass
            elif tag == "neg":
                walk(node[1])
            elif tag == "call":
                walk(node[2])
            else:
                walk(node[1])
                walk(node[2])

        walk(self._ast)
        return out

    def evaluate(self, env: dict, exact: bool = False):
        def ev(node):
            tag = node[0]
            if tag == "num":
                text = node[1]
                if exact:
                    return Fraction(text)
                return float(text)
            if tag == "var":
                try:
                    return env[node[1]]
                except KeyError:
                    raise ExprError(f"unknown name {node[1]!r} in {self.src!r}") from None
            if tag == "neg":
                return -ev(node[1])
            if tag == "call":
                return _FUNCS[node[1]](ev(node[2]))
            a, b = ev(node[1]), ev(node[2])
            if tag == "+":
                return a + b
            if tag == "-":
                return a - b
            if tag == "*":
                return a * b
            if tag == "/":
                return a / b
            if tag == "**":
                if isinstance(b, Jet):
                    if any(x != 0 for x in b.lin) or any(x != 0 for x in b.quad):
                        raise ExprError("exponents must be constants")
                    b = b.val
                p = b
                if isinstance(p, float) and p.is_integer():
                    p = int(p)
                return a ** p
            raise ExprError(f"bad node {tag}")

        return ev(self._ast)
