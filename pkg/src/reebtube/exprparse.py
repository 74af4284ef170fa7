"""Tiny arithmetic-expression grammar for structure definition files.

Supports +, -, *, /, ^ (right-associative), unary minus, parentheses, the
functions sin, cos, exp, sqrt, atan, the variables x, y, z, and the constant
pi. Compiles to a callable evaluating on numpy arrays.
"""
from __future__ import annotations

import math
import re
from typing import Callable

import numpy as np

_TOKEN = re.compile(r"\s*(?:(\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?|([A-Za-z_]\w*)|(.))")

_FUNCTIONS = {"sin": np.sin, "cos": np.cos, "exp": np.exp,
              "sqrt": np.sqrt, "atan": np.arctan}
_CONSTANTS = {"pi": math.pi}
_VARIABLES = ("x", "y", "z")


class ExprError(ValueError):
    pass


def _tokenize(text: str):
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ExprError(f"bad character at position {pos}: {text[pos:]!r}")
        num, name, op = m.groups()
        if num is not None:
            out.append(("num", float(m.group(0))))
        elif name is not None:
            out.append(("name", name))
        elif op in "+-*/^()":
            out.append(("op", op))
        elif op.strip():
            raise ExprError(f"unexpected character {op!r}")
        pos = m.end()
    out.append(("end", ""))
    return out


class _Parser:
    def __init__(self, tokens):
        self.toks = tokens
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def next(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, op):
        kind, val = self.next()
        if kind != "op" or val != op:
            raise ExprError(f"expected {op!r}, found {val!r}")

    def parse(self):
        node = self.expr()
        if self.peek()[0] != "end":
            raise ExprError(f"trailing input near {self.peek()[1]!r}")
        return node

    def expr(self):
        node = self.term()
        while self.peek() == ("op", "+") or self.peek() == ("op", "-"):
            op = self.next()[1]
            rhs = self.term()
            node = (op, node, rhs)
        return node

    def term(self):
        node = self.power()
        while self.peek() == ("op", "*") or self.peek() == ("op", "/"):
            op = self.next()[1]
            rhs = self.power()
            node = (op, node, rhs)
        return node

    def power(self):
        base = self.unary()
        if self.peek() == ("op", "^"):
            self.next()
            return ("^", base, self.power())
        return base

    def unary(self):
        if self.peek() == ("op", "-"):
            self.next()
            return ("neg", self.unary())
        if self.peek() == ("op", "+"):
            self.next()
            return self.unary()
        return self.primary()

    def primary(self):
        kind, val = self.next()
        if kind == "num":
            return ("const", val)
        if kind == "name":
            if val in _FUNCTIONS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return ("call", val, arg)
            if val in _CONSTANTS:
                return ("const", _CONSTANTS[val])
            if val in _VARIABLES:
                return ("var", val)
            raise ExprError(f"unknown name {val!r}")
        if (kind, val) == ("op", "("):
            node = self.expr()
            self.expect(")")
            return node
        raise ExprError(f"unexpected token {val!r}")


def _evaluate(node, env):
    tag = node[0]
    if tag == "const":
        return node[1]
    if tag == "var":
        return env[node[1]]
    if tag == "neg":
        return -_evaluate(node[1], env)
    if tag == "call":
        return _FUNCTIONS[node[1]](_evaluate(node[2], env))
    a, b = _evaluate(node[1], env), _evaluate(node[2], env)
    if tag == "+":
        return a + b
    if tag == "-":
        return a - b
    if tag == "*":
        return a * b
    if tag == "/":
        return a / b
    if tag == "^":
        return a ** b
    raise ExprError(f"bad node {tag!r}")


def compile_expr(text: str) -> Callable:
    """Compile an expression in x, y, z to f(q) acting on a length-3 array."""
    node = _Parser(_tokenize(text)).parse()

    def fn(q):
        return _evaluate(node, {"x": q[0], "y": q[1], "z": q[2]})

    fn.source = text
    return fn


def compile_vector(components) -> Callable:
    """Compile three component expressions into q -> np.array of length 3."""
    fns = [compile_expr(c) for c in components]

    def vec(q):
        return np.array([f(q) for f in fns], dtype=float)

    vec.source = list(components)
    return vec
