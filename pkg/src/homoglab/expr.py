"""Small arithmetic expression language for scalar field components.

Grammar (operator precedence low to high):

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | atom
    atom   := NUMBER | 'pi' | VARIABLE | FUNC '(' expr (',' expr)* ')' | '(' expr ')'

Variables are restricted to ``r``, ``r1``..``r8``, ``tau``, ``u``,
``u1``..``u8`` and ``t``.  Functions: ``sin``, ``cos``, ``abs``, ``exp``,
``min``, ``max`` (two arguments each for min/max), ``frac`` (fractional
part, x - floor(x)) and ``tri`` (the 1-periodic triangle wave
|frac(x) - 1/2|).  There is no power operator and no user-defined
functions; everything needed by the field catalog is expressible with the
above.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

import numpy as np

__all__ = [
    "Expression",
    "ParseError",
    "EvalError",
    "parse",
    "evaluate",
    "unparse",
    "compile_expression",
    "compile_vector",
    "check_periodicity",
    "PeriodicityReport",
    "VARIABLES",
    "FUNCTIONS",
]

VARIABLES = frozenset(
    ["r", "tau", "u", "t"]
    + [f"r{i}" for i in range(1, 9)]
    + [f"u{i}" for i in range(1, 9)]
)

# function name -> arity
FUNCTIONS = {
    "sin": 1,
    "cos": 1,
    "abs": 1,
    "exp": 1,
    "min": 2,
    "max": 2,
    "frac": 1,
    "tri": 1,
}

_PERIODICITY_SEED = 1729


class ParseError(ValueError):
    """Syntax error carrying the byte offset and the expected-token set."""

    def __init__(self, message, offset, expected=()):
        self.offset = offset
        self.expected = tuple(expected)
        detail = f"{message} at offset {offset}"
        if expected:
            detail += " (expected: " + ", ".join(sorted(self.expected)) + ")"
        super().__init__(detail)


class EvalError(ArithmeticError):
    """Raised when evaluation cannot produce a finite real number."""


# ---------------------------------------------------------------------------
# AST


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Neg:
    arg: "Node"


@dataclass(frozen=True)
class BinOp:
    op: str
    lhs: "Node"
    rhs: "Node"


@dataclass(frozen=True)
class Call:
    fn: str
    args: tuple


Node = Num | Var | Neg | BinOp | Call


@dataclass(frozen=True)
class Expression:
    """Immutable parsed expression; safe to share across threads."""

    root: Node
    free_vars: frozenset
    source: str

    def __call__(self, **bindings):
        return evaluate(self, bindings)

    def text(self):
        return unparse(self)


# ---------------------------------------------------------------------------
# Tokenizer

_TOKEN_RE = re.compile(
    r"(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<ident>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/(),])"
)


@dataclass(frozen=True)
class _Token:
    kind: str  # "num" | "ident" | "op" | "end"
    text: str
    offset: int


def _tokenize(source):
    tokens = []
    pos = 0
    n = len(source)
    while pos < n:
        if source[pos].isspace():
            pos += 1
            continue
        m = _TOKEN_RE.match(source, pos)
        if m is None:
            raise ParseError(f"unexpected character {source[pos]!r}", pos)
        kind = m.lastgroup
        tokens.append(_Token(kind, m.group(), pos))
        pos = m.end()
    tokens.append(_Token("end", "", n))
    return tokens


# ---------------------------------------------------------------------------
# Parser

_ATOM_EXPECTED = ("number", "identifier", "'('", "'-'")


class _Parser:
    def __init__(self, source):
        self.source = source
        self.tokens = _tokenize(source)
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos]

    def advance(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect_op(self, op):
        tok = self.peek()
        if tok.kind == "op" and tok.text == op:
            return self.advance()
        raise ParseError("syntax error", tok.offset, (f"'{op}'",))

    def parse(self):
        node = self.expr()
        tok = self.peek()
        if tok.kind != "end":
            raise ParseError("trailing input", tok.offset, ("end of input",))
        return node

    def expr(self):
        node = self.term()
        while True:
            tok = self.peek()
            if tok.kind == "op" and tok.text in "+-":
                self.advance()
                node = BinOp(tok.text, node, self.term())
            else:
                return node

    def term(self):
        node = self.unary()
        while True:
            tok = self.peek()
            if tok.kind == "op" and tok.text in "*/":
                self.advance()
                node = BinOp(tok.text, node, self.unary())
            else:
                return node

    def unary(self):
        tok = self.peek()
        if tok.kind == "op" and tok.text == "-":
            self.advance()
            return Neg(self.unary())
        return self.atom()

    def atom(self):
        tok = self.peek()
        if tok.kind == "num":
            self.advance()
            return Num(float(tok.text))
        if tok.kind == "ident":
            self.advance()
            name = tok.text
            if name == "pi":
                return Num(math.pi)
            if name in FUNCTIONS:
                self.expect_op("(")
                args = [self.expr()]
                while True:
                    nxt = self.peek()
                    if nxt.kind == "op" and nxt.text == ",":
                        self.advance()
                        args.append(self.expr())
                    else:
                        break
                self.expect_op(")")
                arity = FUNCTIONS[name]
                if len(args) != arity:
                    raise ParseError(
                        f"function '{name}' takes {arity} argument(s), got {len(args)}",
                        tok.offset,
                    )
                return Call(name, tuple(args))
            if name in VARIABLES:
                return Var(name)
            raise ParseError(f"unknown identifier '{name}'", tok.offset)
        if tok.kind == "op" and tok.text == "(":
            self.advance()
            node = self.expr()
            self.expect_op(")")
            return node
        raise ParseError("syntax error", tok.offset, _ATOM_EXPECTED)


def _collect_vars(node, out):
    if isinstance(node, Var):
        out.add(node.name)
    elif isinstance(node, Neg):
        _collect_vars(node.arg, out)
    elif isinstance(node, BinOp):
        _collect_vars(node.lhs, out)
        _collect_vars(node.rhs, out)
    elif isinstance(node, Call):
        for a in node.args:
            _collect_vars(a, out)


def parse(source):
    """Parse ``source`` into an :class:`Expression`.

    Raises :class:`ParseError` (with byte offset) on malformed input,
    unknown identifiers or wrong function arity.
    """
    root = _Parser(source).parse()
    free = set()
    _collect_vars(root, free)
    return Expression(root=root, free_vars=frozenset(free), source=source)


def as_expression(obj):
    """Coerce a string or Expression to an Expression."""
    if isinstance(obj, Expression):
        return obj
    return parse(obj)


# ---------------------------------------------------------------------------
# Evaluation

def _frac(x):
    return x - math.floor(x)


def _tri(x):
    return abs(x - math.floor(x) - 0.5)


_FUNC_IMPL = {
    "sin": math.sin,
    "cos": math.cos,
    "abs": abs,
    "exp": math.exp,
    "min": min,
    "max": max,
    "frac": _frac,
    "tri": _tri,
}


def _eval_node(node, bindings):
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Var):
        try:
            val = float(bindings[node.name])
        except KeyError:
            raise EvalError(f"missing binding for variable '{node.name}'") from None
        if not math.isfinite(val):
            raise EvalError(f"non-finite binding for variable '{node.name}'")
        return val
    if isinstance(node, Neg):
        return -_eval_node(node.arg, bindings)
    if isinstance(node, BinOp):
        lhs = _eval_node(node.lhs, bindings)
        rhs = _eval_node(node.rhs, bindings)
        if node.op == "+":
            out = lhs + rhs
        elif node.op == "-":
            out = lhs - rhs
        elif node.op == "*":
            out = lhs * rhs
        else:
            if rhs == 0.0:
                raise EvalError("division by zero")
            out = lhs / rhs
        if not math.isfinite(out):
            raise EvalError(f"non-finite result from '{node.op}'")
        return out
    # Call
    args = [_eval_node(a, bindings) for a in node.args]
    try:
        out = _FUNC_IMPL[node.fn](*args)
    except (OverflowError, ValueError) as exc:
        raise EvalError(f"'{node.fn}' failed: {exc}") from None
    if not math.isfinite(out):
        raise EvalError(f"non-finite result from '{node.fn}'")
    return out


def evaluate(expr, bindings):
    """IEEE-754 double evaluation of ``expr`` under ``bindings``.

    Division by zero, overflow and non-finite intermediates raise
    :class:`EvalError` instead of silently producing inf/nan.
    """
    return _eval_node(expr.root, bindings)


# ---------------------------------------------------------------------------
# Pretty printing (canonical, fully parenthesized; reparses to the same AST)


def _emit(node):
    if isinstance(node, Num):
        return repr(node.value)
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Neg):
        return f"(-{_emit(node.arg)})"
    if isinstance(node, BinOp):
        return f"({_emit(node.lhs)} {node.op} {_emit(node.rhs)})"
    return f"{node.fn}({', '.join(_emit(a) for a in node.args)})"


def unparse(expr):
    return _emit(expr.root)


# ---------------------------------------------------------------------------
# Compilation (fast scalar callables for integrator hot loops, and
# numpy-vectorized callables for grid sampling)

_SCALAR_NS = {
    "__builtins__": {},
    "_sin": math.sin,
    "_cos": math.cos,
    "_abs": abs,
    "_exp": math.exp,
    "_min": min,
    "_max": max,
    "_frac": _frac,
    "_tri": _tri,
}

_VECTOR_NS = {
    "__builtins__": {},
    "_sin": np.sin,
    "_cos": np.cos,
    "_abs": np.abs,
    "_exp": np.exp,
    "_min": np.minimum,
    "_max": np.maximum,
    "_frac": lambda x: x - np.floor(x),
    "_tri": lambda x: np.abs(x - np.floor(x) - 0.5),
}


def _emit_compiled(node):
    if isinstance(node, Num):
        return repr(node.value)
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Neg):
        return f"(-{_emit_compiled(node.arg)})"
    if isinstance(node, BinOp):
        return f"({_emit_compiled(node.lhs)} {node.op} {_emit_compiled(node.rhs)})"
    args = ", ".join(_emit_compiled(a) for a in node.args)
    return f"_{node.fn}({args})"


def _compile(expr, args, namespace):
    args = tuple(args)
    missing = expr.free_vars - set(args)
    if missing:
        raise ValueError(f"expression uses variables not in argument list: {sorted(missing)}")
    src = f"lambda {', '.join(args)}: {_emit_compiled(expr.root)}"
    return eval(src, dict(namespace))  # noqa: S307 - source built from our own AST


def compile_expression(expr, args):
    """Compile to a fast positional-argument scalar function.

    The compiled function performs no finiteness checks; callers in hot
    loops are expected to check state finiteness themselves (the
    integrator does this every step).
    """
    return _compile(expr, args, _SCALAR_NS)


def compile_vector(expr, args):
    """Compile to a numpy-broadcasting function of positional arrays."""
    return _compile(expr, args, _VECTOR_NS)


# ---------------------------------------------------------------------------
# Periodicity spot check


@dataclass(frozen=True)
class PeriodicityReport:
    variable: str
    n_samples: int
    max_deviation: float


def check_periodicity(expr, var, n_samples=256):
    """Numeric 1-periodicity spot check in ``var``.

    Samples all free variables uniformly in [0, 1) with a fixed seed and
    reports max |expr(p + e_var) - expr(p)| over the samples.
    """
    if var not in expr.free_vars:
        raise ValueError(f"'{var}' is not a free variable of the expression")
    if n_samples < 16:
        raise ValueError("n_samples must be >= 16")
    names = sorted(expr.free_vars)
    fn = compile_vector(expr, names)
    rng = np.random.default_rng(_PERIODICITY_SEED)
    cols = {name: rng.random(n_samples) for name in names}
    base = fn(*(cols[name] for name in names))
    shifted = fn(*((cols[name] + 1.0 if name == var else cols[name]) for name in names))
    dev = float(np.max(np.abs(np.asarray(shifted) - np.asarray(base))))
    return PeriodicityReport(variable=var, n_samples=n_samples, max_deviation=dev)
