"""Arithmetic expressions for user-supplied right-hand sides f(t, y).

A small recursive-descent parser over the variables t and y with the
usual precedence: ^ (right-associative) binds tighter than unary minus,
which binds tighter than * and /, which bind tighter than + and -.
Parsed expressions are immutable; evaluation is pure and reentrant.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gamma as _sp_gamma

from .errors import ExprDomainError, ExprSyntaxError, UnknownIdentifier

_FUNCTIONS = {
    "sin": 1, "cos": 1, "exp": 1, "ln": 1,
    "abs": 1, "sqrt": 1, "gamma": 1, "pow": 2,
}
_VARIABLES = ("t", "y")

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>\d+\.\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?"
    r"|\d+(?:[eE][+-]?\d+)?)"
    r"|(?P<ident>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^(),]))"
)


@dataclass(frozen=True)
class Num:
    value: float
    offset: int = field(compare=False, default=0)


@dataclass(frozen=True)
class Var:
    name: str
    offset: int = field(compare=False, default=0)


@dataclass(frozen=True)
class Neg:
    child: object
    offset: int = field(compare=False, default=0)


@dataclass(frozen=True)
class Bin:
    op: str
    left: object
    right: object
    offset: int = field(compare=False, default=0)


@dataclass(frozen=True)
class Call:
    name: str
    args: tuple
    offset: int = field(compare=False, default=0)


class _Tokens:
    def __init__(self, text: str):
        self.text = text
        self.items: list[tuple[str, str, int]] = []
        pos = 0
        while pos < len(text):
            m = _TOKEN_RE.match(text, pos)
            if m is None or m.end() == pos:
                stripped = text[pos:].lstrip()
                if not stripped:
                    break
                bad_at = len(text) - len(stripped)
                raise ExprSyntaxError(
                    f"unexpected character {text[bad_at]!r}", bad_at
                )
            pos = m.end()
            for kind in ("num", "ident", "op"):
                val = m.group(kind)
                if val is not None:
                    self.items.append((kind, val, m.start(kind)))
                    break
        self.i = 0

    def peek(self):
        if self.i < len(self.items):
            return self.items[self.i]
        return ("eof", "", len(self.text))

    def next(self):
        tok = self.peek()
        self.i += 1
        return tok


class _Parser:
    """expr := term ((+|-) term)*
    term := factor ((*|/) factor)*
    factor := '-' factor | power
    power := atom ['^' factor]
    atom := number | t | y | fn '(' expr {',' expr} ')' | '(' expr ')'
    """

    def __init__(self, text: str):
        self.toks = _Tokens(text)

    def parse(self):
        node = self._expr()
        kind, val, off = self.toks.peek()
        if kind != "eof":
            raise ExprSyntaxError(f"unexpected trailing token {val!r}", off)
        return node

    def _expr(self):
        node = self._term()
        while True:
            kind, val, off = self.toks.peek()
            if kind == "op" and val in "+-":
                self.toks.next()
                node = Bin(val, node, self._term(), off)
            else:
                return node

    def _term(self):
        node = self._factor()
        while True:
            kind, val, off = self.toks.peek()
            if kind == "op" and val in "*/":
                self.toks.next()
                node = Bin(val, node, self._factor(), off)
            else:
                return node

    def _factor(self):
        kind, val, off = self.toks.peek()
        if kind == "op" and val == "-":
            self.toks.next()
            return Neg(self._factor(), off)
        return self._power()

    def _power(self):
        node = self._atom()
        kind, val, off = self.toks.peek()
        if kind == "op" and val == "^":
            self.toks.next()
            # right associative; the exponent may carry a unary minus
            return Bin("^", node, self._factor(), off)
        return node

    def _atom(self):
        kind, val, off = self.toks.next()
        if kind == "num":
            return Num(float(val), off)
        if kind == "ident":
            nk, nv, _ = self.toks.peek()
            if nk == "op" and nv == "(":
                if val not in _FUNCTIONS:
                    raise UnknownIdentifier(f"unknown function {val!r}", off)
                self.toks.next()
                args = [self._expr()]
                while True:
                    k2, v2, o2 = self.toks.next()
                    if k2 == "op" and v2 == ",":
                        args.append(self._expr())
                    elif k2 == "op" and v2 == ")":
                        break
                    else:
                        raise ExprSyntaxError("expected ',' or ')'", o2)
                if len(args) != _FUNCTIONS[val]:
                    raise ExprSyntaxError(
                        f"{val} takes {_FUNCTIONS[val]} argument(s)", off
                    )
                return Call(val, tuple(args), off)
            if val not in _VARIABLES:
                raise UnknownIdentifier(f"unknown identifier {val!r}", off)
            return Var(val, off)
        if kind == "op" and val == "(":
            node = self._expr()
            k2, v2, o2 = self.toks.next()
            if not (k2 == "op" and v2 == ")"):
                raise ExprSyntaxError("expected ')'", o2)
            return node
        raise ExprSyntaxError(f"unexpected token {val!r}", off)


def _to_string(node) -> str:
    if isinstance(node, Num):
        return repr(node.value)
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Neg):
        return f"(-{_to_string(node.child)})"
    if isinstance(node, Bin):
        return f"({_to_string(node.left)} {node.op} {_to_string(node.right)})"
    if isinstance(node, Call):
        return f"{node.name}({', '.join(_to_string(a) for a in node.args)})"
    raise TypeError(f"not an AST node: {node!r}")


def _uses_y(node) -> bool:
    if isinstance(node, Var):
        return node.name == "y"
    if isinstance(node, Neg):
        return _uses_y(node.child)
    if isinstance(node, Bin):
        return _uses_y(node.left) or _uses_y(node.right)
    if isinstance(node, Call):
        return any(_uses_y(a) for a in node.args)
    return False


def _eval_array(node, t, y):
    """Evaluate over numpy arrays, pinning domain failures to the node."""
    if isinstance(node, Num):
        return np.full(np.shape(t), node.value)
    if isinstance(node, Var):
        return np.asarray(t if node.name == "t" else y, dtype=float)
    with np.errstate(all="ignore"):
        if isinstance(node, Neg):
            out = -_eval_array(node.child, t, y)
        elif isinstance(node, Bin):
            left = _eval_array(node.left, t, y)
            right = _eval_array(node.right, t, y)
            if node.op == "+":
                out = left + right
            elif node.op == "-":
                out = left - right
            elif node.op == "*":
                out = left * right
            elif node.op == "/":
                out = left / right
            else:
                out = np.power(left, right)
        elif isinstance(node, Call):
            args = [_eval_array(a, t, y) for a in node.args]
            fn = {"sin": np.sin, "cos": np.cos, "exp": np.exp, "ln": np.log,
                  "abs": np.abs, "sqrt": np.sqrt, "gamma": _sp_gamma,
                  "pow": np.power}[node.name]
            out = fn(*args)
        else:
            raise TypeError(f"not an AST node: {node!r}")
    if not np.all(np.isfinite(out)):
        raise ExprDomainError(
            f"undefined value in {_op_label(node)}", node.offset
        )
    return out


def _op_label(node) -> str:
    if isinstance(node, Bin):
        return f"operator {node.op!r}"
    if isinstance(node, Call):
        return f"function {node.name!r}"
    if isinstance(node, Neg):
        return "unary minus"
    return "expression"


@dataclass(frozen=True)
class RhsExpr:
    """A parsed right-hand-side expression over the variables t and y."""

    root: object
    text: str = field(compare=False, default="")

    def eval(self, t: float, y: float) -> float:
        out = _eval_array(self.root, float(t), float(y))
        return float(out)

    def eval_many(self, t: np.ndarray, y: np.ndarray) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        y = np.asarray(y, dtype=float)
        out = _eval_array(self.root, t, y)
        return np.broadcast_to(out, np.broadcast_shapes(t.shape, y.shape)).copy()

    def to_string(self) -> str:
        return _to_string(self.root)

    def uses_y(self) -> bool:
        return _uses_y(self.root)


def parse(text: str) -> RhsExpr:
    """Parse expression text into an immutable AST.

    Raises :class:`ExprSyntaxError` (with byte offset) on malformed
    input and :class:`UnknownIdentifier` for names other than t, y and
    the built-in functions.
    """
    if not text or not text.strip():
        raise ExprSyntaxError("empty expression", 0)
    return RhsExpr(_Parser(text).parse(), text)


def evaluate(expr: RhsExpr, t: float, y: float) -> float:
    return expr.eval(t, y)


def _halton(count: int, base: int) -> np.ndarray:
    """Radical-inverse sequence: deterministic, no RNG state involved."""
    out = np.empty(count)
    for i in range(count):
        f, r, n = 1.0, 0.0, i + 1
        while n > 0:
            f /= base
            r += f * (n % base)
            n //= base
        out[i] = r
    return out


def lipschitz_estimate(expr: RhsExpr, t_range, y_range, samples: int = 256) -> float:
    """Heuristic bound on |df/dy| over a box, with a 1.1 safety factor.

    Scans a deterministic low-discrepancy point set plus the box corners
    and edge midpoints (derivative maxima often sit on the boundary),
    approximating the partial derivative by central differences.  The
    result is reproducible bit for bit; treat it as an estimate and
    override it when a certified constant is known.
    """
    if samples < 100:
        raise ValueError("need at least 100 sample points")
    t_lo, t_hi = float(t_range[0]), float(t_range[1])
    y_lo, y_hi = float(y_range[0]), float(y_range[1])
    if t_hi < t_lo or y_hi < y_lo:
        raise ValueError("ranges must be nonempty")

    ts = t_lo + _halton(samples, 2) * (t_hi - t_lo)
    ys = y_lo + _halton(samples, 3) * (y_hi - y_lo)
    edge = np.array([0.0, 0.5, 1.0])
    tg, yg = np.meshgrid(t_lo + edge * (t_hi - t_lo),
                         y_lo + edge * (y_hi - y_lo))
    ts = np.concatenate([ts, tg.ravel()])
    ys = np.concatenate([ys, yg.ravel()])

    width = y_hi - y_lo
    step = 1e-6 * (width if width > 0 else max(1.0, abs(y_lo)))
    upper = expr.eval_many(ts, ys + step)
    lower = expr.eval_many(ts, ys - step)
    slope = np.max(np.abs(upper - lower)) / (2.0 * step)
    return 1.1 * float(slope)
