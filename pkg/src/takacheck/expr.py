"""Immersion expression language.

An immersion file looks like::

    # circle traversed at speed a
    param a = 1.2;
    dim 1 -> 2;
    F = (cos(a*x1), sin(a*x1));
    box x1 in [0, 2*pi];

Statements end with ``;`` (optional after the last one), ``#`` starts a
comment, and ``pi`` / ``e`` are predefined. Expressions are infix with the
usual precedence (``^`` binds tighter than unary minus, which binds tighter
than ``*``/``/``, then ``+``/``-``). ``**`` is accepted as a synonym for
``^``. Exponents must not depend on the chart coordinates.

The parsed :class:`ImmersionSpec` is evaluated with :func:`eval_chart`, which
returns one :class:`~takacheck.jet.Jet2` per ambient component.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import jet as J

__all__ = [
    "Const",
    "Var",
    "Param",
    "Comp",
    "Unary",
    "Binary",
    "Expr",
    "ImmersionSpec",
    "ExprError",
    "ParseError",
    "EvaluationError",
    "parse",
    "parse_scalar",
    "parse_constant",
    "eval_chart",
    "eval_scalar",
    "to_source",
    "format_expr",
    "transform",
    "variables_of",
]

UNARY_FUNCS = ("sin", "cos", "exp", "sqrt")
CONSTANTS = {"pi": math.pi, "e": math.e}
KEYWORDS = {"param", "dim", "F", "box", "in"}


# --------------------------------------------------------------------------
# AST
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Const:
    value: float


@dataclass(frozen=True)
class Var:
    """Chart coordinate ``x{index+1}``."""

    index: int


@dataclass(frozen=True)
class Param:
    name: str
    value: float


@dataclass(frozen=True)
class Comp:
    """Ambient component ``F{index+1}``; only valid in scalar expressions."""

    index: int


@dataclass(frozen=True)
class Unary:
    op: str  # sin | cos | exp | sqrt | neg
    child: "Expr"


@dataclass(frozen=True)
class Binary:
    op: str  # add | sub | mul | div | pow
    left: "Expr"
    right: "Expr"


Expr = Const | Var | Param | Comp | Unary | Binary


# --------------------------------------------------------------------------
# Errors
# --------------------------------------------------------------------------


class ExprError(ValueError):
    """Base class for parse and evaluation failures."""


class ParseError(ExprError):
    """Syntax or resolution error with a 1-based source position."""

    def __init__(self, message: str, line: int, col: int, expected: Iterable[str] = ()):
        self.message = message
        self.line = line
        self.col = col
        self.expected = frozenset(expected)
        text = f"line {line}, column {col}: {message}"
        if self.expected:
            text += " (expected one of: " + ", ".join(sorted(self.expected)) + ")"
        super().__init__(text)


class EvaluationError(ExprError):
    """A component left the domain of an elementary function."""

    def __init__(self, reason: str, component: int | None, point: Sequence[float]):
        self.reason = reason
        self.component = component
        self.point = tuple(float(p) for p in point)
        where = "scalar" if component is None else f"component {component + 1}"
        super().__init__(f"{where}: {reason} at point {self.point}")


# --------------------------------------------------------------------------
# Spec
# --------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ImmersionSpec:
    """A chart ``F: box in R^m -> R^N`` given by ``N`` expressions."""

    m: int
    N: int
    components: tuple
    params: Mapping[str, float] = field(default_factory=dict)
    box: tuple = ()
    name: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))
        object.__setattr__(self, "params", dict(self.params))
        object.__setattr__(self, "box", tuple((float(lo), float(hi)) for lo, hi in self.box))
        if not (self.m >= 1 and self.N >= self.m):
            raise ExprError(f"need N >= m >= 1, got m={self.m}, N={self.N}")
        if len(self.components) != self.N:
            raise ExprError(f"declared N={self.N} but got {len(self.components)} components")
        if len(self.box) != self.m:
            raise ExprError(f"box has {len(self.box)} ranges, expected m={self.m}")
        for i, (lo, hi) in enumerate(self.box):
            if not lo < hi:
                raise ExprError(f"empty range for x{i + 1}: [{lo}, {hi}]")
        for a, node in enumerate(self.components):
            for n in _walk(node):
                if isinstance(n, Var) and not 0 <= n.index < self.m:
                    raise ExprError(f"component {a + 1} uses x{n.index + 1} but m={self.m}")
                if isinstance(n, Param) and n.name not in self.params:
                    raise ExprError(f"component {a + 1} uses undeclared parameter {n.name}")
                if isinstance(n, Comp):
                    raise ExprError("component expressions cannot reference F")

    @property
    def lower(self) -> np.ndarray:
        return np.array([lo for lo, _ in self.box])

    @property
    def upper(self) -> np.ndarray:
        return np.array([hi for _, hi in self.box])

    def contains(self, point: Sequence[float]) -> bool:
        p = np.asarray(point, dtype=float)
        return p.shape == (self.m,) and bool(np.all(p >= self.lower) and np.all(p <= self.upper))

    def __call__(self, point: Sequence[float]) -> np.ndarray:
        """Plain value of ``F`` at ``point``."""
        return np.array([j.value for j in eval_chart(self, point)])


def _walk(node: Expr):
    yield node
    if isinstance(node, Unary):
        yield from _walk(node.child)
    elif isinstance(node, Binary):
        yield from _walk(node.left)
        yield from _walk(node.right)


def variables_of(node: Expr) -> set:
    return {n.index for n in _walk(node) if isinstance(n, Var)}


# --------------------------------------------------------------------------
# Tokenizer
# --------------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>\#[^\n]*)
  | (?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>->|\*\*|[-+*/^(),;=\[\]])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Tok:
    kind: str  # number | name | op | eof
    text: str
    line: int
    col: int


def _tokenize(source: str) -> list[_Tok]:
    toks = []
    pos, line, line_start = 0, 1, 0
    while pos < len(source):
        mt = _TOKEN_RE.match(source, pos)
        if mt is None:
            raise ParseError(f"unexpected character {source[pos]!r}", line, pos - line_start + 1)
        kind = mt.lastgroup
        text = mt.group()
        if kind in ("number", "name", "op"):
            toks.append(_Tok(kind, text, line, pos - line_start + 1))
        newlines = text.count("\n")
        if newlines:
            line += newlines
            line_start = pos + text.rfind("\n") + 1
        pos = mt.end()
    toks.append(_Tok("eof", "", line, pos - line_start + 1))
    return toks


# --------------------------------------------------------------------------
# Parser (raw trees carry positions; names are resolved afterwards)
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class _RName:
    name: str
    line: int
    col: int


@dataclass(frozen=True)
class _RNum:
    value: float


@dataclass(frozen=True)
class _ROp:
    op: str
    args: tuple
    line: int
    col: int


_BINOPS = {"+": "add", "-": "sub", "*": "mul", "/": "div"}


class _Parser:
    def __init__(self, source: str):
        self.toks = _tokenize(source)
        self.i = 0

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def _fail(self, expected: Iterable[str], tok: _Tok | None = None):
        tok = tok or self.tok
        found = "end of input" if tok.kind == "eof" else repr(tok.text)
        raise ParseError(f"unexpected {found}", tok.line, tok.col, expected)

    def accept(self, text: str) -> bool:
        if self.tok.kind in ("op", "name") and self.tok.text == text:
            self.i += 1
            return True
        return False

    def expect(self, text: str) -> _Tok:
        tok = self.tok
        if not self.accept(text):
            self._fail({text})
        return tok

    def expect_name(self) -> _Tok:
        tok = self.tok
        if tok.kind != "name":
            self._fail({"identifier"})
        self.i += 1
        return tok

    def expect_int(self) -> int:
        tok = self.tok
        if tok.kind != "number" or not tok.text.isdigit():
            self._fail({"integer"})
        self.i += 1
        return int(tok.text)

    # expression grammar
    def expr(self):
        node = self.term()
        while self.tok.kind == "op" and self.tok.text in ("+", "-"):
            t = self.tok
            self.i += 1
            node = _ROp(_BINOPS[t.text], (node, self.term()), t.line, t.col)
        return node

    def term(self):
        node = self.unary()
        while self.tok.kind == "op" and self.tok.text in ("*", "/"):
            t = self.tok
            self.i += 1
            node = _ROp(_BINOPS[t.text], (node, self.unary()), t.line, t.col)
        return node

    def unary(self):
        t = self.tok
        if t.kind == "op" and t.text == "-":
            self.i += 1
            return _ROp("neg", (self.unary(),), t.line, t.col)
        if t.kind == "op" and t.text == "+":
            self.i += 1
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        t = self.tok
        if t.kind == "op" and t.text in ("^", "**"):
            self.i += 1
            return _ROp("pow", (base, self.unary()), t.line, t.col)
        return base

    def atom(self):
        t = self.tok
        if t.kind == "number":
            self.i += 1
            return _RNum(float(t.text))
        if t.kind == "name":
            self.i += 1
            if self.tok.kind == "op" and self.tok.text == "(":
                if t.text not in UNARY_FUNCS:
                    raise ParseError(f"unknown function {t.text!r}", t.line, t.col, UNARY_FUNCS)
                self.i += 1
                arg = self.expr()
                self.expect(")")
                return _ROp(t.text, (arg,), t.line, t.col)
            return _RName(t.text, t.line, t.col)
        if t.kind == "op" and t.text == "(":
            self.i += 1
            node = self.expr()
            self.expect(")")
            return node
        self._fail({"number", "identifier", "(", "-"})

    # statements
    def file(self):
        stmts = []
        while self.tok.kind != "eof":
            if self.accept(";"):
                continue
            stmts.append(self.statement())
            if self.tok.kind != "eof":
                self.expect(";")
        return stmts

    def statement(self):
        t = self.tok
        if self.accept("param"):
            name = self.expect_name()
            self.expect("=")
            return ("param", t, name, self.expr())
        if self.accept("dim"):
            m = self.expect_int()
            self.expect("->")
            n = self.expect_int()
            return ("dim", t, m, n)
        if self.accept("F"):
            self.expect("=")
            self.expect("(")
            comps = [self.expr()]
            while self.accept(","):
                comps.append(self.expr())
            self.expect(")")
            return ("F", t, comps)
        if self.accept("box"):
            ranges = [self.range_()]
            while self.accept(","):
                ranges.append(self.range_())
            return ("box", t, ranges)
        self._fail({"param", "dim", "F", "box"})

    def range_(self):
        name = self.expect_name()
        self.expect("in")
        self.expect("[")
        lo = self.expr()
        self.expect(",")
        hi = self.expr()
        self.expect("]")
        return name, lo, hi


# --------------------------------------------------------------------------
# Resolution + constant folding
# --------------------------------------------------------------------------

_FOLD = {
    "add": lambda a, b: a + b,
    "sub": lambda a, b: a - b,
    "mul": lambda a, b: a * b,
    "div": lambda a, b: a / b,
    "pow": lambda a, b: a**b,
    "neg": lambda a: -a,
    "sin": math.sin,
    "cos": math.cos,
    "exp": math.exp,
    "sqrt": math.sqrt,
}

_VAR_RE = re.compile(r"x([1-9]\d*)")
_COMP_RE = re.compile(r"F([1-9]\d*)")


class _Scope:
    def __init__(self, m: int | None, params: Mapping[str, float], n_comp: int | None = None):
        self.m = m
        self.params = params
        self.n_comp = n_comp

    def lookup(self, raw: _RName) -> Expr:
        name = raw.name
        if name in self.params:
            return Param(name, self.params[name])
        if name in CONSTANTS:
            return Const(CONSTANTS[name])
        mv = _VAR_RE.fullmatch(name)
        if mv and self.m is not None and int(mv.group(1)) <= self.m:
            return Var(int(mv.group(1)) - 1)
        mc = _COMP_RE.fullmatch(name)
        if mc and self.n_comp is not None and int(mc.group(1)) <= self.n_comp:
            return Comp(int(mc.group(1)) - 1)
        raise ParseError(f"undeclared identifier {name!r}", raw.line, raw.col)


def _has_coordinates(node: Expr) -> bool:
    return any(isinstance(n, (Var, Comp)) for n in _walk(node))


def _resolve(raw, scope: _Scope) -> Expr:
    if isinstance(raw, _RNum):
        return Const(raw.value)
    if isinstance(raw, _RName):
        return scope.lookup(raw)
    args = [_resolve(a, scope) for a in raw.args]
    if raw.op == "pow" and _has_coordinates(args[1]):
        raise ParseError("exponent must not depend on the coordinates", raw.line, raw.col)
    if all(isinstance(a, Const) for a in args):
        try:
            value = _FOLD[raw.op](*(a.value for a in args))
        except (ZeroDivisionError, ValueError, OverflowError) as exc:
            raise ParseError(f"invalid constant expression ({exc})", raw.line, raw.col) from None
        if isinstance(value, complex) or not math.isfinite(value):
            raise ParseError("constant expression is not a finite real", raw.line, raw.col)
        return Const(float(value))
    if len(args) == 1:
        return Unary(raw.op, args[0])
    return Binary(raw.op, args[0], args[1])


def _constant_value(node: Expr, line: int, col: int) -> float:
    if _has_coordinates(node):
        raise ParseError("expected a constant expression", line, col)
    try:
        return _eval_float(node)
    except (ZeroDivisionError, ValueError, OverflowError) as exc:
        raise ParseError(f"invalid constant expression ({exc})", line, col) from None


def _eval_float(node: Expr) -> float:
    if isinstance(node, Const):
        return node.value
    if isinstance(node, Param):
        return node.value
    if isinstance(node, Unary):
        return _FOLD[node.op](_eval_float(node.child))
    if isinstance(node, Binary):
        return _FOLD[node.op](_eval_float(node.left), _eval_float(node.right))
    raise ExprError(f"not a constant: {node!r}")


def parse(source: str, overrides: Mapping[str, float] | None = None, name: str | None = None) -> ImmersionSpec:
    """Parse an immersion file into a validated :class:`ImmersionSpec`.

    ``overrides`` replaces the values of declared parameters; naming a
    parameter the file does not declare is an error.
    """
    parser = _Parser(source)
    stmts = parser.file()
    overrides = dict(overrides or {})
    params: dict[str, float] = {}
    dims = comps = box = None
    seen: set[str] = set()
    for stmt in stmts:
        kind, tok = stmt[0], stmt[1]
        if kind == "param":
            ptok, raw = stmt[2], stmt[3]
            pname = ptok.text
            if pname in params or pname in CONSTANTS or pname in KEYWORDS or pname in UNARY_FUNCS:
                raise ParseError(f"cannot declare parameter {pname!r}", ptok.line, ptok.col)
            if _VAR_RE.fullmatch(pname) or _COMP_RE.fullmatch(pname):
                raise ParseError(f"parameter name {pname!r} is reserved", ptok.line, ptok.col)
            value = _constant_value(_resolve(raw, _Scope(None, params)), ptok.line, ptok.col)
            params[pname] = float(overrides.pop(pname, value))
            continue
        if kind in seen:
            raise ParseError(f"duplicate '{kind}' statement", tok.line, tok.col)
        seen.add(kind)
        if kind == "dim":
            dims = (stmt[2], stmt[3], tok)
        elif kind == "F":
            comps = (stmt[2], tok)
        else:
            box = (stmt[2], tok)
    if overrides:
        raise ExprError("unknown parameter override(s): " + ", ".join(sorted(overrides)))
    end = parser.toks[-1]
    for label, item in (("dim", dims), ("F", comps), ("box", box)):
        if item is None:
            raise ParseError(f"missing '{label}' statement", end.line, end.col, {label})
    m, N, dtok = dims
    if not (N >= m >= 1):
        raise ParseError(f"need N >= m >= 1, got {m} -> {N}", dtok.line, dtok.col)
    raw_comps, ftok = comps
    if len(raw_comps) != N:
        raise ParseError(
            f"dimension mismatch: declared N={N} but F has {len(raw_comps)} components",
            ftok.line,
            ftok.col,
        )
    scope = _Scope(m, params)
    components = tuple(_resolve(r, scope) for r in raw_comps)

    raw_ranges, btok = box
    ranges: dict[int, tuple[float, float]] = {}
    cscope = _Scope(None, params)
    for vtok, rlo, rhi in raw_ranges:
        mv = _VAR_RE.fullmatch(vtok.text)
        if not mv or int(mv.group(1)) > m:
            raise ParseError(f"box names unknown coordinate {vtok.text!r}", vtok.line, vtok.col)
        idx = int(mv.group(1)) - 1
        if idx in ranges:
            raise ParseError(f"duplicate range for {vtok.text}", vtok.line, vtok.col)
        lo = _constant_value(_resolve(rlo, cscope), vtok.line, vtok.col)
        hi = _constant_value(_resolve(rhi, cscope), vtok.line, vtok.col)
        if not lo < hi:
            raise ParseError(f"empty range for {vtok.text}: [{lo}, {hi}]", vtok.line, vtok.col)
        ranges[idx] = (lo, hi)
    if len(ranges) != m:
        missing = [f"x{i + 1}" for i in range(m) if i not in ranges]
        raise ParseError("box is missing " + ", ".join(missing), btok.line, btok.col)
    return ImmersionSpec(m, N, components, params, tuple(ranges[i] for i in range(m)), name)


def parse_scalar(source: str, spec: ImmersionSpec) -> Expr:
    """Parse a scalar over ``x1..xm``, ``F1..FN`` and the immersion's parameters."""
    parser = _Parser(source)
    raw = parser.expr()
    if parser.tok.kind != "eof":
        parser._fail({"operator", "end of input"})
    return _resolve(raw, _Scope(spec.m, spec.params, spec.N))


def parse_constant(source: str, params: Mapping[str, float] | None = None) -> float:
    """Evaluate a constant expression such as ``sqrt(2)`` or ``2*pi/3``."""
    parser = _Parser(source)
    raw = parser.expr()
    if parser.tok.kind != "eof":
        parser._fail({"operator", "end of input"})
    return _constant_value(_resolve(raw, _Scope(None, dict(params or {}))), 1, 1)


# --------------------------------------------------------------------------
# Evaluation
# --------------------------------------------------------------------------


def _eval_jet(node: Expr, coords: list, comps: list | None, m: int) -> J.Jet2:
    if isinstance(node, Var):
        return coords[node.index]
    if isinstance(node, (Const, Param)):
        return J.constant(node.value, m)
    if isinstance(node, Comp):
        return comps[node.index]
    if isinstance(node, Unary):
        a = _eval_jet(node.child, coords, comps, m)
        return -a if node.op == "neg" else J.elementary(a, node.op)
    if node.op == "pow":
        return J.pow_const(_eval_jet(node.left, coords, comps, m), _eval_float(node.right))
    a = _eval_jet(node.left, coords, comps, m)
    b = _eval_jet(node.right, coords, comps, m)
    return J.arith(a, b, node.op)


def _seed_all(m: int, point: Sequence[float]) -> tuple[np.ndarray, list]:
    p = np.asarray(point, dtype=float).reshape(-1)
    if p.shape != (m,):
        raise ExprError(f"point has {p.shape[0]} coordinates, expected {m}")
    return p, [J.seed(p, i) for i in range(m)]


def eval_chart(spec: ImmersionSpec, point: Sequence[float]) -> list[J.Jet2]:
    """Second-order jets of every component of ``F`` at ``point``."""
    p, coords = _seed_all(spec.m, point)
    out = []
    for a, node in enumerate(spec.components):
        try:
            out.append(_eval_jet(node, coords, None, spec.m))
        except J.JetDomainError as exc:
            raise EvaluationError(exc.reason, a, p) from None
    return out


def eval_scalar(node: Expr, spec: ImmersionSpec, point: Sequence[float], comps: list | None = None) -> J.Jet2:
    """Jet of a scalar expression; ``comps`` may carry precomputed chart jets."""
    p, coords = _seed_all(spec.m, point)
    if comps is None and any(isinstance(n, Comp) for n in _walk(node)):
        comps = eval_chart(spec, p)
    try:
        return _eval_jet(node, coords, comps, spec.m)
    except J.JetDomainError as exc:
        raise EvaluationError(exc.reason, None, p) from None


# --------------------------------------------------------------------------
# Printing and transformation
# --------------------------------------------------------------------------

_SYMBOL = {"add": "+", "sub": "-", "mul": "*", "div": "/", "pow": "^"}


def _num(x: float) -> str:
    text = repr(float(x))
    return f"({text})" if text.startswith("-") else text


def format_expr(node: Expr) -> str:
    """Fully parenthesized source text; re-parsing reproduces the same tree."""
    if isinstance(node, Const):
        return _num(node.value)
    if isinstance(node, Var):
        return f"x{node.index + 1}"
    if isinstance(node, Comp):
        return f"F{node.index + 1}"
    if isinstance(node, Param):
        return node.name
    if isinstance(node, Unary):
        inner = format_expr(node.child)
        return f"(-{inner})" if node.op == "neg" else f"{node.op}({inner})"
    return f"({format_expr(node.left)}{_SYMBOL[node.op]}{format_expr(node.right)})"


def to_source(spec: ImmersionSpec) -> str:
    lines = [f"param {k}={_num(v)};" for k, v in spec.params.items()]
    lines.append(f"dim {spec.m} -> {spec.N};")
    lines.append("F = (" + ", ".join(format_expr(c) for c in spec.components) + ");")
    ranges = ", ".join(f"x{i + 1} in [{_num(lo)},{_num(hi)}]" for i, (lo, hi) in enumerate(spec.box))
    lines.append(f"box {ranges};")
    return "\n".join(lines) + "\n"


def transform(spec: ImmersionSpec, matrix, offset=None, name: str | None = None) -> ImmersionSpec:
    """Compose the chart with the affine map ``y -> matrix @ y + offset``.

    Used to apply ambient rigid motions; the result is a new spec with the
    same domain and parameters.
    """
    Q = np.asarray(matrix, dtype=float)
    if Q.ndim != 2 or Q.shape[1] != spec.N:
        raise ExprError(f"matrix must have {spec.N} columns, got shape {Q.shape}")
    b = np.zeros(Q.shape[0]) if offset is None else np.asarray(offset, dtype=float)
    comps = []
    for row, shift in zip(Q, b):
        terms = [Binary("mul", Const(float(q)), c) for q, c in zip(row, spec.components) if q != 0.0]
        if shift != 0.0:
            terms.append(Const(float(shift)))
        if not terms:
            comps.append(Const(0.0))
            continue
        acc = terms[0]
        for t in terms[1:]:
            acc = Binary("add", acc, t)
        comps.append(acc)
    return ImmersionSpec(spec.m, Q.shape[0], comps, spec.params, spec.box, name or spec.name)
