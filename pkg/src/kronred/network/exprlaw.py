"""Edge-Law Expressions

A tiny scalar language for conductance laws g(y): parsing, symbolic
differentiation, compilation to numpy callables, and the quadrature
co-content G(y) = integral of g from 0 to y.
"""
import logging
import re
from dataclasses import dataclass, field
from enum import Enum
from functools import singledispatch
from typing import Callable, Optional, Tuple

import numpy as np
from scipy import integrate

from kronred.errors import (ConvexityError, LawError, LawSyntaxError,
                            NonIntegerExponentError, OutOfIntervalError,
                            UnknownIdentifierError)

logger = logging.getLogger(__name__)

DEFAULT_INTERVAL = (-8.0, 8.0)
DEFAULT_CONVEXITY_SAMPLES = 4097
COCONTENT_TOLERANCE = 1e-10

FUNCTIONS = {
    "exp": np.exp,
    "ln": np.log,
    "tanh": np.tanh,
    "sinh": np.sinh,
    "cosh": np.cosh,
    "sqrt": np.sqrt,
}
"""Supported function names and the numpy ufunc each evaluates with."""

VARIABLE = "y"


class LawKind(Enum):
    """
    Which function the law text describes.
    """
    CONDUCTANCE = "conductance"
    COCONTENT = "cocontent"


class Expr:
    """Base class of the expression tree; nodes are immutable dataclasses."""

    def __str__(self):
        return format_expr(self)


@dataclass(frozen=True, eq=True)
class Number(Expr):
    value: float


@dataclass(frozen=True, eq=True)
class Symbol(Expr):
    name: str = VARIABLE


@dataclass(frozen=True, eq=True)
class Neg(Expr):
    operand: Expr


@dataclass(frozen=True, eq=True)
class Add(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True, eq=True)
class Sub(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True, eq=True)
class Mul(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True, eq=True)
class Div(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True, eq=True)
class Pow(Expr):
    base: Expr
    exponent: int


@dataclass(frozen=True, eq=True)
class Call(Expr):
    func: str
    arg: Expr


ZERO = Number(0.0)
ONE = Number(1.0)

_BINARY_SYMBOLS = {Add: "+", Sub: "-", Mul: "*", Div: "/"}
_BINARY_UFUNCS = {Add: np.add, Sub: np.subtract, Mul: np.multiply, Div: np.divide}


# Parsing

_TOKEN_RE = re.compile(
    r"(?P<ws>\s+)"
    r"|(?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^()])"
)


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    offset: int


def _tokenize(text: str) -> list:
    tokens = []
    position = 0
    while position < len(text):
        match = _TOKEN_RE.match(text, position)
        if match is None:
            raise LawSyntaxError(f"unexpected character {text[position]!r}", _byte_offset(text, position))
        if match.lastgroup != "ws":
            tokens.append(_Token(match.lastgroup, match.group(), _byte_offset(text, position)))
        position = match.end()
    tokens.append(_Token("end", "", _byte_offset(text, len(text))))
    return tokens


def _byte_offset(text: str, index: int) -> int:
    return len(text[:index].encode("utf-8"))


class _Parser:
    """Recursive-descent parser over the token list, one method per grammar rule."""

    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.index = 0

    @property
    def current(self) -> _Token:
        return self.tokens[self.index]

    def advance(self) -> _Token:
        token = self.tokens[self.index]
        self.index += 1
        return token

    def expect(self, text: str) -> _Token:
        if self.current.text != text:
            found = self.current.text or "end of input"
            raise LawSyntaxError(f"expected {text!r}, found {found!r}", self.current.offset)
        return self.advance()

    def parse(self) -> Expr:
        tree = self.expr()
        if self.current.kind != "end":
            raise LawSyntaxError(f"unexpected {self.current.text!r}", self.current.offset)
        return tree

    def expr(self) -> Expr:
        tree = self.term()
        while self.current.text in ("+", "-"):
            node = Add if self.advance().text == "+" else Sub
            tree = node(tree, self.term())
        return tree

    def term(self) -> Expr:
        tree = self.factor()
        while self.current.text in ("*", "/"):
            node = Mul if self.advance().text == "*" else Div
            tree = node(tree, self.factor())
        return tree

    def factor(self) -> Expr:
        if self.current.text == "-":
            self.advance()
            return Neg(self.power())
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.current.text != "^":
            return base
        self.advance()
        negative = False
        if self.current.text == "-":
            negative = True
            self.advance()
        token = self.current
        if token.kind != "number" or not token.text.isdigit():
            raise NonIntegerExponentError(token.offset)
        self.advance()
        exponent = int(token.text)
        return Pow(base, -exponent if negative else exponent)

    def atom(self) -> Expr:
        token = self.current
        if token.kind == "number":
            self.advance()
            return Number(float(token.text))
        if token.kind == "name":
            self.advance()
            if token.text == VARIABLE:
                return Symbol()
            if token.text not in FUNCTIONS:
                raise UnknownIdentifierError(token.text, token.offset)
            self.expect("(")
            arg = self.expr()
            self.expect(")")
            return Call(token.text, arg)
        if token.text == "(":
            self.advance()
            inner = self.expr()
            self.expect(")")
            return inner
        found = token.text or "end of input"
        raise LawSyntaxError(f"unexpected {found!r}", token.offset)


def parse_law(text: str) -> Expr:
    """
    Parses law text into an expression tree.

    Grammar: expr := term (("+"|"-") term)*; term := factor (("*"|"/") factor)*;
    factor := "-"? power; power := atom ("^" integer)?;
    atom := number | "y" | func "(" expr ")" | "(" expr ")".

    Raises:
        LawSyntaxError: malformed text, with the byte offset of the failure.
        UnknownIdentifierError: a name other than `y` or a supported function.
        NonIntegerExponentError: `^` followed by anything but an integer literal.
    """
    return _Parser(text).parse()


# Printing

@singledispatch
def format_expr(expr) -> str:
    """Fully parenthesized text form; `parse_law(format_expr(e)) == e`."""
    raise TypeError(f"not an expression: {type(expr).__name__}")


@format_expr.register(Number)
def _(expr):
    if expr.value < 0:
        return f"(-{abs(expr.value)!r})"
    return repr(expr.value)


@format_expr.register(Symbol)
def _(expr):
    return expr.name


@format_expr.register(Neg)
def _(expr):
    return f"(-{format_expr(expr.operand)})"


@format_expr.register(Add)
@format_expr.register(Sub)
@format_expr.register(Mul)
@format_expr.register(Div)
def _(expr):
    symbol = _BINARY_SYMBOLS[type(expr)]
    return f"({format_expr(expr.left)} {symbol} {format_expr(expr.right)})"


@format_expr.register(Pow)
def _(expr):
    return f"({format_expr(expr.base)}^{expr.exponent})"


@format_expr.register(Call)
def _(expr):
    return f"{expr.func}({format_expr(expr.arg)})"


# Evaluation with numpy

@singledispatch
def _evaluate(expr, y: np.ndarray) -> np.ndarray:
    raise TypeError(f"not an expression: {type(expr).__name__}")


@_evaluate.register(Number)
def _(expr, y):
    return np.full_like(y, expr.value)


@_evaluate.register(Symbol)
def _(expr, y):
    return y


@_evaluate.register(Neg)
def _(expr, y):
    return np.negative(_evaluate(expr.operand, y))


@_evaluate.register(Add)
@_evaluate.register(Sub)
@_evaluate.register(Mul)
@_evaluate.register(Div)
def _(expr, y):
    return _BINARY_UFUNCS[type(expr)](_evaluate(expr.left, y), _evaluate(expr.right, y))


@_evaluate.register(Pow)
def _(expr, y):
    return np.power(_evaluate(expr.base, y), expr.exponent)


@_evaluate.register(Call)
def _(expr, y):
    return FUNCTIONS[expr.func](_evaluate(expr.arg, y))


def compile_expr(expr: Expr) -> Callable[[np.ndarray], np.ndarray]:
    """
    Vectorized numpy function of `y` for an expression.

    The returned callable always yields a float array shaped like its input,
    also for constant expressions.
    """
    def evaluate_at(y):
        y = np.asarray(y, dtype=float)
        with np.errstate(all="ignore"):
            return np.asarray(_evaluate(expr, y), dtype=float)
    return evaluate_at


def evaluate(expr: Expr, y):
    """Evaluates `expr` at `y` (scalar or array)."""
    return compile_expr(expr)(y)


# Differentiation

def _num(value: float) -> Expr:
    return Neg(Number(-value)) if value < 0 else Number(float(value))


def _is_num(expr: Expr, value: float) -> bool:
    return isinstance(expr, Number) and expr.value == value


def _neg(a: Expr) -> Expr:
    if _is_num(a, 0.0):
        return ZERO
    if isinstance(a, Neg):
        return a.operand
    return Neg(a)


def _add(a: Expr, b: Expr) -> Expr:
    if _is_num(a, 0.0):
        return b
    if _is_num(b, 0.0):
        return a
    if isinstance(a, Number) and isinstance(b, Number):
        return _num(a.value + b.value)
    return Add(a, b)


def _sub(a: Expr, b: Expr) -> Expr:
    if _is_num(b, 0.0):
        return a
    if _is_num(a, 0.0):
        return _neg(b)
    if isinstance(a, Number) and isinstance(b, Number):
        return _num(a.value - b.value)
    return Sub(a, b)


def _mul(a: Expr, b: Expr) -> Expr:
    if _is_num(a, 0.0) or _is_num(b, 0.0):
        return ZERO
    if _is_num(a, 1.0):
        return b
    if _is_num(b, 1.0):
        return a
    if isinstance(a, Number) and isinstance(b, Number):
        return _num(a.value * b.value)
    return Mul(a, b)


def _div(a: Expr, b: Expr) -> Expr:
    if _is_num(a, 0.0):
        return ZERO
    if _is_num(b, 1.0):
        return a
    return Div(a, b)


def _pow(base: Expr, exponent: int) -> Expr:
    if exponent == 0:
        return ONE
    if exponent == 1:
        return base
    return Pow(base, exponent)


@singledispatch
def differentiate(expr) -> Expr:
    """
    Symbolic d/dy of an expression; the result stays inside the grammar.

    Only trivial constant folding (0 and 1 operands) is applied while building.
    """
    raise TypeError(f"cannot differentiate a {type(expr).__name__}")


@differentiate.register(Number)
def _(expr):
    return ZERO


@differentiate.register(Symbol)
def _(expr):
    return ONE


@differentiate.register(Neg)
def _(expr):
    return _neg(differentiate(expr.operand))


@differentiate.register(Add)
def _(expr):
    return _add(differentiate(expr.left), differentiate(expr.right))


@differentiate.register(Sub)
def _(expr):
    return _sub(differentiate(expr.left), differentiate(expr.right))


@differentiate.register(Mul)
def _(expr):
    left, right = expr.left, expr.right
    return _add(_mul(differentiate(left), right), _mul(left, differentiate(right)))


@differentiate.register(Div)
def _(expr):
    nume, deno = expr.left, expr.right
    numerator = _sub(_mul(differentiate(nume), deno), _mul(nume, differentiate(deno)))
    return _div(numerator, _pow(deno, 2))


@differentiate.register(Pow)
def _(expr):
    n = expr.exponent
    return _mul(_mul(_num(n), _pow(expr.base, n - 1)), differentiate(expr.base))


@differentiate.register(Call)
def _(expr):
    inner = expr.arg
    inner_diff = differentiate(inner)
    if expr.func == "exp":
        outer = expr
    elif expr.func == "ln":
        return _div(inner_diff, inner)
    elif expr.func == "tanh":
        outer = _sub(ONE, _pow(expr, 2))
    elif expr.func == "sinh":
        outer = Call("cosh", inner)
    elif expr.func == "cosh":
        outer = Call("sinh", inner)
    elif expr.func == "sqrt":
        return _div(inner_diff, _mul(Number(2.0), expr))
    else:
        raise TypeError(f"unknown function {expr.func}")
    return _mul(outer, inner_diff)


def depends_on_variable(expr: Expr) -> bool:
    """True iff `y` occurs in the tree."""
    if isinstance(expr, Symbol):
        return True
    if isinstance(expr, Number):
        return False
    if isinstance(expr, Neg):
        return depends_on_variable(expr.operand)
    if isinstance(expr, Pow):
        return depends_on_variable(expr.base)
    if isinstance(expr, Call):
        return depends_on_variable(expr.arg)
    return depends_on_variable(expr.left) or depends_on_variable(expr.right)


# Edge laws

@dataclass(frozen=True)
class ConvexityReport:
    """Outcome of the sampled strong-convexity certificate of one law."""
    samples: int
    margin: Optional[float] = None
    violation_y: Optional[float] = None
    violation_slope: Optional[float] = None

    @property
    def passed(self) -> bool:
        return self.violation_y is None


@dataclass(frozen=True)
class EdgeLaw:
    """
    Strictly monotone conductance law of one edge.

    `g` is the current as a function of edge voltage, `g_prime` its symbolic
    derivative. Instances are immutable and safe to share between threads.
    """
    text: str
    g: Expr
    g_prime: Expr
    kind: LawKind = LawKind.CONDUCTANCE
    validity_interval: Tuple[float, float] = DEFAULT_INTERVAL
    convexity_margin: float = float("nan")
    _conductance: Callable = field(init=False, repr=False, compare=False)
    _slope: Callable = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_conductance", compile_expr(self.g))
        object.__setattr__(self, "_slope", compile_expr(self.g_prime))

    def conductance(self, y):
        """g(y), vectorized; no interval check."""
        return self._conductance(y)

    def slope(self, y):
        """g'(y), vectorized; no interval check."""
        return self._slope(y)

    def contains(self, y) -> np.ndarray:
        lo, hi = self.validity_interval
        y = np.asarray(y, dtype=float)
        return (y >= lo) & (y <= hi)

    @property
    def linear_conductance(self) -> Optional[float]:
        """ḡ when g(y) = ḡ·y exactly (quadratic co-content), else None."""
        if depends_on_variable(self.g_prime):
            return None
        if float(self.conductance(0.0)) != 0.0:
            return None
        return float(self.slope(0.0))


def _validate_interval(interval) -> Tuple[float, float]:
    lo, hi = float(interval[0]), float(interval[1])
    if not lo < 0.0 < hi:
        raise LawError(f"validity interval must satisfy lo < 0 < hi, got [{lo}, {hi}]")
    return lo, hi


def make_law(text: str,
             kind: LawKind = LawKind.CONDUCTANCE,
             validity_interval=DEFAULT_INTERVAL,
             samples: int = DEFAULT_CONVEXITY_SAMPLES,
             certify: bool = True) -> EdgeLaw:
    """
    Builds an EdgeLaw from text.

    For co-content text the expression is differentiated once for g and twice
    for g'. With `certify` the sampled strong-convexity check must pass and its
    minimum slope becomes the law's convexity margin; without it a failing law
    is still returned (margin NaN) so that reports can describe it.

    Raises:
        LawError subclasses for parse errors, a bad interval, or (with
        `certify`) a ConvexityError naming the first violating sample.
    """
    tree = parse_law(text)
    interval = _validate_interval(validity_interval)
    if kind is LawKind.COCONTENT:
        g = differentiate(tree)
    else:
        g = tree
    law = EdgeLaw(text=text, g=g, g_prime=differentiate(g), kind=kind, validity_interval=interval)
    report = check_strong_convexity(law, samples)
    if not report.passed:
        if certify:
            raise ConvexityError(report.violation_y, report.violation_slope, text)
        return law
    return EdgeLaw(text=text, g=g, g_prime=law.g_prime, kind=kind,
                   validity_interval=interval, convexity_margin=report.margin)


def cocontent(law: EdgeLaw, y: float) -> float:
    """
    G(y) = ∫₀^y g(v) dv by adaptive quadrature (absolute tolerance 1e-10).

    Raises:
        OutOfIntervalError: y outside the law's validity interval.
    """
    y = float(y)
    if not law.contains(y):
        raise OutOfIntervalError(y, law.validity_interval)
    if y == 0.0:
        return 0.0
    value, _ = integrate.quad(lambda v: float(law.conductance(np.float64(v))), 0.0, y,
                              epsabs=COCONTENT_TOLERANCE, epsrel=1e-12, limit=200)
    return value


def check_strong_convexity(law: EdgeLaw, samples: int = DEFAULT_CONVEXITY_SAMPLES) -> ConvexityReport:
    """
    Samples g' on a uniform grid over the validity interval.

    Returns the minimum slope as margin when every sample is positive and
    finite, otherwise the first violating sample point.
    """
    if samples < 2:
        raise ValueError("samples must be at least 2")
    lo, hi = law.validity_interval
    grid = np.linspace(lo, hi, samples)
    slopes = law.slope(grid)
    values = law.conductance(grid)
    bad = ~(np.isfinite(slopes) & np.isfinite(values) & (slopes > 0.0))
    if bad.any():
        first = int(np.argmax(bad))
        logger.debug("law %r fails convexity at y=%g", law.text, grid[first])
        return ConvexityReport(samples=samples, violation_y=float(grid[first]),
                               violation_slope=float(slopes[first]))
    return ConvexityReport(samples=samples, margin=float(slopes.min()))
