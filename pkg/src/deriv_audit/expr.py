"""Expression trees over a single real variable, with a parser, a formatter
and a total evaluator that reports *why* a value is undefined instead of
raising.

Definedness follows real-number semantics: cbrt is total and odd, sqrt needs
a nonnegative argument, ln a positive one, division a nonzero denominator,
and a negative base may only be raised to an exact integer power.  Floating
overflow is saturated to a huge finite value; it never masquerades as an
undefined point.
"""

from __future__ import annotations

import enum
import math
import re
from dataclasses import dataclass

__all__ = [
    "Expr", "Constant", "Variable", "Neg", "Add", "Sub", "Mul", "Div", "Pow",
    "Func", "FUNCTION_NAMES", "X",
    "UndefinedReason", "EvalOutcome", "Interval", "ParseError",
    "parse", "format_expr", "evaluate", "format_number", "subexpressions",
]

FUNCTION_NAMES = frozenset({"sin", "cos", "tan", "exp", "ln", "sqrt", "cbrt", "abs"})

# Overflow saturates here; definedness is a domain property, never a
# magnitude artifact.
HUGE = 1.7976931348623157e308


class Expr:
    """Base class for immutable expression tree nodes."""

    __slots__ = ()

    def __str__(self) -> str:
        return format_expr(self)


@dataclass(frozen=True, slots=True)
class Constant(Expr):
    value: float

    def __post_init__(self):
        v = float(self.value)
        if not math.isfinite(v):
            raise ValueError(f"constant must be finite, got {self.value!r}")
        object.__setattr__(self, "value", v)


@dataclass(frozen=True, slots=True)
class Variable(Expr):
    pass


@dataclass(frozen=True, slots=True)
class Neg(Expr):
    arg: Expr


@dataclass(frozen=True, slots=True)
class Add(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True, slots=True)
class Sub(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True, slots=True)
class Mul(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True, slots=True)
class Div(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True, slots=True)
class Pow(Expr):
    base: Expr
    exponent: Expr


@dataclass(frozen=True, slots=True)
class Func(Expr):
    name: str
    arg: Expr

    def __post_init__(self):
        if self.name not in FUNCTION_NAMES:
            raise ValueError(f"unknown function name {self.name!r}")


#: The single free variable.
X = Variable()


def children(e: Expr) -> tuple[Expr, ...]:
    if isinstance(e, (Constant, Variable)):
        return ()
    if isinstance(e, Neg):
        return (e.arg,)
    if isinstance(e, Func):
        return (e.arg,)
    if isinstance(e, Pow):
        return (e.base, e.exponent)
    return (e.left, e.right)  # type: ignore[union-attr]


def subexpressions(e: Expr):
    """Yield every node of the tree in left-to-right preorder."""
    stack = [e]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(reversed(children(node)))


class UndefinedReason(enum.Enum):
    DIV_BY_ZERO = "division by zero"
    EVEN_ROOT_OF_NEGATIVE = "even root of a negative number"
    LOG_NON_POSITIVE = "logarithm of a non-positive number"
    POW_NEGATIVE_BASE = "non-integer power of a negative base"
    TAN_POLE = "tangent pole"


@dataclass(frozen=True, slots=True)
class EvalOutcome:
    """Either a finite real value or the reason the expression has none."""

    value: float | None = None
    reason: UndefinedReason | None = None

    @classmethod
    def of(cls, value: float) -> "EvalOutcome":
        return cls(value=value)

    @classmethod
    def undefined(cls, reason: UndefinedReason) -> "EvalOutcome":
        return cls(reason=reason)

    @property
    def is_defined(self) -> bool:
        return self.reason is None


@dataclass(frozen=True, slots=True)
class Interval:
    lo: float
    hi: float

    def __post_init__(self):
        lo, hi = float(self.lo), float(self.hi)
        if not (math.isfinite(lo) and math.isfinite(hi)):
            raise ValueError("interval endpoints must be finite")
        if lo > hi:
            raise ValueError(f"interval requires lo <= hi, got [{lo}, {hi}]")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)


# --------------------------------------------------------------------------
# evaluation


def cbrt(v: float) -> float:
    # math.cbrt only exists from 3.11 on; copysign keeps this exactly odd.
    return math.copysign(abs(v) ** (1.0 / 3.0), v)


def _sat(v: float) -> float:
    return math.copysign(HUGE, v) if math.isinf(v) else v


def _is_exact_integer(v: float) -> bool:
    return v == round(v)


def _pow_value(a: float, b: float) -> tuple[float | None, UndefinedReason | None]:
    """Real power a**b, or the reason it is undefined."""
    if a > 0.0:
        try:
            return _sat(math.pow(a, b)), None
        except OverflowError:
            return HUGE, None
    if a == 0.0:
        if b > 0.0:
            return 0.0, None
        return None, UndefinedReason.DIV_BY_ZERO  # 0**0 and 0**negative
    if not _is_exact_integer(b):
        return None, UndefinedReason.POW_NEGATIVE_BASE
    try:
        return _sat(math.pow(a, b)), None
    except OverflowError:
        sign = -1.0 if b % 2.0 == 1.0 else 1.0
        return math.copysign(HUGE, sign), None


def evaluate(e: Expr, x: float) -> EvalOutcome:
    """Evaluate e at x.  Total: undefinedness is reported, never raised.

    When several subexpressions are undefined at x, the reported reason
    belongs to the shallowest violating node, ties broken left to right.
    """
    violations: list[tuple[int, int, UndefinedReason]] = []
    counter = 0

    def visit(node: Expr, depth: int) -> float | None:
        nonlocal counter
        counter += 1
        order = counter

        if isinstance(node, Constant):
            return node.value
        if isinstance(node, Variable):
            return x
        if isinstance(node, Neg):
            v = visit(node.arg, depth + 1)
            return None if v is None else -v
        if isinstance(node, Add):
            l = visit(node.left, depth + 1)
            r = visit(node.right, depth + 1)
            return None if l is None or r is None else _sat(l + r)
        if isinstance(node, Sub):
            l = visit(node.left, depth + 1)
            r = visit(node.right, depth + 1)
            return None if l is None or r is None else _sat(l - r)
        if isinstance(node, Mul):
            l = visit(node.left, depth + 1)
            r = visit(node.right, depth + 1)
            return None if l is None or r is None else _sat(l * r)
        if isinstance(node, Div):
            l = visit(node.left, depth + 1)
            r = visit(node.right, depth + 1)
            if r == 0.0:
                violations.append((depth, order, UndefinedReason.DIV_BY_ZERO))
                return None
            return None if l is None or r is None else _sat(l / r)
        if isinstance(node, Pow):
            a = visit(node.base, depth + 1)
            b = visit(node.exponent, depth + 1)
            if a is None or b is None:
                return None
            v, bad = _pow_value(a, b)
            if bad is not None:
                violations.append((depth, order, bad))
                return None
            return v
        assert isinstance(node, Func)
        u = visit(node.arg, depth + 1)
        if u is None:
            return None
        name = node.name
        if name == "sin":
            return math.sin(u)
        if name == "cos":
            return math.cos(u)
        if name == "tan":
            # Undefined only when the argument hits a pole exactly in floats.
            if math.cos(u) == 0.0:
                violations.append((depth, order, UndefinedReason.TAN_POLE))
                return None
            return _sat(math.tan(u))
        if name == "exp":
            try:
                return math.exp(u)
            except OverflowError:
                return HUGE
        if name == "ln":
            if u <= 0.0:
                violations.append((depth, order, UndefinedReason.LOG_NON_POSITIVE))
                return None
            return math.log(u)
        if name == "sqrt":
            if u < 0.0:
                violations.append((depth, order, UndefinedReason.EVEN_ROOT_OF_NEGATIVE))
                return None
            return math.sqrt(u)
        if name == "cbrt":
            return cbrt(u)
        assert name == "abs"
        return abs(u)

    value = visit(e, 0)
    if value is not None:
        return EvalOutcome.of(value)
    violations.sort(key=lambda t: (t[0], t[1]))
    return EvalOutcome.undefined(violations[0][2])


# --------------------------------------------------------------------------
# parsing

_TOKEN_RE = re.compile(
    r"""(?P<ws>\s+)
      | (?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
      | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
      | (?P<op>[-+*/^()])
    """,
    re.VERBOSE,
)


class ParseError(ValueError):
    """Syntax error carrying the byte offset of the offending input."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at offset {position})")
        self.message = message
        self.position = position


@dataclass(frozen=True, slots=True)
class _Token:
    kind: str  # "number" | "ident" | "op" | "end"
    text: str
    pos: int


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        if kind != "ws":
            tokens.append(_Token(kind, m.group(), pos))
        pos = m.end()
    tokens.append(_Token("end", "", len(text)))
    return tokens


class _Parser:
    """Recursive descent over:

    expr  := term (("+"|"-") term)*
    term  := unary (("*"|"/") unary)*
    unary := "-" unary | power
    power := atom ("^" unary)?
    atom  := number | variable | funcname "(" expr ")" | "(" expr ")"
    """

    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.index = 0
        self.variable_name: str | None = None

    def peek(self) -> _Token:
        return self.tokens[self.index]

    def advance(self) -> _Token:
        tok = self.tokens[self.index]
        self.index += 1
        return tok

    def expect_op(self, op: str):
        tok = self.peek()
        if tok.kind != "op" or tok.text != op:
            raise ParseError(f"expected {op!r}, found {tok.text or 'end of input'!r}", tok.pos)
        self.advance()

    def parse(self) -> Expr:
        e = self.expr()
        tok = self.peek()
        if tok.kind != "end":
            raise ParseError(f"expected end of input, found {tok.text!r}", tok.pos)
        return e

    def expr(self) -> Expr:
        e = self.term()
        while self.peek().kind == "op" and self.peek().text in "+-":
            op = self.advance().text
            rhs = self.term()
            e = Add(e, rhs) if op == "+" else Sub(e, rhs)
        return e

    def term(self) -> Expr:
        e = self.unary()
        while self.peek().kind == "op" and self.peek().text in "*/":
            op = self.advance().text
            rhs = self.unary()
            e = Mul(e, rhs) if op == "*" else Div(e, rhs)
        return e

    def unary(self) -> Expr:
        tok = self.peek()
        if tok.kind == "op" and tok.text == "-":
            self.advance()
            return Neg(self.unary())
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        tok = self.peek()
        if tok.kind == "op" and tok.text == "^":
            self.advance()
            return Pow(base, self.unary())  # right-associative via unary
        return base

    def atom(self) -> Expr:
        tok = self.peek()
        if tok.kind == "number":
            self.advance()
            return Constant(float(tok.text))
        if tok.kind == "ident":
            self.advance()
            follows_paren = self.peek().kind == "op" and self.peek().text == "("
            if follows_paren:
                if tok.text not in FUNCTION_NAMES:
                    raise ParseError(f"unknown function name {tok.text!r}", tok.pos)
                self.advance()
                arg = self.expr()
                self.expect_op(")")
                return Func(tok.text, arg)
            if tok.text in FUNCTION_NAMES:
                raise ParseError(f"expected '(' after function name {tok.text!r}", self.peek().pos)
            if self.variable_name is None:
                self.variable_name = tok.text
            elif tok.text != self.variable_name:
                raise ParseError(
                    f"multiple distinct variable names: {self.variable_name!r} and {tok.text!r}",
                    tok.pos,
                )
            return X
        if tok.kind == "op" and tok.text == "(":
            self.advance()
            e = self.expr()
            self.expect_op(")")
            return e
        raise ParseError(
            f"expected a number, variable, function call or '(', found {tok.text or 'end of input'!r}",
            tok.pos,
        )


def parse(text: str) -> Expr:
    return _Parser(text).parse()


# --------------------------------------------------------------------------
# formatting

# Binding levels: 1 add/sub, 2 mul/div, 3 unary minus, 4 power, 5 atoms.
_LEVEL_ADD, _LEVEL_MUL, _LEVEL_UNARY, _LEVEL_POW, _LEVEL_ATOM = 1, 2, 3, 4, 5


def format_number(v: float) -> str:
    if v == int(v) and abs(v) < 1e16:
        return str(int(v))
    return repr(v)


def _level(e: Expr) -> int:
    if isinstance(e, (Add, Sub)):
        return _LEVEL_ADD
    if isinstance(e, (Mul, Div)):
        return _LEVEL_MUL
    if isinstance(e, Neg):
        return _LEVEL_UNARY
    if isinstance(e, Pow):
        return _LEVEL_POW
    if isinstance(e, Constant) and e.value < 0:
        # no negative literals in the grammar: "-3" re-parses as a negation
        return _LEVEL_UNARY
    return _LEVEL_ATOM


def _fmt(e: Expr, min_level: int) -> str:
    if isinstance(e, Constant):
        text = format_number(e.value)
    elif isinstance(e, Variable):
        text = "x"
    elif isinstance(e, Func):
        text = f"{e.name}({_fmt(e.arg, _LEVEL_ADD)})"
    elif isinstance(e, Neg):
        text = "-" + _fmt(e.arg, _LEVEL_UNARY)
    elif isinstance(e, Add):
        text = _fmt(e.left, _LEVEL_ADD) + "+" + _fmt(e.right, _LEVEL_MUL)
    elif isinstance(e, Sub):
        text = _fmt(e.left, _LEVEL_ADD) + "-" + _fmt(e.right, _LEVEL_MUL)
    elif isinstance(e, Mul):
        text = _fmt(e.left, _LEVEL_MUL) + "*" + _fmt(e.right, _LEVEL_UNARY)
    elif isinstance(e, Div):
        text = _fmt(e.left, _LEVEL_MUL) + "/" + _fmt(e.right, _LEVEL_UNARY)
    else:
        assert isinstance(e, Pow)
        text = _fmt(e.base, _LEVEL_ATOM) + "^" + _fmt(e.exponent, _LEVEL_UNARY)
    if _level(e) < min_level:
        return f"({text})"
    return text


def format_expr(e: Expr) -> str:
    """Render e with minimal parentheses; parse(format_expr(e)) == e."""
    return _fmt(e, _LEVEL_ADD)
