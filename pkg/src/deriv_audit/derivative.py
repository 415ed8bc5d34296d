"""Rule-based symbolic differentiation and domain-preserving simplification.

The derivative is the *formal* rule output: where a factor is not
differentiable the expression simply comes out undefined there, even if the
function itself has a derivative.  Exposing that gap is the point, so
simplification is deliberately conservative: no rewrite may add or remove an
undefined point.  In particular there is no rational normalization or GCD
cancellation, and a product with a zero factor only folds away when the
other factor is total.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .expr import (
    Add, Constant, Div, Expr, Func, Mul, Neg, Pow, Sub, Variable,
    _is_exact_integer, _pow_value, _sat, cbrt,
)

__all__ = ["DerivativeResult", "differentiate", "simplify"]


@dataclass(frozen=True, slots=True)
class DerivativeResult:
    raw: Expr
    simplified: Expr


def differentiate(e: Expr) -> DerivativeResult:
    raw = _d(e)
    return DerivativeResult(raw=raw, simplified=simplify(raw))


def _d(e: Expr) -> Expr:
    if isinstance(e, Constant):
        return Constant(0)
    if isinstance(e, Variable):
        return Constant(1)
    if isinstance(e, Neg):
        return Neg(_d(e.arg))
    if isinstance(e, Add):
        return Add(_d(e.left), _d(e.right))
    if isinstance(e, Sub):
        return Sub(_d(e.left), _d(e.right))
    if isinstance(e, Mul):
        return Add(Mul(_d(e.left), e.right), Mul(e.left, _d(e.right)))
    if isinstance(e, Div):
        num = Sub(Mul(_d(e.left), e.right), Mul(e.left, _d(e.right)))
        return Div(num, Pow(e.right, Constant(2)))
    if isinstance(e, Pow):
        u, v = e.base, e.exponent
        if isinstance(v, Constant):
            return Mul(Mul(v, Pow(u, Constant(v.value - 1.0))), _d(u))
        # general exponent: u^v * (v' ln u + v u'/u)
        return Mul(e, Add(Mul(_d(v), Func("ln", u)), Mul(v, Div(_d(u), u))))
    assert isinstance(e, Func)
    u = e.arg
    du = _d(u)
    if e.name == "sin":
        return Mul(Func("cos", u), du)
    if e.name == "cos":
        return Mul(Neg(Func("sin", u)), du)
    if e.name == "tan":
        return Div(du, Pow(Func("cos", u), Constant(2)))
    if e.name == "exp":
        return Mul(Func("exp", u), du)
    if e.name == "ln":
        return Div(du, u)
    if e.name == "sqrt":
        return Div(du, Mul(Constant(2), Func("sqrt", u)))
    if e.name == "cbrt":
        # denominator form on purpose: the hole at u = 0 must surface as a
        # division by zero, not hide inside a fractional power
        return Div(du, Mul(Constant(3), Func("cbrt", Pow(u, Constant(2)))))
    assert e.name == "abs"
    # u/abs(u) rather than sign(u): the corner at u = 0 stays visible
    return Div(Mul(du, u), Func("abs", u))


# --------------------------------------------------------------------------
# simplification

_MAX_PASSES = 64


def simplify(e: Expr) -> Expr:
    """Apply the domain-preserving rewrite passes to a fixpoint."""
    for _ in range(_MAX_PASSES):
        reduced = _simplify_once(e)
        if reduced == e:
            return reduced
        e = reduced
    return e


def is_everywhere_defined(e: Expr) -> bool:
    """Conservative syntactic check that e is defined for every real x."""
    if isinstance(e, (Constant, Variable)):
        return True
    if isinstance(e, Neg):
        return is_everywhere_defined(e.arg)
    if isinstance(e, (Add, Sub, Mul)):
        return is_everywhere_defined(e.left) and is_everywhere_defined(e.right)
    if isinstance(e, Div):
        return False
    if isinstance(e, Pow):
        c = e.exponent
        return (
            isinstance(c, Constant)
            and _is_exact_integer(c.value)
            and c.value >= 1.0
            and is_everywhere_defined(e.base)
        )
    assert isinstance(e, Func)
    if e.name in ("sin", "cos", "exp", "cbrt", "abs"):
        return is_everywhere_defined(e.arg)
    return False  # tan (float poles), sqrt, ln


def _positive_int_exponent(e: Expr) -> float | None:
    if isinstance(e, Pow) and isinstance(e.exponent, Constant):
        c = e.exponent.value
        if _is_exact_integer(c) and c >= 1.0:
            return c
    return None


def _fold_constant(e: Expr) -> Expr | None:
    """Fold an operation on constants when it is defined there."""
    if isinstance(e, Neg) and isinstance(e.arg, Constant):
        return Constant(-e.arg.value)
    if isinstance(e, (Add, Sub, Mul)) and isinstance(e.left, Constant) and isinstance(e.right, Constant):
        a, b = e.left.value, e.right.value
        if isinstance(e, Add):
            return Constant(_sat(a + b))
        if isinstance(e, Sub):
            return Constant(_sat(a - b))
        return Constant(_sat(a * b))
    if isinstance(e, Div) and isinstance(e.left, Constant) and isinstance(e.right, Constant):
        if e.right.value != 0.0:
            return Constant(_sat(e.left.value / e.right.value))
        return None
    if isinstance(e, Pow) and isinstance(e.base, Constant) and isinstance(e.exponent, Constant):
        v, bad = _pow_value(e.base.value, e.exponent.value)
        return Constant(v) if bad is None else None
    if isinstance(e, Func) and isinstance(e.arg, Constant):
        u = e.arg.value
        name = e.name
        if name == "sin":
            return Constant(math.sin(u))
        if name == "cos":
            return Constant(math.cos(u))
        if name == "tan":
            return Constant(_sat(math.tan(u))) if math.cos(u) != 0.0 else None
        if name == "exp":
            try:
                return Constant(math.exp(u))
            except OverflowError:
                return Constant(_sat(math.inf))
        if name == "ln":
            return Constant(math.log(u)) if u > 0.0 else None
        if name == "sqrt":
            return Constant(math.sqrt(u)) if u >= 0.0 else None
        if name == "cbrt":
            return Constant(cbrt(u))
        if name == "abs":
            return Constant(abs(u))
    return None


def _is_const(e: Expr, v: float) -> bool:
    return isinstance(e, Constant) and e.value == v


def _rewrite(e: Expr) -> Expr:
    folded = _fold_constant(e)
    if folded is not None:
        return folded
    if isinstance(e, Neg) and isinstance(e.arg, Neg):
        return e.arg.arg
    if isinstance(e, Add):
        if _is_const(e.right, 0.0):
            return e.left
        if _is_const(e.left, 0.0):
            return e.right
    if isinstance(e, Sub):
        if _is_const(e.right, 0.0):
            return e.left
        if _is_const(e.left, 0.0):
            return Neg(e.right)
    if isinstance(e, Mul):
        if _is_const(e.right, 1.0):
            return e.left
        if _is_const(e.left, 1.0):
            return e.right
        # 0 * u == 0 only when u cannot be undefined anywhere
        if _is_const(e.right, 0.0) and is_everywhere_defined(e.left):
            return Constant(0)
        if _is_const(e.left, 0.0) and is_everywhere_defined(e.right):
            return Constant(0)
        # u^a * u^b -> u^(a+b) for positive integer exponents
        a = _positive_int_exponent(e.left)
        b = _positive_int_exponent(e.right)
        if a is not None and b is not None and e.left.base == e.right.base:  # type: ignore[union-attr]
            return Pow(e.left.base, Constant(a + b))  # type: ignore[union-attr]
    if isinstance(e, Div) and _is_const(e.right, 1.0):
        return e.left
    if isinstance(e, Pow):
        if _is_const(e.exponent, 1.0):
            return e.base
        # (u^a)^b -> u^(a*b) for positive integer exponents
        b = _positive_int_exponent(e)
        if b is not None:
            a = _positive_int_exponent(e.base)
            if a is not None:
                return Pow(e.base.base, Constant(a * b))  # type: ignore[union-attr]
    return e


def _simplify_once(e: Expr) -> Expr:
    if isinstance(e, (Constant, Variable)):
        return e
    if isinstance(e, Neg):
        return _rewrite(Neg(_simplify_once(e.arg)))
    if isinstance(e, Func):
        return _rewrite(Func(e.name, _simplify_once(e.arg)))
    if isinstance(e, Pow):
        return _rewrite(Pow(_simplify_once(e.base), _simplify_once(e.exponent)))
    ctor = type(e)
    return _rewrite(ctor(_simplify_once(e.left), _simplify_once(e.right)))  # type: ignore[union-attr]
