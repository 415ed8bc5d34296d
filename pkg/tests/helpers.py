"""Shared test utilities: random expression generation, substitution, and
finite-difference oracles kept independent of the library's derivative path."""

from __future__ import annotations

import random

from deriv_audit.expr import (
    Add, Constant, Div, Expr, Func, Mul, Neg, Pow, Sub, Variable, X,
    FUNCTION_NAMES, evaluate, subexpressions,
)

FUNCS = sorted(FUNCTION_NAMES)

_NICE_CONSTANTS = [0.0, 1.0, 2.0, 3.0, 4.0, 0.5, 1.5, 0.25]


def _leaf(rng: random.Random) -> Expr:
    r = rng.random()
    if r < 0.55:
        return X
    if r < 0.8:
        return Constant(rng.choice(_NICE_CONSTANTS))
    # raw doubles round-trip exactly through repr; keep them nonnegative since
    # the grammar has no negative literals
    return Constant(rng.uniform(0.0, 3.0))


def _exponent(rng: random.Random, depth: int) -> Expr:
    r = rng.random()
    if r < 0.7:
        return Constant(float(rng.randint(1, 4)))
    if r < 0.85:
        return Constant(rng.choice([0.5, 1.5, 2.0, 3.0]))
    return random_expr(rng, max(depth - 2, 0))


def random_expr(rng: random.Random, depth: int) -> Expr:
    """Random AST over the full node and function set, depth-bounded."""
    if depth <= 0 or rng.random() < 0.2:
        return _leaf(rng)
    r = rng.random()
    if r < 0.16:
        return Add(random_expr(rng, depth - 1), random_expr(rng, depth - 1))
    if r < 0.28:
        return Sub(random_expr(rng, depth - 1), random_expr(rng, depth - 1))
    if r < 0.46:
        return Mul(random_expr(rng, depth - 1), random_expr(rng, depth - 1))
    if r < 0.56:
        return Div(random_expr(rng, depth - 1), random_expr(rng, depth - 1))
    if r < 0.66:
        return Pow(random_expr(rng, depth - 1), _exponent(rng, depth))
    if r < 0.76:
        return Neg(random_expr(rng, depth - 1))
    return Func(rng.choice(FUNCS), random_expr(rng, depth - 1))


def substitute_var(e: Expr, replacement: Expr) -> Expr:
    """Replace every occurrence of the variable with another expression."""
    if isinstance(e, Variable):
        return replacement
    if isinstance(e, (Constant,)):
        return e
    if isinstance(e, Neg):
        return Neg(substitute_var(e.arg, replacement))
    if isinstance(e, Func):
        return Func(e.name, substitute_var(e.arg, replacement))
    if isinstance(e, Pow):
        return Pow(substitute_var(e.base, replacement), substitute_var(e.exponent, replacement))
    ctor = type(e)
    return ctor(substitute_var(e.left, replacement), substitute_var(e.right, replacement))


def eval_defined(e: Expr, x: float) -> float | None:
    out = evaluate(e, x)
    return out.value if out.is_defined else None


def central_diff(e: Expr, x: float, h: float) -> float | None:
    hi = eval_defined(e, x + h)
    lo = eval_defined(e, x - h)
    if hi is None or lo is None:
        return None
    return (hi - lo) / (2.0 * h)


def second_diff(e: Expr, x: float, h: float) -> float | None:
    hi = eval_defined(e, x + h)
    mid = eval_defined(e, x)
    lo = eval_defined(e, x - h)
    if hi is None or mid is None or lo is None:
        return None
    return (hi - 2.0 * mid + lo) / (h * h)


def fd_regular_point(e: Expr, d: Expr, rng: random.Random, tries: int = 40) -> float | None:
    """A point where e and its derivative are defined, values are moderate,
    and central differences at three step sizes already agree; there the
    finite-difference oracle is trustworthy at the test tolerance."""
    for _ in range(tries):
        x = rng.uniform(-3.0, 3.0)
        vals = [eval_defined(e, x + off)
                for off in (0.0, 1e-6, -1e-6, 5e-4, -5e-4, 1e-3, -1e-3)]
        if any(v is None or abs(v) > 1e4 for v in vals):
            continue
        dv = eval_defined(d, x)
        if dv is None or abs(dv) > 1e4:
            continue
        if eval_defined(d, x + 1e-3) is None or eval_defined(d, x - 1e-3) is None:
            continue
        fd6 = central_diff(e, x, 1e-6)
        fd5 = central_diff(e, x, 1e-5)
        fd4 = central_diff(e, x, 1e-4)
        if fd6 is None or fd5 is None or fd4 is None:
            continue
        tol = max(1e-5, 1e-5 * abs(fd6))
        if abs(fd4 - fd6) > 0.25 * tol or abs(fd5 - fd6) > 0.1 * tol:
            continue
        return x
    return None


def max_intermediate(e: Expr, x: float) -> float | None:
    """Largest magnitude taken by any subexpression of e at x.

    The cancellation floor of a difference quotient scales with the absolute
    rounding error of f, i.e. with the biggest intermediate value (a huge
    addend or trig argument), not with f's output."""
    worst = 0.0
    for node in subexpressions(e):
        out = evaluate(node, x)
        if not out.is_defined:
            return None
        worst = max(worst, abs(out.value))
    return worst


def probe_regular_point(f: Expr, d: Expr, rng: random.Random, tries: int = 40) -> float | None:
    """A dyadic point where f is smooth and modest across the whole quotient
    window, so the difference-quotient classifier is inside its asymptotics."""
    for _ in range(tries):
        x0 = rng.randint(-128, 128) / 64.0
        fv = eval_defined(f, x0)
        if fv is None or abs(fv) > 10.0:
            continue
        dv = eval_defined(d, x0)
        if dv is None or abs(dv) > 100.0:
            continue
        ok = True
        for off in (0.1, 0.05, 0.025, 0.0125, 1e-4, 1e-6, 0.0):
            for s in (off, -off):
                m = max_intermediate(f, x0 + s)
                if m is None or m > 30.0:
                    ok = False
                    break
            if not ok:
                break
        if not ok:
            continue
        for off in (-0.1, -0.05, 0.0, 0.05, 0.1):
            c = second_diff(f, x0 + off, 1e-4)
            if c is None or abs(c) > 10.0:
                ok = False
                break
        if not ok:
            continue
        fd4 = central_diff(f, x0, 1e-4)
        fd5 = central_diff(f, x0, 1e-5)
        if fd4 is None or fd5 is None or abs(fd4 - fd5) > 1e-5 * max(1.0, abs(fd4)):
            continue
        return x0
    return None
