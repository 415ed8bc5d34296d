import random
import sys

import pytest

from deriv_audit.derivative import differentiate, simplify
from deriv_audit.expr import (
    Add, Constant, Div, Func, Mul, Neg, Pow, X, evaluate, format_expr, parse,
)
from helpers import central_diff, eval_defined, fd_regular_point, random_expr


def rel_close(a, b, rel):
    return abs(a - b) <= rel * max(abs(a), abs(b), 1e-300)


class TestRules:
    def test_variable(self):
        assert differentiate(parse("x")).simplified == Constant(1)

    def test_product_with_cube_root_matches_hand_form(self):
        d = differentiate(parse("cbrt(x)*sin(x^2)")).simplified
        hand = parse("(6*x^2*cos(x^2)+sin(x^2))/(3*cbrt(x^2))")
        v = evaluate(d, 0.5).value
        w = evaluate(hand, 0.5).value
        assert rel_close(v, w, 1e-12)

    def test_counterexample_derivative_matches_hand_form(self):
        d = differentiate(parse("cbrt(x)*cos(x^2)")).simplified
        hand = parse("(cos(x^2)-6*x^2*sin(x^2))/(3*cbrt(x^2))")
        v = evaluate(d, 0.7).value
        w = evaluate(hand, 0.7).value
        assert rel_close(v, w, 1e-12)

    def test_cbrt_derivative_hole_is_division_by_zero(self):
        d = differentiate(Func("cbrt", X)).raw
        assert d == Div(Constant(1), Mul(Constant(3), Func("cbrt", Pow(X, Constant(2)))))
        assert not evaluate(d, 0.0).is_defined

    def test_abs_derivative_keeps_the_corner_visible(self):
        d = differentiate(Func("abs", X)).simplified
        assert not evaluate(d, 0.0).is_defined
        assert evaluate(d, 2.0).value == 1.0
        assert evaluate(d, -2.0).value == -1.0

    @pytest.mark.parametrize("text,x", [
        ("tan(x)", 0.4),
        ("exp(2*x)", -0.3),
        ("ln(x^2+1)", 1.1),
        ("sqrt(x+2)", 0.5),
        ("x^x", 1.7),
        ("sin(cos(x))", 0.9),
        ("1/(x+3)", 0.2),
    ])
    def test_against_central_difference(self, text, x):
        d = differentiate(parse(text)).simplified
        sym = evaluate(d, x).value
        fd = central_diff(parse(text), x, 1e-6)
        assert abs(sym - fd) <= max(1e-5, 1e-5 * abs(sym))


class TestSimplify:
    def test_identity_rules(self):
        assert simplify(parse("1*x + 0")) == X

    def test_zero_product_requires_total_other_factor(self):
        assert simplify(parse("cbrt(x)*0")) == Constant(0)
        e = parse("ln(x)*0")
        assert simplify(e) == e  # must keep the hole at x <= 0

    def test_integer_exponents_combine(self):
        assert simplify(parse("x^2*x^3")) == Pow(X, Constant(5))

    def test_negative_exponents_do_not_combine(self):
        # x^-1 * x^2 is undefined at 0; x^1 is not
        e = Mul(Pow(X, Constant(-1)), Pow(X, Constant(2)))
        assert simplify(e) == e

    def test_division_by_zero_not_folded(self):
        e = parse("1/0")
        assert simplify(e) == e

    def test_idempotent(self):
        rng = random.Random(3104)
        for _ in range(300):
            e = random_expr(rng, depth=7)
            s = simplify(e)
            assert simplify(s) == s

    def test_domain_preservation(self):
        rng = random.Random(9217)
        checked = 0
        while checked < 1000:
            e = random_expr(rng, depth=6)
            s = simplify(e)
            x = rng.uniform(-4.0, 4.0)
            assert evaluate(e, x).is_defined == evaluate(s, x).is_defined
            checked += 1

    def test_raw_and_simplified_agree(self):
        rng = random.Random(5150)
        eps = sys.float_info.epsilon
        checked = 0
        while checked < 500:
            e = random_expr(rng, depth=5)
            d = differentiate(e)
            x = rng.uniform(-3.0, 3.0)
            raw = evaluate(d.raw, x)
            simp = evaluate(d.simplified, x)
            assert raw.is_defined == simp.is_defined
            if raw.is_defined:
                a, b = raw.value, simp.value
                assert abs(a - b) <= 4.0 * eps * max(abs(a), abs(b)) + 5e-324
            checked += 1


class TestProperties:
    def test_linearity(self):
        rng = random.Random(6006)
        checked = 0
        while checked < 200:
            e1 = random_expr(rng, depth=4)
            e2 = random_expr(rng, depth=4)
            a = rng.choice([2.0, -0.5, 3.0])
            combo = Add(Mul(Constant(abs(a)), e1) if a > 0 else Neg(Mul(Constant(abs(a)), e1)), e2)
            d_combo = differentiate(combo).simplified
            d1 = differentiate(e1).simplified
            d2 = differentiate(e2).simplified
            x = rng.uniform(-2.0, 2.0)
            lhs = eval_defined(d_combo, x)
            v1 = eval_defined(d1, x)
            v2 = eval_defined(d2, x)
            if lhs is None or v1 is None or v2 is None:
                continue
            rhs = a * v1 + v2
            if abs(rhs) > 1e12:
                continue
            assert abs(lhs - rhs) <= max(1e-9, 1e-9 * abs(rhs))
            checked += 1

    def test_oracle_agreement(self):
        # symbolic derivative vs central difference at filtered regular points
        rng = random.Random(20240841)
        checked = 0
        while checked < 300:
            e = random_expr(rng, depth=6)
            d = differentiate(e).simplified
            x = fd_regular_point(e, d, rng)
            if x is None:
                continue
            sym = eval_defined(d, x)
            fd = central_diff(e, x, 1e-6)
            assert sym is not None and fd is not None
            assert abs(sym - fd) <= max(1e-5, 1e-5 * abs(sym)), format_expr(e)
            checked += 1
