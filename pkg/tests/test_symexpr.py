from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from kmucontact.symexpr import (
    ExponentOverflow,
    ExprSyntaxError,
    InadmissiblePoint,
    NonMonomialDivision,
    ScalarExpr,
    UnknownCoordinate,
    add,
    eval_at,
    is_zero,
    mul,
    neg,
    parse_expr,
    partial_diff,
    pow_int,
)

C = ("x", "y", "z")


def P(text):
    return parse_expr(text, C)


# -- worked examples -----------------------------------------------------------

def test_parse_coefficient_of_e3():
    assert P("2*y*z^2").terms == {(0, 1, 2): 2}


def test_parse_zero_is_empty():
    assert P("0").terms == {}
    assert is_zero(P("0"))


def test_parse_monomial_product():
    assert P("(1/z^4)*(1/z^4)").terms == {(0, 0, -8): 1}


def test_parse_rationals_and_unary_minus():
    assert P("-3/4*x^-1 + 2") == ScalarExpr(C, {(-1, 0, 0): Fraction(-3, 4), (0, 0, 0): 2})
    assert P("-(x - y)") == P("y - x")


def test_parse_whitespace_is_insignificant():
    assert P(" 2 * y*z ^ 2 ") == P("2*y*z^2")


def test_additive_inverse():
    x = P("x")
    assert add(x, neg(x)).is_zero()


def test_difference_of_squares():
    assert mul(P("1 - z^-4"), P("1 + z^-4")) == P("1 - z^-8")


def test_pow_of_monomial():
    assert pow_int(P("z^-4"), 2) == P("z^-8")
    assert pow_int(P("2*z"), -2) == P("1/4*z^-2")


def test_negative_power_of_sum_rejected():
    with pytest.raises(NonMonomialDivision):
        pow_int(P("1 + z"), -1)
    with pytest.raises(NonMonomialDivision):
        P("(1 + z)^-1")


def test_partial_derivatives():
    assert partial_diff(P("z^-4"), "z") == P("-4*z^-5")
    assert partial_diff(P("2*y*z^2"), "x").is_zero()
    assert partial_diff(P("1 - z^-8"), "z") == P("8*z^-9")


def test_eval_examples():
    assert eval_at(P("1/z^4"), {"x": 0, "y": 0, "z": 1}) == 1
    assert eval_at(P("0"), {"x": 5, "y": 0, "z": 0}) == 0
    assert eval_at(P("2*(1 + z^-4)"), {"x": 0, "y": 0, "z": 1}) == 4


def test_eval_at_pole_rejected():
    with pytest.raises(InadmissiblePoint):
        eval_at(P("z^-1"), {"x": 0, "y": 0, "z": 0})


def test_is_zero_examples():
    assert not is_zero(P("1 - z^-8"))
    assert is_zero(mul(P("0"), P("x^3 + 7*y")))


@pytest.mark.parametrize("text", ["x +", "2 ** x", "(x", "x)", "3/0", "x^y", "@"])
def test_syntax_errors(text):
    with pytest.raises(ExprSyntaxError):
        P(text)


def test_syntax_error_reports_position():
    with pytest.raises(ExprSyntaxError) as info:
        P("x + * y")
    assert info.value.pos == 4


def test_unknown_coordinate():
    with pytest.raises(UnknownCoordinate):
        P("w + 1")


def test_division_by_sum_rejected():
    with pytest.raises(NonMonomialDivision):
        P("x / (y + z)")


def test_exponent_overflow():
    with pytest.raises(ExponentOverflow):
        pow_int(P("x^5000"), 3)


def test_str_round_trips():
    e = P("3 - 2*x*y^-1 + 1/7*z^-8")
    assert P(str(e)) == e


# -- property suite --------------------------------------------------------------

coeffs = st.fractions(min_value=-9, max_value=9, max_denominator=6)
exps = st.tuples(*(st.integers(-3, 3) for _ in C))
exprs = st.dictionaries(exps, coeffs, max_size=4).map(lambda t: ScalarExpr(C, t))
points = st.tuples(*(st.fractions(min_value=-5, max_value=5, max_denominator=5).filter(bool) for _ in C)).map(
    lambda v: dict(zip(C, v)))


@settings(max_examples=1000, deadline=None)
@given(exprs, exprs, exprs)
def test_ring_axioms(a, b, c):
    one = ScalarExpr.const(C, 1)
    assert a + b == b + a
    assert a * b == b * a
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a + 0 == a and a * one == a
    assert (a - a).is_zero()


@settings(max_examples=1000, deadline=None)
@given(exprs, exprs, st.sampled_from(C))
def test_leibniz_rule(a, b, c):
    assert partial_diff(a * b, c) == partial_diff(a, c) * b + a * partial_diff(b, c)


@settings(max_examples=1000, deadline=None)
@given(exprs, exprs, points)
def test_evaluation_is_a_homomorphism(a, b, p):
    assert eval_at(a + b, p) == eval_at(a, p) + eval_at(b, p)
    assert eval_at(a * b, p) == eval_at(a, p) * eval_at(b, p)


@settings(max_examples=300, deadline=None)
@given(exprs)
def test_mixed_partials_commute(a):
    assert a.diff("x").diff("y") == a.diff("y").diff("x")
    assert a.diff("y").diff("z") == a.diff("z").diff("y")


@settings(max_examples=300, deadline=None)
@given(st.lists(st.tuples(exps, coeffs), max_size=6))
def test_canonical_form_is_order_independent(pairs):
    def build(items):
        e = ScalarExpr(C)
        for k, v in items:
            e = e + ScalarExpr(C, {k: v})
        return e

    fwd, rev = build(pairs), build(reversed(pairs))
    assert fwd == rev and fwd.terms == rev.terms
    assert all(v != 0 for v in fwd.terms.values())


# -- sympy as an independent oracle ----------------------------------------------

SX = sympy.symbols(C)


def to_sympy(e: ScalarExpr):
    return sum((sympy.Rational(v.numerator, v.denominator) * sympy.Mul(*(s**k for s, k in zip(SX, ex)))
                for ex, v in e.terms.items()), sympy.Integer(0))


@settings(max_examples=200, deadline=None)
@given(exprs, exprs, st.sampled_from(range(3)))
def test_agrees_with_sympy(a, b, i):
    assert sympy.expand(to_sympy(a * b) - to_sympy(a) * to_sympy(b)) == 0
    assert sympy.expand(to_sympy(a.diff(C[i])) - sympy.diff(to_sympy(a), SX[i])) == 0


@settings(max_examples=200, deadline=None)
@given(exprs)
def test_printed_form_parses_back(a):
    assert P(str(a)) == a
