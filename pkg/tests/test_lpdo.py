import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from darbouxkit.expr import jet
from darbouxkit.lpdo import LPDO, apply, compose, gauge, linear_combine, symbol_of
from darbouxkit.parser import parse, parse_operator

P = parse
O = parse_operator


def test_leibniz_examples():
    assert compose(O("Dx"), O("x")) == O("x*Dx + 1")
    assert str(compose(O("Dy + y"), O("Dx + x"))) == "Dx*Dy + y*Dx + x*Dy + x*y"
    assert compose(O("Dx"), O("Dy")) == O("Dx*Dy")


def test_linear_combine():
    assert linear_combine([(1, O("Dx")), (-1, O("Dx"))]).is_zero()
    assert linear_combine([(1, O("Dx*Dy")), (1, O("Dx - Dy"))]) == O("Dx*Dy + Dx - Dy")
    assert linear_combine([(2, O("Dx + q*Dy"))]) == O("2*Dx + 2*q*Dy")


def test_symbols():
    assert str(symbol_of(O("Dx*Dy + a*Dx"))) == "X*Y"
    assert str(symbol_of(O("Dx + q*Dy + r"))) == "X + q*Y"
    assert str(symbol_of(O("Dx^2 + 3"))) == "X^2"
    with pytest.raises(ValueError):
        symbol_of(LPDO())


def test_gauge_examples():
    alpha = jet("alpha")
    assert gauge(O("Dx"), alpha) == O("Dx + alpha_x")
    assert gauge(O("Dx*Dy"), alpha) == O("Dx*Dy + alpha_y*Dx + alpha_x*Dy + alpha_xy + alpha_x*alpha_y")
    assert gauge(O("Dx + q*Dy + r"), alpha) == O("Dx + q*Dy + r + alpha_x + q*alpha_y")


def test_gauge_matches_conjugation_by_exponential():
    # second route: multiply by exp(alpha), apply, divide by exp(alpha)
    alpha = P("x^2*y + a")
    op = O("Dx*Dy + b*Dx + x*Dy + c")
    f = P("f")
    direct = apply(gauge(op, alpha), f)
    conj = apply(op, P("exp(x^2*y + a)") * f) / P("exp(x^2*y + a)")
    assert direct == conj


def test_apply_examples():
    assert apply(O("Dx*Dy"), P("x + y")) == 0
    assert apply(O("Dx - Dy"), P("x*y")) == P("y - x")
    assert apply(O("Dx*Dy + a*Dx + b*Dy + c"), 1) == P("c")


def test_json_round_trip():
    op = O("Dx*Dy + a/x*Dx - Dy + 3")
    assert LPDO.from_json(op.to_json()) == op
    assert op.to_terms()[0] == {"dx": 1, "dy": 1, "coeff": "1"}


# -- properties on random operators -------------------------------------------

COEFFS = ["1", "x", "y", "a", "x*y - 1", "b_x", "2", "q/x"]


@st.composite
def operators(draw, max_order=3):
    terms = {}
    for _ in range(draw(st.integers(1, 4))):
        i = draw(st.integers(0, max_order))
        j = draw(st.integers(0, max_order - i))
        terms[(i, j)] = P(draw(st.sampled_from(COEFFS)))
    return LPDO(terms)


@settings(max_examples=30, deadline=None)
@given(operators(2), operators(2), operators(2))
def test_associativity(A, B, C):
    assert compose(compose(A, B), C) == compose(A, compose(B, C))


@settings(max_examples=30, deadline=None)
@given(operators(), operators(), st.sampled_from(["x*y^2", "a*x", "exp(x)", "b + y"]))
def test_apply_composition(A, B, f):
    f = P(f)
    assert apply(compose(A, B), f) == apply(A, apply(B, f))


@settings(max_examples=30, deadline=None)
@given(operators(), operators())
def test_symbol_is_multiplicative(A, B):
    assert symbol_of(compose(A, B)).as_dict() == (symbol_of(A) * symbol_of(B)).as_dict()


@settings(max_examples=25, deadline=None)
@given(operators(2), operators(2), st.sampled_from(["x*y", "a", "x^2 - y", "alpha"]))
def test_gauge_properties(A, B, alpha):
    alpha = P(alpha)
    assert gauge(gauge(A, alpha), -alpha) == A
    assert gauge(compose(A, B), alpha) == compose(gauge(A, alpha), gauge(B, alpha))
    assert symbol_of(gauge(A, alpha)).as_dict() == symbol_of(A).as_dict()
