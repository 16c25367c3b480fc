import pytest

from darbouxkit.lpdo import LPDO
from darbouxkit.parser import ParseError, parse, parse_operator, parse_tree, tree_size


def test_precedence_and_unary_minus():
    assert parse("-x^2") == parse("-(x^2)")
    assert parse("2*x + 3*y - x") == parse("x + 3*y")
    assert parse("x^-1") == parse("1/x")


def test_jet_names():
    assert str(parse("a_xyx")) == "a_xxy"
    assert parse("psi1_y") == parse("diff(psi1, y)")
    assert parse("diff(a, x, y, y)") == parse("a_xyy")


@pytest.mark.parametrize("text, position", [
    ("x +", 3),
    ("x $ y", 2),
    ("(x + y", 6),
    ("a_z", 0),
    ("exp_x", 0),
    ("diff(a, z)", 8),
    ("x^y", 2),
])
def test_errors_report_position(text, position):
    with pytest.raises(ParseError) as info:
        parse(text)
    assert info.value.position == position
    assert f"at position {position}" in str(info.value)


def test_operator_words_rejected_in_scalar_text():
    with pytest.raises(ParseError):
        parse("Dx + 1")


def test_operator_text():
    op = parse_operator("Dx*Dy + a*Dx + b*Dy + c")
    assert op.coeff(1, 1) == 1 and op.coeff(0, 0) == parse("c")
    assert parse_operator("Dx*x") == LPDO({(1, 0): parse("x"), (0, 0): 1})
    assert parse_operator("(Dx + 1)^2") == parse_operator("Dx*Dx + 2*Dx + 1")
    assert parse_operator("Dx/x") == parse_operator("Dx*(1/x)")


def test_operator_division_by_operator_rejected():
    with pytest.raises(ParseError):
        parse_operator("1/Dx")


def test_tree_size():
    assert tree_size(parse_tree("x + y*z")) == 5
