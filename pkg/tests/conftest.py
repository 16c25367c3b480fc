import random
from fractions import Fraction

import pytest
from hypothesis import strategies as st

from darbouxkit.parser import EvaluationError, evaluate_tree, parse_tree

LEAVES = ["x", "y", "a", "b", "a_x", "b_y", "q", "q_xy", "1", "2", "3"]


def random_expr_text(rng: random.Random, depth: int = 3) -> str:
    """Random kernel-free expression text over x, y and a few jets."""
    if depth == 0 or rng.random() < 0.25:
        return rng.choice(LEAVES)
    op = rng.choice("+-*/^")
    left = random_expr_text(rng, depth - 1)
    if op == "^":
        return f"({left})^{rng.choice([-1, 2, 3])}"
    right = random_expr_text(rng, depth - 1)
    return f"({left}) {op} ({right})"


def random_point(rng: random.Random) -> dict:
    names = ["x", "y"] + [n for n in LEAVES if n[0].isalpha() and n not in ("x", "y")]
    return {n: Fraction(rng.randint(-9, 9), rng.randint(1, 5)) for n in names}


def jet_value(symbol: str, dx: int, dy: int) -> Fraction:
    # deterministic values for jets introduced by differentiation
    return Fraction(sum(map(ord, symbol)) % 13 - 6 + 3 * dx - 2 * dy, 1 + (dx + 2 * dy) % 3)


def evaluate_text(text: str, point: dict) -> Fraction:
    return evaluate_tree(parse_tree(text), point, jet_value)


def agree_at(e1, e2, rng: random.Random, tries: int = 5) -> bool:
    """Compare two expressions at random rational points, skipping poles."""
    checked = 0
    for _ in range(tries * 4):
        point = random_point(rng)
        try:
            v1 = evaluate_text(str(e1), point)
            v2 = evaluate_text(str(e2), point)
        except EvaluationError:
            continue
        if v1 != v2:
            return False
        checked += 1
        if checked == tries:
            break
    return True


@pytest.fixture
def rng():
    return random.Random(20240521)


leaf = st.sampled_from(LEAVES)


def _combine(children):
    binary = st.tuples(children, st.sampled_from(["+", "-", "*"]), children).map(
        lambda t: f"({t[0]}) {t[1]} ({t[2]})")
    power = st.tuples(children, st.integers(2, 3)).map(lambda t: f"({t[0]})^{t[1]}")
    return binary | power


# polynomial expressions only, so no division by zero can arise
poly_text = st.recursive(leaf, _combine, max_leaves=8)
