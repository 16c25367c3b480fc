"""Linear partial differential operators in Dx, Dy with expression coefficients."""
from __future__ import annotations

from dataclasses import dataclass
from math import comb
from typing import Dict, Iterable, Iterator, Mapping, Tuple

from .expr import ONE, ZERO, Expr, as_expr, diff

Index = Tuple[int, int]


def _top_level_sum(text: str) -> bool:
    depth = 0
    for i, ch in enumerate(text):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif depth == 0 and ch in "+-" and i > 0 and text[i - 1] == " ":
            return True
    return False


def _monomial_text(i: int, j: int, x: str = "Dx", y: str = "Dy", sep: str = "*") -> str:
    parts = []
    if i:
        parts.append(x if i == 1 else f"{x}^{i}")
    if j:
        parts.append(y if j == 1 else f"{y}^{j}")
    return sep.join(parts)


def _format_terms(terms: Iterable[Tuple[Index, Expr]], x: str, y: str) -> str:
    pieces = []
    for (i, j), c in terms:
        mono = _monomial_text(i, j, x, y)
        cs = str(c)
        if not mono:
            body = cs
        elif cs == "1":
            body = mono
        elif cs == "-1":
            body = "-" + mono
        elif _top_level_sum(cs):
            body = f"({cs})*{mono}"
        else:
            body = f"{cs}*{mono}"
        pieces.append(body)
    if not pieces:
        return "0"
    text = pieces[0]
    for body in pieces[1:]:
        if body.startswith("-") and not _top_level_sum(body):
            text += " - " + body[1:]
        else:
            text += " + " + body
    return text


def _term_order(index: Index) -> tuple:
    i, j = index
    return (-(i + j), -i)


class LPDO:
    """An element of K[Dx, Dy]: a sparse map ``(i, j) -> coefficient of Dx^i Dy^j``.

    Coefficients stand to the left of the derivatives.  Zero coefficients are
    never stored.
    """

    __slots__ = ("_coeffs", "_hash")

    def __init__(self, coeffs: Mapping[Index, object] | None = None):
        clean: Dict[Index, Expr] = {}
        for (i, j), c in (coeffs or {}).items():
            if i < 0 or j < 0:
                raise ValueError(f"negative derivative index {(i, j)}")
            c = as_expr(c)
            if not c.is_zero():
                clean[(int(i), int(j))] = c
        self._coeffs = clean
        self._hash = None

    # -- constructors ----------------------------------------------------

    @classmethod
    def D(cls, var: str) -> "LPDO":
        if var == "x":
            return cls({(1, 0): ONE})
        if var == "y":
            return cls({(0, 1): ONE})
        raise ValueError(f"no derivation D{var}")

    @classmethod
    def scalar(cls, c) -> "LPDO":
        return cls({(0, 0): c})

    @classmethod
    def monomial(cls, i: int, j: int, c=ONE) -> "LPDO":
        return cls({(i, j): c})

    # -- structure -------------------------------------------------------

    @property
    def order(self) -> int:
        if not self._coeffs:
            return -1
        return max(i + j for i, j in self._coeffs)

    def is_zero(self) -> bool:
        return not self._coeffs

    def coeff(self, i: int, j: int) -> Expr:
        return self._coeffs.get((i, j), ZERO)

    def items(self) -> Iterator[Tuple[Index, Expr]]:
        return iter(sorted(self._coeffs.items(), key=lambda t: _term_order(t[0])))

    def indices(self) -> list:
        return sorted(self._coeffs, key=_term_order)

    def __len__(self) -> int:
        return len(self._coeffs)

    # -- algebra ---------------------------------------------------------

    def __add__(self, other: "LPDO") -> "LPDO":
        other = _as_operator(other)
        out = dict(self._coeffs)
        for k, c in other._coeffs.items():
            out[k] = out.get(k, ZERO) + c
        return LPDO(out)

    __radd__ = __add__

    def __neg__(self) -> "LPDO":
        return LPDO({k: -c for k, c in self._coeffs.items()})

    def __sub__(self, other: "LPDO") -> "LPDO":
        return self + (-_as_operator(other))

    def __rsub__(self, other) -> "LPDO":
        return _as_operator(other) - self

    def scale(self, c) -> "LPDO":
        """Left multiplication by the function ``c``."""
        c = as_expr(c)
        return LPDO({k: c * v for k, v in self._coeffs.items()})

    def compose(self, other: "LPDO") -> "LPDO":
        return compose(self, _as_operator(other))

    def __matmul__(self, other: "LPDO") -> "LPDO":
        return compose(self, _as_operator(other))

    def apply(self, f) -> Expr:
        return apply(self, f)

    def __eq__(self, other) -> bool:
        if not isinstance(other, LPDO):
            return NotImplemented
        return self._coeffs == other._coeffs

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._coeffs.items()))
        return self._hash

    def __str__(self) -> str:
        return _format_terms(self.items(), "Dx", "Dy")

    def __repr__(self) -> str:
        return f"LPDO({str(self)!r})"

    # -- serialization ---------------------------------------------------

    def to_terms(self) -> list:
        return [{"dx": i, "dy": j, "coeff": str(c)} for (i, j), c in self.items()]

    def to_json(self) -> dict:
        return {"terms": self.to_terms()}

    @classmethod
    def from_terms(cls, terms: Iterable[Mapping]) -> "LPDO":
        out: Dict[Index, Expr] = {}
        for t in terms:
            key = (int(t["dx"]), int(t["dy"]))
            out[key] = out.get(key, ZERO) + as_expr(t["coeff"])
        return cls(out)

    @classmethod
    def from_json(cls, data: Mapping) -> "LPDO":
        return cls.from_terms(data["terms"])

    @classmethod
    def parse(cls, text: str) -> "LPDO":
        from .parser import parse_operator

        return parse_operator(text)


def _as_operator(value) -> LPDO:
    if isinstance(value, LPDO):
        return value
    return LPDO.scalar(value)


ZERO_OP = LPDO()
IDENTITY = LPDO.scalar(ONE)


def _mixed_partial(f: Expr, s: int, t: int) -> Expr:
    return diff(diff(f, "x", s), "y", t)


def compose(A: LPDO, B: LPDO) -> LPDO:
    """``A o B`` via ``Dx^i Dy^j o f = sum C(i,s) C(j,t) f_{x^s y^t} Dx^(i-s) Dy^(j-t)``."""
    out: Dict[Index, Expr] = {}
    for (i, j), a in A._coeffs.items():
        for (k, l), b in B._coeffs.items():
            for s in range(i + 1):
                for t in range(j + 1):
                    db = _mixed_partial(b, s, t)
                    if db.is_zero():
                        continue
                    key = (i - s + k, j - t + l)
                    term = a * db * (comb(i, s) * comb(j, t))
                    out[key] = out.get(key, ZERO) + term
    return LPDO(out)


def linear_combine(ops: Iterable[Tuple[object, LPDO]]) -> LPDO:
    """``sum c_i * Op_i`` with functions multiplied on the left."""
    out: Dict[Index, Expr] = {}
    for c, op in ops:
        c = as_expr(c)
        for k, v in _as_operator(op)._coeffs.items():
            out[k] = out.get(k, ZERO) + c * v
    return LPDO(out)


def apply(A: LPDO, f) -> Expr:
    """The function ``A(f)``."""
    f = as_expr(f)
    total = ZERO
    for (i, j), c in A._coeffs.items():
        total = total + c * _mixed_partial(f, i, j)
    return total


@dataclass(frozen=True)
class SymbolPoly:
    """Homogeneous polynomial ``sum c_ij X^i Y^j`` in commuting formal X, Y."""

    coeffs: Tuple[Tuple[Index, Expr], ...]

    @classmethod
    def from_map(cls, coeffs: Mapping[Index, Expr]) -> "SymbolPoly":
        items = [(k, v) for k, v in coeffs.items() if not v.is_zero()]
        degrees = {i + j for (i, j), _ in items}
        if len(degrees) > 1:
            raise ValueError("symbol must be homogeneous")
        return cls(tuple(sorted(items, key=lambda t: _term_order(t[0]))))

    @property
    def degree(self) -> int:
        return self.coeffs[0][0][0] + self.coeffs[0][0][1] if self.coeffs else -1

    def as_dict(self) -> Dict[Index, Expr]:
        return dict(self.coeffs)

    def __mul__(self, other: "SymbolPoly") -> "SymbolPoly":
        out: Dict[Index, Expr] = {}
        for (i, j), a in self.coeffs:
            for (k, l), b in other.coeffs:
                key = (i + k, j + l)
                out[key] = out.get(key, ZERO) + a * b
        return SymbolPoly.from_map(out)

    def __str__(self) -> str:
        return _format_terms(self.coeffs, "X", "Y")


def symbol_of(A: LPDO) -> SymbolPoly:
    if A.is_zero():
        raise ValueError("the zero operator has no symbol")
    d = A.order
    return SymbolPoly.from_map({k: v for k, v in A._coeffs.items() if sum(k) == d})


def _power(base: LPDO, n: int, cache: Dict[int, LPDO]) -> LPDO:
    if n not in cache:
        cache[n] = IDENTITY if n == 0 else compose(_power(base, n - 1, cache), base)
    return cache[n]


def gauge(A: LPDO, alpha) -> LPDO:
    """``exp(-alpha) o A o exp(alpha)``, written on the jets of ``alpha``.

    Uses ``exp(-alpha) Dx exp(alpha) = Dx + alpha_x`` (likewise for Dy), so
    no exponential ever enters the coefficients.
    """
    alpha = as_expr(alpha)
    gx = LPDO({(1, 0): ONE, (0, 0): diff(alpha, "x")})
    gy = LPDO({(0, 1): ONE, (0, 0): diff(alpha, "y")})
    xs: Dict[int, LPDO] = {}
    ys: Dict[int, LPDO] = {}
    out = ZERO_OP
    for (i, j), c in A._coeffs.items():
        out = out + compose(_power(gx, i, xs), _power(gy, j, ys)).scale(c)
    return out


__all__ = [
    "LPDO",
    "SymbolPoly",
    "ZERO_OP",
    "IDENTITY",
    "compose",
    "linear_combine",
    "apply",
    "symbol_of",
    "gauge",
]
