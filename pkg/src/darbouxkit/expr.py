"""Exact differential-rational expressions over jet variables.

An :class:`Expr` is kept permanently in canonical form: a reduced fraction
``num/den`` of sparse polynomials with :class:`fractions.Fraction`
coefficients, the denominator monic with respect to a graded-lexicographic
order on atoms.  Atoms are the independent variables ``x`` and ``y``, jet
variables (``a``, ``a_x``, ``q_xxy`` ...) and the transcendental kernels
``exp(u)`` and ``ln(u)``.

Exponentials are split over the additive terms of a polynomial argument, so
``exp(x + y)`` is stored as ``exp(x)*exp(y)`` and ``exp(-x)`` as ``1/exp(x)``.
With that convention the product rule ``exp(u)*exp(v) = exp(u + v)`` and
``exp(0) = 1`` hold structurally.

Only the multivariate gcd is delegated to sympy's sparse polynomial rings.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Dict, Iterable, Mapping, NamedTuple, Tuple, Union

from sympy import QQ, symbols
from sympy.polys.orderings import lex
from sympy.polys.rings import PolyRing

__all__ = [
    "ExprError",
    "DivisionByZero",
    "SubstitutionError",
    "Var",
    "JetVar",
    "Kernel",
    "Expr",
    "ZeroTest",
    "X",
    "Y",
    "ZERO",
    "ONE",
    "const",
    "jet",
    "as_expr",
    "exp",
    "ln",
    "diff",
    "normalize",
    "is_zero",
    "zero_test",
    "substitute",
]


class ExprError(ValueError):
    """Base class for expression errors."""


class DivisionByZero(ExprError, ZeroDivisionError):
    """Raised when dividing by an expression that normalizes to zero."""


class SubstitutionError(ExprError):
    pass


# --------------------------------------------------------------------------
# atoms


@dataclass(frozen=True)
class Var:
    """An independent variable, ``x`` or ``y``."""

    name: str

    @cached_property
    def sort_key(self) -> tuple:
        return (0, self.name)

    def __str__(self) -> str:
        return self.name


_JET_NAME = re.compile(r"^([A-Za-z%][A-Za-z0-9]*)(?:_([xy]+))?$")


@dataclass(frozen=True)
class JetVar:
    """The derivative ``d^dx/dx d^dy/dy`` of the function named ``symbol``."""

    symbol: str
    dx: int = 0
    dy: int = 0

    def __post_init__(self) -> None:
        if self.dx < 0 or self.dy < 0:
            raise ExprError(f"negative jet order for {self.symbol!r}")

    @classmethod
    def from_name(cls, name: str) -> "JetVar":
        match = _JET_NAME.match(name)
        if match is None:
            raise ExprError(f"not a jet variable name: {name!r}")
        suffix = match.group(2) or ""
        return cls(match.group(1), suffix.count("x"), suffix.count("y"))

    @cached_property
    def sort_key(self) -> tuple:
        return (2, self.symbol, self.dx, self.dy)

    @property
    def name(self) -> str:
        if self.dx == 0 and self.dy == 0:
            return self.symbol
        return f"{self.symbol}_{'x' * self.dx}{'y' * self.dy}"

    def shifted(self, var: str) -> "JetVar":
        if var == "x":
            return JetVar(self.symbol, self.dx + 1, self.dy)
        return JetVar(self.symbol, self.dx, self.dy + 1)

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Kernel:
    """``exp(arg)`` or ``ln(arg)`` with a canonical argument."""

    kind: str
    arg: "Expr"

    @cached_property
    def sort_key(self) -> tuple:
        return (3, str(self.arg), self.kind)

    def __str__(self) -> str:
        return f"{self.kind}({self.arg})"


Atom = Union[Var, JetVar, Kernel]
Mono = Tuple[Tuple[Atom, int], ...]
Poly = Dict[Mono, Fraction]

_ONE_MONO: Mono = ()


# --------------------------------------------------------------------------
# sparse polynomial helpers (monomials are sorted (atom, exponent) tuples)


def _sorted_mono(d: Mapping[Atom, int]) -> Mono:
    return tuple(sorted(((a, e) for a, e in d.items() if e), key=lambda t: t[0].sort_key))


def _mono_mul(m1: Mono, m2: Mono) -> Mono:
    if not m1:
        return m2
    if not m2:
        return m1
    d = dict(m1)
    for a, e in m2:
        d[a] = d.get(a, 0) + e
    return _sorted_mono(d)


def _mono_div(m1: Mono, m2: Mono) -> Mono:
    d = dict(m1)
    for a, e in m2:
        d[a] = d.get(a, 0) - e
    return _sorted_mono(d)


def _poly_add(p: Poly, q: Poly, sign: int = 1) -> Poly:
    out = dict(p)
    for m, c in q.items():
        v = out.get(m, 0) + sign * c
        if v:
            out[m] = v
        else:
            out.pop(m, None)
    return out


def _poly_mul(p: Poly, q: Poly) -> Poly:
    if len(p) > len(q):
        p, q = q, p
    out: Poly = {}
    for m1, c1 in p.items():
        for m2, c2 in q.items():
            m = _mono_mul(m1, m2)
            v = out.get(m, 0) + c1 * c2
            if v:
                out[m] = v
            else:
                out.pop(m, None)
    return out


def _poly_scale(p: Poly, c: Fraction) -> Poly:
    if c == 1:
        return p
    return {m: v * c for m, v in p.items()}


def _poly_atoms(p: Poly) -> set:
    return {a for m in p for a, _ in m}


def _poly_partial(p: Poly, atom: Atom) -> Poly:
    out: Poly = {}
    for m, c in p.items():
        for i, (a, e) in enumerate(m):
            if a == atom:
                nm = m[:i] + (((a, e - 1),) if e > 1 else ()) + m[i + 1:]
                out[nm] = out.get(nm, 0) + c * e
                break
    return {m: c for m, c in out.items() if c}


def _atom_order(atoms: Iterable[Atom]) -> list:
    return sorted(atoms, key=lambda a: a.sort_key)


def _mono_key(m: Mono, index: Mapping[Atom, int], n: int) -> tuple:
    vec = [0] * n
    deg = 0
    for a, e in m:
        vec[index[a]] = e
        deg += e
    return (deg, tuple(vec))


def _ordered_terms(p: Poly, atoms: list | None = None) -> list:
    """Terms of ``p`` in decreasing graded-lex order (``x`` most significant)."""
    if atoms is None:
        atoms = _atom_order(_poly_atoms(p))
    index = {a: i for i, a in enumerate(atoms)}
    n = len(atoms)
    return sorted(p.items(), key=lambda t: _mono_key(t[0], index, n), reverse=True)


@lru_cache(maxsize=None)
def _ring(n: int) -> PolyRing:
    return PolyRing(symbols(f"g0:{n}") if n > 1 else (symbols("g0"),), QQ, lex)


def _to_ring(p: Poly, ring: PolyRing, index: Mapping[Atom, int]):
    n = ring.ngens
    terms = {}
    for m, c in p.items():
        vec = [0] * n
        for a, e in m:
            vec[index[a]] = e
        terms[tuple(vec)] = QQ(c.numerator, c.denominator)
    return ring.from_dict(terms)


def _from_ring(elem, atoms: list) -> Poly:
    out: Poly = {}
    for vec, c in elem.items():
        m = tuple((atoms[i], e) for i, e in enumerate(vec) if e)
        out[m] = Fraction(int(c.numerator), int(c.denominator))
    return out


def _cancel(num: Poly, den: Poly) -> Tuple[Poly, Poly]:
    """Reduce ``num/den`` to lowest terms with a monic denominator."""
    if len(den) == 1:
        (dm, dc), = den.items()
        if dm:
            gcd = dict(dm)
            for m in num:
                mexp = dict(m)
                for a in list(gcd):
                    gcd[a] = min(gcd[a], mexp.get(a, 0))
            g = _sorted_mono(gcd)
        else:
            g = _ONE_MONO
        inv = 1 / dc
        if g:
            return ({_mono_div(m, g): c * inv for m, c in num.items()}, {_mono_div(dm, g): Fraction(1)})
        return (_poly_scale(num, inv), {dm: Fraction(1)})
    atoms = _atom_order(_poly_atoms(num) | _poly_atoms(den))
    index = {a: i for i, a in enumerate(atoms)}
    ring = _ring(max(len(atoms), 1))
    p, q = _to_ring(num, ring, index).cancel(_to_ring(den, ring, index))
    num, den = _from_ring(p, atoms), _from_ring(q, atoms)
    lead = _ordered_terms(den, atoms)[0][1]
    if lead != 1:
        inv = 1 / lead
        num, den = _poly_scale(num, inv), _poly_scale(den, inv)
    return num, den


# --------------------------------------------------------------------------
# expressions


def _coerce_number(value) -> Fraction:
    if isinstance(value, bool):
        raise TypeError("booleans are not expressions")
    return Fraction(value)


class Expr:
    """Immutable canonical rational function over atoms."""

    __slots__ = ("_num", "_den", "_hash", "_str")

    def __init__(self, num: Poly, den: Poly):
        # callers guarantee canonical form; use _make for anything else
        self._num = num
        self._den = den
        self._hash = None
        self._str = None

    @classmethod
    def _make(cls, num: Poly, den: Poly) -> "Expr":
        if not den:
            raise DivisionByZero("division by an expression that normalizes to zero")
        if not num:
            return ZERO
        num, den = _cancel(num, den)
        return cls(num, den)

    @classmethod
    def _poly(cls, p: Poly) -> "Expr":
        return cls(p, {_ONE_MONO: Fraction(1)}) if p else ZERO

    @classmethod
    def _atom(cls, atom: Atom) -> "Expr":
        return cls({((atom, 1),): Fraction(1)}, {_ONE_MONO: Fraction(1)})

    # -- structure ---------------------------------------------------------

    @property
    def is_polynomial(self) -> bool:
        return len(self._den) == 1 and _ONE_MONO in self._den

    def is_zero(self) -> bool:
        return not self._num

    def is_constant(self) -> bool:
        return self.is_polynomial and all(not m for m in self._num)

    def as_number(self) -> Fraction | None:
        if not self._num:
            return Fraction(0)
        if self.is_constant():
            return self._num[_ONE_MONO]
        return None

    def atoms(self) -> frozenset:
        return frozenset(_poly_atoms(self._num) | _poly_atoms(self._den))

    def jets(self) -> frozenset:
        """Jet variables occurring anywhere, including inside kernels."""
        out = set()
        for a in self.atoms():
            if isinstance(a, JetVar):
                out.add(a)
            elif isinstance(a, Kernel):
                out |= a.arg.jets()
        return frozenset(out)

    def kernels(self) -> frozenset:
        return frozenset(a for a in self.atoms() if isinstance(a, Kernel))

    def numerator(self) -> "Expr":
        return Expr._poly(self._num)

    def denominator(self) -> "Expr":
        return Expr._poly(self._den)

    def free_of(self, symbol: str) -> bool:
        return all(j.symbol != symbol for j in self.jets())

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other) -> "Expr":
        other = as_expr(other)
        if not other._num:
            return self
        if not self._num:
            return other
        if self._den == other._den:
            if self.is_polynomial:
                return Expr._poly(_poly_add(self._num, other._num))
            return Expr._make(_poly_add(self._num, other._num), self._den)
        num = _poly_add(_poly_mul(self._num, other._den), _poly_mul(other._num, self._den))
        return Expr._make(num, _poly_mul(self._den, other._den))

    __radd__ = __add__

    def __neg__(self) -> "Expr":
        return Expr({m: -c for m, c in self._num.items()}, self._den) if self._num else self

    def __sub__(self, other) -> "Expr":
        return self + (-as_expr(other))

    def __rsub__(self, other) -> "Expr":
        return as_expr(other) + (-self)

    def __mul__(self, other) -> "Expr":
        other = as_expr(other)
        if not self._num or not other._num:
            return ZERO
        if self.is_polynomial and other.is_polynomial:
            return Expr._poly(_poly_mul(self._num, other._num))
        return Expr._make(_poly_mul(self._num, other._num), _poly_mul(self._den, other._den))

    __rmul__ = __mul__

    def reciprocal(self) -> "Expr":
        if not self._num:
            raise DivisionByZero("division by an expression that normalizes to zero")
        return Expr._make(dict(self._den), dict(self._num))

    def __truediv__(self, other) -> "Expr":
        return self * as_expr(other).reciprocal()

    def __rtruediv__(self, other) -> "Expr":
        return as_expr(other) * self.reciprocal()

    def __pow__(self, n: int) -> "Expr":
        if not isinstance(n, int) or isinstance(n, bool):
            raise TypeError("only integer powers are supported")
        if n < 0:
            return self.reciprocal() ** (-n)
        result, base = ONE, self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # -- calculus ----------------------------------------------------------

    def diff(self, var: str, order: int = 1) -> "Expr":
        return diff(self, var, order)

    def partial(self, atom: Atom) -> "Expr":
        """Partial derivative treating ``atom`` as independent of every other atom."""
        dn = _poly_partial(self._num, atom)
        dd = _poly_partial(self._den, atom)
        if not dd:
            return Expr._make(dn, self._den) if dn else ZERO
        num = _poly_add(_poly_mul(dn, self._den), _poly_mul(self._num, dd), -1)
        return Expr._make(num, _poly_mul(self._den, self._den))

    # -- comparison and printing ------------------------------------------

    def _key(self):
        return (frozenset(self._num.items()), frozenset(self._den.items()))

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            other = const(other)
        if not isinstance(other, Expr):
            return NotImplemented
        return self._num == other._num and self._den == other._den

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self._key())
        return self._hash

    def __str__(self) -> str:
        if self._str is None:
            self._str = _format(self)
        return self._str

    def __repr__(self) -> str:
        return f"Expr({str(self)!r})"


# --------------------------------------------------------------------------
# printing


def _format_atom_power(atom: Atom, e: int) -> str:
    s = str(atom)
    return s if e == 1 else f"{s}^{e}"


def _format_poly(p: Poly) -> str:
    if not p:
        return "0"
    parts = []
    for m, c in _ordered_terms(p):
        neg = c < 0
        c = -c if neg else c
        factors = [_format_atom_power(a, e) for a, e in m]
        if c != 1 or not factors:
            factors.insert(0, str(c))
        parts.append(("-" if neg else "+", "*".join(factors)))
    text = parts[0][1] if parts[0][0] == "+" else "-" + parts[0][1]
    for sign, body in parts[1:]:
        text += f" {sign} {body}"
    return text


def _integer_content(p: Poly) -> Tuple[Fraction, Poly]:
    """Split ``p`` as ``c * P`` with ``P`` primitive over the integers."""
    from math import gcd

    den = 1
    for c in p.values():
        den = den * c.denominator // gcd(den, c.denominator)
    ints = {m: int(c * den) for m, c in p.items()}
    g = 0
    for v in ints.values():
        g = gcd(g, v)
    return Fraction(g, den), {m: Fraction(v // g) for m, v in ints.items()}


def _format(e: Expr) -> str:
    if e.is_polynomial:
        return _format_poly(e._num)
    cn, num = _integer_content(e._num)
    cd, den = _integer_content(e._den)
    ratio = cn / cd
    num = _poly_scale(num, Fraction(ratio.numerator))
    num_s = _format_poly(num)
    if len(num) > 1:
        num_s = f"({num_s})"
    den_s = _format_poly(den)
    single = len(den) == 1 and len(next(iter(den))) == 1 and next(iter(den.values())) == 1
    if ratio.denominator != 1:
        den_s = f"{ratio.denominator}*{den_s if len(den) == 1 else '(' + den_s + ')'}"
        single = False
    if not single:
        den_s = f"({den_s})"
    return f"{num_s}/{den_s}"


# --------------------------------------------------------------------------
# constructors

ZERO = Expr({}, {_ONE_MONO: Fraction(1)})
ONE = Expr({_ONE_MONO: Fraction(1)}, {_ONE_MONO: Fraction(1)})
X = Expr._atom(Var("x"))
Y = Expr._atom(Var("y"))


def const(value) -> Expr:
    value = _coerce_number(value)
    return Expr._poly({_ONE_MONO: value}) if value else ZERO


def jet(symbol: str, dx: int = 0, dy: int = 0) -> Expr:
    """The jet variable of ``symbol`` differentiated ``dx`` times in x and ``dy`` in y."""
    return Expr._atom(JetVar(symbol, dx, dy))


def as_expr(value) -> Expr:
    if isinstance(value, Expr):
        return value
    if isinstance(value, str):
        from .parser import parse

        return parse(value)
    return const(value)


def _is_exp_monomial(p: Poly) -> bool:
    if len(p) != 1:
        return False
    (m, c), = p.items()
    return c == 1 and all(isinstance(a, Kernel) and a.kind == "exp" for a, _ in m)


def _leading_negative(p: Poly) -> bool:
    return _ordered_terms(p)[0][1] < 0


def exp(u) -> Expr:
    """``exp(u)``, split into a product of exponentials of monomials."""
    u = as_expr(u)
    if not u.is_polynomial:
        if _leading_negative(u._num):
            return Expr._atom(Kernel("exp", -u)).reciprocal()
        return Expr._atom(Kernel("exp", u))
    result = ONE
    for m, c in u._num.items():
        if len(m) == 1 and m[0][1] == 1 and isinstance(m[0][0], Kernel) and m[0][0].kind == "ln" \
                and c.denominator == 1:
            result = result * m[0][0].arg ** c.numerator
            continue
        generator = Expr._poly({m: Fraction(1, c.denominator)})
        result = result * Expr._atom(Kernel("exp", generator)) ** c.numerator
    return result


def ln(u) -> Expr:
    """``ln(u)`` with ``ln(1) = 0`` and ``ln(exp(w)) = w``."""
    u = as_expr(u)
    if not u._num:
        raise ExprError("ln of an expression that normalizes to zero")
    if u == ONE:
        return ZERO
    if _is_exp_monomial(u._num) and _is_exp_monomial(u._den):
        total = ZERO
        (mn,), (md,) = u._num, u._den
        for k, e in mn:
            total = total + k.arg * e
        for k, e in md:
            total = total - k.arg * e
        return total
    return Expr._atom(Kernel("ln", u))


# --------------------------------------------------------------------------
# differentiation

_DIFF_CACHE: Dict[tuple, Expr] = {}
_DIFF_CACHE_LIMIT = 200_000


def _atom_derivative(atom: Atom, var: str) -> Expr:
    if isinstance(atom, Var):
        return ONE if atom.name == var else ZERO
    if isinstance(atom, JetVar):
        return Expr._atom(atom.shifted(var))
    if atom.kind == "exp":
        return Expr._atom(atom) * _diff1(atom.arg, var)
    return _diff1(atom.arg, var) / atom.arg


def _poly_derivative(p: Poly, var: str) -> Expr:
    poly_part: Poly = {}
    rational = ZERO
    for atom in _poly_atoms(p):
        da = _atom_derivative(atom, var)
        if not da._num:
            continue
        dp = _poly_partial(p, atom)
        if da.is_polynomial:
            poly_part = _poly_add(poly_part, _poly_mul(dp, da._num))
        else:
            rational = rational + Expr._poly(dp) * da
    return Expr._poly(poly_part) + rational


def _diff1(e: Expr, var: str) -> Expr:
    key = (e, var)
    cached = _DIFF_CACHE.get(key)
    if cached is not None:
        return cached
    dn = _poly_derivative(e._num, var)
    if e.is_polynomial:
        result = dn
    else:
        den = Expr._poly(e._den)
        dd = _poly_derivative(e._den, var)
        result = (dn * den - Expr._poly(e._num) * dd) / (den * den)
    if len(_DIFF_CACHE) > _DIFF_CACHE_LIMIT:
        _DIFF_CACHE.clear()
    _DIFF_CACHE[key] = result
    return result


def diff(e, var: str, order: int = 1) -> Expr:
    """Total derivative of ``e`` with respect to ``var`` (``"x"`` or ``"y"``)."""
    if var not in ("x", "y"):
        raise ExprError(f"can only differentiate by x or y, not {var!r}")
    if order < 0:
        raise ExprError("derivative order must be nonnegative")
    e = as_expr(e)
    for _ in range(order):
        e = _diff1(e, var)
    return e


# --------------------------------------------------------------------------
# zero test, normalization, substitution


class ZeroTest(NamedTuple):
    """Outcome of a zero test; ``unreduced_kernels`` flags a possibly incomplete ``False``."""

    zero: bool
    unreduced_kernels: bool

    def __bool__(self) -> bool:
        return self.zero


def zero_test(e) -> ZeroTest:
    e = as_expr(e)
    if not e._num:
        return ZeroTest(True, False)
    return ZeroTest(False, bool(e.kernels()))


def is_zero(e) -> bool:
    return as_expr(e).is_zero()


def normalize(e) -> Expr:
    """Canonical form of an expression, a parse tree, or source text.

    ``Expr`` values are canonical on construction, so normalizing one is the
    identity; trees and strings are rebuilt through exact arithmetic.
    """
    if isinstance(e, Expr):
        return e
    if isinstance(e, str):
        from .parser import parse

        return parse(e)
    from .parser import Node, build_expr

    if isinstance(e, Node):
        return build_expr(e)
    return const(e)


def _binding_key(key) -> JetVar:
    if isinstance(key, JetVar):
        return key
    if isinstance(key, Expr):
        atoms = key.atoms()
        if key.is_polynomial and len(key._num) == 1 and len(atoms) == 1:
            (atom,) = atoms
            if isinstance(atom, JetVar) and key == Expr._atom(atom):
                return atom
        raise SubstitutionError(f"cannot bind {key}")
    return JetVar.from_name(str(key))


def _poly_eval(p: Poly, values: Mapping[Atom, Expr]) -> Expr:
    # group by the bound part so each distinct product of values is formed once
    groups: Dict[Mono, Poly] = {}
    for m, c in p.items():
        bound = tuple((a, e) for a, e in m if a in values)
        rest = tuple((a, e) for a, e in m if a not in values)
        groups.setdefault(bound, {})[rest] = c
    total = ZERO
    for bound, rest in groups.items():
        factor = ONE
        for a, e in bound:
            factor = factor * values[a] ** e
        total = total + factor * Expr._poly(rest)
    return total


def substitute(e, bindings: Mapping) -> Expr:
    """Replace function symbols (and all their jets) by expressions.

    A key ``"b"`` binds the function ``b``; ``JetVar(b, i, j)`` becomes the
    corresponding derivative of the bound value.  A key such as ``"b_y"``
    binds at jet level: every jet of ``b`` at or above ``b_y`` is rewritten,
    while ``b``, ``b_x``, ... stay free.
    """
    e = as_expr(e)
    bases: Dict[str, Tuple[JetVar, Expr]] = {}
    for key, value in bindings.items():
        base = _binding_key(key)
        if base.symbol in bases:
            raise SubstitutionError(f"conflicting bindings for jets of {base.symbol!r}")
        bases[base.symbol] = (base, as_expr(value))
    if not bases:
        return e
    return _substitute(e, bases, {})


def _substitute(e: Expr, bases, memo) -> Expr:
    values: Dict[Atom, Expr] = {}
    for atom in e.atoms():
        value = memo.get(atom)
        if value is None:
            value = _substitute_atom(atom, bases, memo)
            memo[atom] = value
        if value is not _UNCHANGED:
            values[atom] = value
    if not values:
        return e
    num = _poly_eval(e._num, values)
    if e.is_polynomial:
        return num
    return num / _poly_eval(e._den, values)


_UNCHANGED = object()


def _substitute_atom(atom: Atom, bases, memo):
    if isinstance(atom, JetVar):
        hit = bases.get(atom.symbol)
        if hit is None:
            return _UNCHANGED
        base, value = hit
        if atom.dx < base.dx or atom.dy < base.dy:
            return _UNCHANGED
        return diff(diff(value, "x", atom.dx - base.dx), "y", atom.dy - base.dy)
    if isinstance(atom, Kernel):
        if all(j.symbol not in bases for j in atom.arg.jets()):
            return _UNCHANGED
        arg = _substitute(atom.arg, bases, memo)
        return exp(arg) if atom.kind == "exp" else ln(arg)
    return _UNCHANGED
