"""Darboux transformations of L = DxDy + a Dx + b Dy + c.

Construction (Wronskian formulas, Laplace transformations, coefficient
matching), verification of N o L = L1 o M, and the normalizing operations on
M: elimination of mixed derivatives, expansion, left scaling and
composition.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Sequence, Tuple

from .expr import ONE, ZERO, Expr, JetVar, as_expr, diff, jet, substitute
from .lpdo import LPDO, apply, compose


class DarbouxError(ValueError):
    """A precondition of a Darboux construction does not hold."""


class KernelError(DarbouxError):
    """A function that should lie in Ker L does not."""


class DegenerateError(DarbouxError):
    pass


class ChainingError(DarbouxError):
    pass


@dataclass(frozen=True)
class HyperbolicL:
    """``Dx Dy + a Dx + b Dy + c``."""

    a: Expr = ZERO
    b: Expr = ZERO
    c: Expr = ZERO

    def __post_init__(self):
        for name in ("a", "b", "c"):
            object.__setattr__(self, name, as_expr(getattr(self, name)))

    @classmethod
    def generic(cls) -> "HyperbolicL":
        return cls(jet("a"), jet("b"), jet("c"))

    def to_lpdo(self) -> LPDO:
        return LPDO({(1, 1): ONE, (1, 0): self.a, (0, 1): self.b, (0, 0): self.c})

    @classmethod
    def from_lpdo(cls, op: LPDO) -> "HyperbolicL":
        extra = set(op.indices()) - {(1, 1), (1, 0), (0, 1), (0, 0)}
        if extra or op.coeff(1, 1) != ONE:
            raise DarbouxError(f"not of the form DxDy + a*Dx + b*Dy + c: {op}")
        return cls(op.coeff(1, 0), op.coeff(0, 1), op.coeff(0, 0))

    def apply(self, f) -> Expr:
        return apply(self.to_lpdo(), f)

    def to_json(self) -> dict:
        return {"a": str(self.a), "b": str(self.b), "c": str(self.c)}

    @classmethod
    def from_json(cls, data) -> "HyperbolicL":
        return cls(as_expr(data["a"]), as_expr(data["b"]), as_expr(data["c"]))

    def __str__(self) -> str:
        return str(self.to_lpdo())


@dataclass(frozen=True)
class FirstOrderM:
    """``Dx + q Dy + r``."""

    q: Expr
    r: Expr = ZERO

    def __post_init__(self):
        object.__setattr__(self, "q", as_expr(self.q))
        object.__setattr__(self, "r", as_expr(self.r))

    @classmethod
    def generic(cls) -> "FirstOrderM":
        return cls(jet("q"), jet("r"))

    def to_lpdo(self) -> LPDO:
        return LPDO({(1, 0): ONE, (0, 1): self.q, (0, 0): self.r})

    @classmethod
    def from_lpdo(cls, op: LPDO, rescale: bool = False) -> "FirstOrderM":
        """Read ``Dx + q Dy + r`` off ``op``; with ``rescale`` a Dx coefficient
        other than one is divided out on the left first."""
        if op.order != 1 or op.coeff(1, 0).is_zero():
            raise DarbouxError(f"not of the form Dx + q*Dy + r: {op}")
        lead = op.coeff(1, 0)
        if lead != ONE:
            if not rescale:
                raise DarbouxError(f"Dx coefficient must be 1, got {lead}")
            op = op.scale(lead.reciprocal())
        return cls(op.coeff(0, 1), op.coeff(0, 0))

    def to_json(self) -> dict:
        return {"q": str(self.q), "r": str(self.r)}

    @classmethod
    def from_json(cls, data) -> "FirstOrderM":
        return cls(as_expr(data["q"]), as_expr(data["r"]))

    def __str__(self) -> str:
        return str(self.to_lpdo())


@dataclass(frozen=True)
class DarbouxWitness:
    """``N o L = L1 o M`` together with the residual equations of the match."""

    L: HyperbolicL
    M: LPDO
    N: LPDO
    L1: HyperbolicL
    residuals: Tuple[Expr, ...] = field(default=())

    @property
    def exact(self) -> bool:
        return all(r.is_zero() for r in self.residuals)

    def same_operators(self, other: "DarbouxWitness") -> bool:
        """Equality of (L, M, N, L1), ignoring how residuals were recorded."""
        return (self.L, self.M, self.N, self.L1) == (other.L, other.M, other.N, other.L1)

    def defect(self) -> LPDO:
        """``N o L - L1 o M``; the zero operator for a genuine transformation."""
        return compose(self.N, self.L.to_lpdo()) - compose(self.L1.to_lpdo(), self.M)

    def to_json(self) -> dict:
        return {
            "L": self.L.to_json(),
            "M": self.M.to_terms(),
            "N": self.N.to_terms(),
            "L1": self.L1.to_json(),
            "residuals": [str(r) for r in self.residuals],
        }

    @classmethod
    def from_json(cls, data) -> "DarbouxWitness":
        return cls(
            HyperbolicL.from_json(data["L"]),
            LPDO.from_terms(data["M"]),
            LPDO.from_terms(data["N"]),
            HyperbolicL.from_json(data["L1"]),
            tuple(as_expr(r) for r in data["residuals"]),
        )


def _defect_residuals(N: LPDO, L: HyperbolicL, L1: HyperbolicL, M: LPDO) -> Tuple[Expr, ...]:
    defect = compose(N, L.to_lpdo()) - compose(L1.to_lpdo(), M)
    return tuple(c for _, c in defect.items())


def witness(L: HyperbolicL, M: LPDO, N: LPDO, L1: HyperbolicL) -> DarbouxWitness:
    """Package a candidate transformation; residuals are the nonzero defect coefficients."""
    return DarbouxWitness(L, M, N, L1, _defect_residuals(N, L, L1, M))


# --------------------------------------------------------------------------
# linear coefficient matching


def solve_linear(equations: Sequence[Expr], unknowns: Sequence[JetVar]
                 ) -> Tuple[Dict[JetVar, Expr], List[int]]:
    """Solve equations affine in ``unknowns`` by Gaussian elimination.

    Equations are processed in the given order; each one either yields a new
    pivot or is left over.  Free unknowns are set to zero.  Returns the
    solution and the indices of the leftover equations, whose values at the
    solution are the residuals.
    """
    zero_all = {u: ZERO for u in unknowns}
    pivots: List[Tuple[JetVar, Dict[JetVar, Expr], Expr]] = []
    leftover: List[int] = []
    for idx, eq in enumerate(equations):
        row = {u: eq.partial(u) for u in unknowns}
        if any(u in c.jets() for c in row.values() for u in unknowns):
            raise DarbouxError("equation is not affine in the unknowns")
        rhs = substitute(eq, zero_all)
        for u, prow, prhs in pivots:
            f = row[u]
            if f.is_zero():
                continue
            row = {v: row[v] - f * prow[v] for v in unknowns}
            rhs = rhs - f * prhs
        pivot = next((u for u in unknowns if not row[u].is_zero()), None)
        if pivot is None:
            leftover.append(idx)
            continue
        inv = row[pivot].reciprocal()
        pivots.append((pivot, {v: row[v] * inv for v in unknowns}, rhs * inv))
    solution: Dict[JetVar, Expr] = {u: ZERO for u in unknowns}
    for u, prow, prhs in reversed(pivots):
        value = -prhs
        for v in unknowns:
            if v != u and not prow[v].is_zero():
                value = value - prow[v] * solution[v]
        solution[u] = value
    return solution, leftover


_N0, _A1, _B1, _C1 = (JetVar(f"%{name}") for name in ("n0", "a1", "b1", "c1"))
_UNKNOWNS = (_N0, _A1, _B1, _C1)


def _match(L: HyperbolicL, M: LPDO, N_top: LPDO):
    """Find ``N = N_top + n0`` and ``L1`` with ``N o L - L1 o M`` as small as possible.

    Returns the witness pieces, and the indices and values of the unmatched
    coefficient equations.
    """
    unknown = {u: Expr._atom(u) for u in _UNKNOWNS}
    N = N_top + LPDO.scalar(unknown[_N0])
    L1 = HyperbolicL(unknown[_A1], unknown[_B1], unknown[_C1])
    defect = compose(N, L.to_lpdo()) - compose(L1.to_lpdo(), M)
    indices = defect.indices()
    equations = [defect.coeff(*k) for k in indices]
    solution, leftover = solve_linear(equations, _UNKNOWNS)
    subs = dict(solution)
    N = N_top + LPDO.scalar(solution[_N0])
    L1 = HyperbolicL(solution[_A1], solution[_B1], solution[_C1])
    residuals = [(indices[i], substitute(equations[i], subs)) for i in leftover]
    return N, L1, residuals


# residual equations of the (1,1) match: coefficients of Dy and of 1
RESIDUAL_INDICES = ((0, 1), (0, 0))


def solve_intertwining(L: HyperbolicL, M: FirstOrderM) -> DarbouxWitness:
    """Determine N and L1 for ``M = Dx + q Dy + r`` by exact coefficient matching.

    The ansatz is ``N = Dx + q Dy + n0``; the coefficients at DxDx, DyDy,
    DxDy and Dx fix ``a1, b1, n0, c1`` uniquely and the remaining two
    coefficient equations (Dy and 1) are returned as residuals.
    """
    if M.q.is_zero():
        raise DegenerateError("q must not vanish")
    N_top = LPDO({(1, 0): ONE, (0, 1): M.q})
    N, L1, residuals = _match(L, M.to_lpdo(), N_top)
    found = dict(residuals)
    return DarbouxWitness(L, M.to_lpdo(), N, L1, tuple(found.get(k, ZERO) for k in RESIDUAL_INDICES))


def n0_formula(M: FirstOrderM) -> Expr:
    """Free term of ``N = M - (ln q)_x + q_y``."""
    return M.r - diff(M.q, "x") / M.q + diff(M.q, "y")


def existence_conditions(L: HyperbolicL, M: FirstOrderM) -> Tuple[Expr, Expr]:
    """Both sides of the necessary and sufficient conditions for (L, M) to admit a DT."""
    a, b, c, q, r = L.a, L.b, L.c, M.q, M.r

    def d(f, *vs):
        for v in vs:
            f = diff(f, v)
        return f

    a_x, a_y, b_x, b_y = d(a, "x"), d(a, "y"), d(b, "x"), d(b, "y")
    q_x, q_y, q_xy = d(q, "x"), d(q, "y"), d(q, "x", "y")
    r_x, r_y, r_xy = d(r, "x"), d(r, "y"), d(r, "x", "y")
    c_x, c_y = d(c, "x"), d(c, "y")
    first = (-q * r_x + q ** 2 * r_y + q_x * r - b * q_x + b_x * q
             + q ** 2 * (b_y - a * q_y - a_x) - q ** 3 * a_y + q_y * q_x - q_xy * q)
    second = (-c * q_x + (c - a * r) * q_y * q + (a * r + r_y) * q_x + (c_y - r * a_y) * q ** 2
              + (r * r_y - a * r_x - r_y * b - r_xy - r * a_x + c_x) * q)
    return first, second


def has_darboux(L: HyperbolicL, M: FirstOrderM) -> bool:
    return all(e.is_zero() for e in existence_conditions(L, M))


# --------------------------------------------------------------------------
# Laplace transformations and normalization


def laplace(L: HyperbolicL, direction: str) -> DarbouxWitness:
    """Laplace transformation: ``M = Dy + a`` for ``"x"``, ``M = Dx + b`` for ``"y"``.

    N and L1 come from the same coefficient matching as for first-order M;
    a free parameter (vanishing Laplace invariant) is set to zero.
    """
    if direction == "x":
        M = LPDO({(0, 1): ONE, (0, 0): L.a})
        N_top = LPDO.D("y")
    elif direction == "y":
        M = LPDO({(1, 0): ONE, (0, 0): L.b})
        N_top = LPDO.D("x")
    else:
        raise DarbouxError(f"direction must be 'x' or 'y', not {direction!r}")
    N, L1, residuals = _match(L, M, N_top)
    return DarbouxWitness(L, M, N, L1, tuple(r for _, r in residuals if not r.is_zero()))


def _mixed_order(index: Tuple[int, int]) -> tuple:
    i, j = index
    return (i + j, i)


def reduce_mixed(L: HyperbolicL, M: LPDO) -> LPDO:
    """Eliminate mixed derivatives from M modulo right multiples of L."""
    Lop = L.to_lpdo()
    while True:
        mixed = [k for k in M.indices() if k[0] >= 1 and k[1] >= 1]
        if not mixed:
            return M
        i, j = max(mixed, key=_mixed_order)
        M = M - compose(LPDO.monomial(i - 1, j - 1, M.coeff(i, j)), Lop)


def bidegree(L: HyperbolicL, M: LPDO) -> Tuple[int, int]:
    reduced = reduce_mixed(L, M)
    if reduced.is_zero():
        raise DarbouxError("bi-degree of an operator in the left ideal of L is undefined")
    return (max(i for i, _ in reduced.indices()), max(j for _, j in reduced.indices()))


def expand(M: LPDO, A: LPDO, L: HyperbolicL) -> LPDO:
    """``M + A o L``."""
    return M + compose(A, L.to_lpdo())


def left_scale(w: DarbouxWitness, p) -> DarbouxWitness:
    """Replace M by ``p M``: ``N' = p N`` and ``L1' = p o L1 o p^-1``."""
    p = as_expr(p)
    if p.is_zero():
        raise DegenerateError("cannot scale by a function that normalizes to zero")
    L1 = compose(compose(LPDO.scalar(p), w.L1.to_lpdo()), LPDO.scalar(p.reciprocal()))
    return witness(w.L, w.M.scale(p), w.N.scale(p), HyperbolicL.from_lpdo(L1))


def identity_witness(L: HyperbolicL) -> DarbouxWitness:
    return DarbouxWitness(L, LPDO.scalar(ONE), LPDO.scalar(ONE), L, ())


def compose_dt(w1: DarbouxWitness, w2: DarbouxWitness) -> DarbouxWitness:
    """The transformation L -> w2.L1 obtained by following w1 with w2."""
    if w2.L != w1.L1:
        raise ChainingError("second transformation must start where the first ends")
    return witness(w1.L, compose(w2.M, w1.M), compose(w2.N, w1.N), w2.L1)


# --------------------------------------------------------------------------
# Wronskian constructions


def _det(rows: List[List[Expr]]) -> Expr:
    n = len(rows)
    if n == 0:
        return ONE
    if n == 1:
        return rows[0][0]
    if n == 2:
        return rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0]
    total = ZERO
    for col in range(n):
        entry = rows[0][col]
        if entry.is_zero():
            continue
        minor = [r[:col] + r[col + 1:] for r in rows[1:]]
        term = entry * _det(minor)
        total = total + term if col % 2 == 0 else total - term
    return total


def _require_kernel(L: HyperbolicL, psi: Expr, label: str) -> None:
    if not L.apply(psi).is_zero():
        raise KernelError(f"{label} = {psi} is not a solution of L(psi) = 0")


def wronskian_mn(L: HyperbolicL, solutions: Sequence, m: int, n: int) -> LPDO:
    """The operator ``psi -> W_{m,n}(psi, psi_1, ..., psi_{m+n})``.

    The determinant has first row ``psi, Dx psi, ..., Dx^m psi, Dy psi, ...,
    Dy^n psi`` and is expanded along that row.
    """
    if m < 0 or n < 0:
        raise DarbouxError("m and n must be nonnegative")
    solutions = [as_expr(s) for s in solutions]
    if len(solutions) != m + n:
        raise DarbouxError(f"need exactly {m + n} solutions, got {len(solutions)}")
    for k, psi in enumerate(solutions, 1):
        _require_kernel(L, psi, f"psi{k}")
    columns = [(0, 0)] + [(i, 0) for i in range(1, m + 1)] + [(0, j) for j in range(1, n + 1)]
    rows = [[diff(diff(psi, "x", i), "y", j) for i, j in columns] for psi in solutions]
    coeffs: Dict[Tuple[int, int], Expr] = {}
    for col, index in enumerate(columns):
        minor = _det([r[:col] + r[col + 1:] for r in rows])
        coeffs[index] = minor if col % 2 == 0 else -minor
    lead = (m, 0) if m else (0, n)
    if coeffs[lead].is_zero():
        raise DegenerateError("leading Wronskian minor vanishes: solutions are dependent")
    return LPDO(coeffs)


def darboux11_parts(psi1, psi2) -> Tuple[Expr, Expr, Expr]:
    """``(d, alpha, beta)`` of the bi-degree (1,1) Wronskian formula."""
    psi1, psi2 = as_expr(psi1), as_expr(psi2)
    p1x, p1y = diff(psi1, "x"), diff(psi1, "y")
    p2x, p2y = diff(psi2, "x"), diff(psi2, "y")
    d = -psi1 * p2y + psi2 * p1y
    alpha = psi1 * p2x - psi2 * p1x
    beta = -p2x * p1y + p2y * p1x
    return d, alpha, beta


def darboux11(L: HyperbolicL, psi1, psi2) -> FirstOrderM:
    """``M = Dx + (alpha/d) Dy + beta/d`` built from two solutions of ``L psi = 0``."""
    psi1, psi2 = as_expr(psi1), as_expr(psi2)
    _require_kernel(L, psi1, "psi1")
    _require_kernel(L, psi2, "psi2")
    d, alpha, beta = darboux11_parts(psi1, psi2)
    if d.is_zero():
        raise DegenerateError("d = -psi1*psi2_y + psi2*psi1_y vanishes identically")
    return FirstOrderM(alpha / d, beta / d)


def darboux11_ratio_form(psi1, psi2) -> FirstOrderM:
    """The same M written through the ratio ``psi = psi2/psi1``."""
    psi1 = as_expr(psi1)
    psi = as_expr(psi2) / psi1
    px, py = diff(psi, "x"), diff(psi, "y")
    q = -px / py
    r = diff(psi1, "y") * px / (psi1 * py) - diff(psi1, "x") / psi1
    return FirstOrderM(q, r)


# --------------------------------------------------------------------------
# completeness: rebuild a pair from Wronskian data

_C0 = JetVar("%c0")


def _check_reconstruction_data(z: Expr, z1: Expr) -> None:
    zx, zy = diff(z, "x"), diff(z, "y")
    if zx.is_zero() and zy.is_zero():
        raise DegenerateError("z must not be constant")
    if zy.is_zero():
        raise DegenerateError("z_y must not vanish")
    if z1.is_zero():
        raise DegenerateError("z1 must not vanish")
    if (-zx * diff(z1, "y") + zy * diff(z1, "x")).is_zero():
        raise DegenerateError("-z_x*z1_y + z_y*z1_x vanishes: c0 cannot be solved for")


def wronskian_pair(z, z1, c0) -> Tuple[HyperbolicL, FirstOrderM]:
    """The pair with free term ``c0`` whose kernel holds ``z1`` and ``z*z1``.

    a and b solve ``L'(z1) = L'(z z1) = 0``; M' is the (1,1) Wronskian
    operator of these two solutions.
    """
    z, z1, c0 = as_expr(z), as_expr(z1), as_expr(c0)
    _check_reconstruction_data(z, z1)
    z1x, z1y = diff(z1, "x"), diff(z1, "y")
    w = z * z1
    wx, wy = diff(w, "x"), diff(w, "y")
    # a*u_x + b*u_y = -(u_xy + c0*u) for u in {z1, z*z1}
    rhs1 = -(diff(z1x, "y") + c0 * z1)
    rhs2 = -(diff(wx, "y") + c0 * w)
    det = z1x * wy - z1y * wx
    L = HyperbolicL((rhs1 * wy - rhs2 * z1y) / det, (z1x * rhs2 - wx * rhs1) / det, c0)
    return L, darboux11(L, z1, w)


def reconstruct_pair(targets, z, z1) -> Tuple[HyperbolicL, FirstOrderM]:
    """Wronskian-built pair ``(L', M')`` with prescribed gauge invariants.

    ``c0`` is the unique value making ``R' = targets.R``.  ``z`` must carry
    the evolution invariants of ``targets``, otherwise the final check fails.
    """
    from .invariants import gauge_invariants

    L, M = wronskian_pair(z, z1, Expr._atom(_C0))
    R = M.r - L.b - M.q * L.a
    solution, leftover = solve_linear([R - targets.R], [_C0])
    if leftover:
        raise DegenerateError("R' does not depend on c0")
    value = solution[_C0]
    L = HyperbolicL(*(substitute(e, {_C0: value}) for e in (L.a, L.b, L.c)))
    M = FirstOrderM(substitute(M.q, {_C0: value}), substitute(M.r, {_C0: value}))
    got = gauge_invariants(L, M)
    if got != targets:
        raise DarbouxError("z does not carry the evolution invariants of the targets")
    return L, M


def c0_coefficient(z, z1) -> Expr:
    """``dR'/dc0`` for the pair built by :func:`reconstruct_pair`."""
    z, z1 = as_expr(z), as_expr(z1)
    zx, zy = diff(z, "x"), diff(z, "y")
    z1x, z1y = diff(z1, "x"), diff(z1, "y")
    return -2 * z1 * zx / (-zx * z1y + zy * z1x)


__all__ = [
    "DarbouxError",
    "KernelError",
    "DegenerateError",
    "ChainingError",
    "HyperbolicL",
    "FirstOrderM",
    "DarbouxWitness",
    "witness",
    "solve_linear",
    "solve_intertwining",
    "n0_formula",
    "existence_conditions",
    "has_darboux",
    "laplace",
    "reduce_mixed",
    "bidegree",
    "expand",
    "left_scale",
    "identity_witness",
    "compose_dt",
    "wronskian_mn",
    "darboux11",
    "darboux11_parts",
    "darboux11_ratio_form",
    "wronskian_pair",
    "reconstruct_pair",
    "c0_coefficient",
    "RESIDUAL_INDICES",
]
