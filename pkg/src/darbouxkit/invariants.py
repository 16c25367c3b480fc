"""Gauge and gauged-evolution invariants of pairs (L, M), the invariantized
existence conditions, and the I30 family of their solutions."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple

from .darboux import DegenerateError, FirstOrderM, HyperbolicL
from .expr import Expr, as_expr, diff
from .lpdo import gauge


@dataclass(frozen=True)
class GaugeInvariants:
    """Generating invariants of a pair under ``L, M -> exp(-α) o (L, M) o exp(α)``."""

    q: Expr
    m: Expr
    h: Expr
    R: Expr

    def __post_init__(self):
        for name in ("q", "m", "h", "R"):
            object.__setattr__(self, name, as_expr(getattr(self, name)))

    @property
    def k(self) -> Expr:
        return self.h - self.m

    def as_tuple(self) -> Tuple[Expr, Expr, Expr, Expr]:
        return (self.q, self.m, self.h, self.R)

    def to_json(self) -> dict:
        return {"q": str(self.q), "m": str(self.m), "h": str(self.h), "R": str(self.R)}

    @classmethod
    def from_json(cls, data) -> "GaugeInvariants":
        return cls(data["q"], data["m"], data["h"], data["R"])


@dataclass(frozen=True)
class EvolutionInvariants:
    """Generating invariants under gauge followed by ``L -> L + β M``."""

    I1: Expr
    I2: Expr
    I3: Expr

    def __post_init__(self):
        for name in ("I1", "I2", "I3"):
            object.__setattr__(self, name, as_expr(getattr(self, name)))

    @property
    def q(self) -> Expr:
        return self.I1

    def as_tuple(self) -> Tuple[Expr, Expr, Expr]:
        return (self.I1, self.I2, self.I3)

    def to_json(self) -> dict:
        return {"q": str(self.I1), "I2": str(self.I2), "I3": str(self.I3)}


def _dx(f: Expr) -> Expr:
    return diff(f, "x")


def _dy(f: Expr) -> Expr:
    return diff(f, "y")


def _require_q(q: Expr) -> None:
    if q.is_zero():
        raise DegenerateError("q must not vanish identically")


def laplace_invariants(L: HyperbolicL) -> Tuple[Expr, Expr]:
    """``(h, k) = (ab - c + a_x, ab - c + b_y)``."""
    base = L.a * L.b - L.c
    return base + _dx(L.a), base + _dy(L.b)


def gauge_invariants(L: HyperbolicL, M: FirstOrderM) -> GaugeInvariants:
    h, _ = laplace_invariants(L)
    return GaugeInvariants(
        q=M.q,
        m=_dx(L.a) - _dy(L.b),
        h=h,
        R=M.r - L.b - M.q * L.a,
    )


def gauge_pair(L: HyperbolicL, M: FirstOrderM, alpha) -> Tuple[HyperbolicL, FirstOrderM]:
    """Conjugate both operators by ``exp(alpha)``."""
    return (HyperbolicL.from_lpdo(gauge(L.to_lpdo(), alpha)),
            FirstOrderM.from_lpdo(gauge(M.to_lpdo(), alpha)))


def gauged_evolution(L: HyperbolicL, M: FirstOrderM, alpha, beta
                     ) -> Tuple[HyperbolicL, FirstOrderM]:
    """``(gauge(L, α) + β gauge(M, α), gauge(M, α))`` in coordinates."""
    alpha, beta = as_expr(alpha), as_expr(beta)
    a, b, c, q, r = L.a, L.b, L.c, M.q, M.r
    ax, ay = _dx(alpha), _dy(alpha)
    axy = _dy(ax)
    a1 = a + ay + beta
    b1 = b + ax + beta * q
    c1 = c + a * ax + b * ay + axy + ax * ay + beta * r + beta * ax + beta * q * ay
    r1 = r + ax + q * ay
    return HyperbolicL(a1, b1, c1), FirstOrderM(q, r1)


def gauged_evolution_by_operators(L: HyperbolicL, M: FirstOrderM, alpha, beta
                                  ) -> Tuple[HyperbolicL, FirstOrderM]:
    """Same as :func:`gauged_evolution`, computed by operator conjugation."""
    Mg = gauge(M.to_lpdo(), alpha)
    Lg = gauge(L.to_lpdo(), alpha) + Mg.scale(beta)
    return HyperbolicL.from_lpdo(Lg), FirstOrderM.from_lpdo(Mg)


def evolution_from_gauge(inv: GaugeInvariants) -> EvolutionInvariants:
    q, m, h, R = inv.as_tuple()
    _require_q(q)
    Rq_x = _dx(R / q)
    return EvolutionInvariants(q, 2 * m - _dy(R) + Rq_x, 2 * h + Rq_x - R ** 2 / (2 * q))


def evolution_invariants(L: HyperbolicL, M: FirstOrderM) -> EvolutionInvariants:
    return evolution_from_gauge(gauge_invariants(L, M))


def _log_derivatives(q: Expr) -> Tuple[Expr, Expr, Expr]:
    """``(Q_x, Q_xy, Q_xxy)`` for ``Q = ln q``, as rational functions of q-jets."""
    Qx = _dx(q) / q
    Qxy = _dy(Qx)
    return Qx, Qxy, _dx(Qxy)


def i3_residual(q, I3) -> Expr:
    """Left side of the I3 transport equation for a candidate I3."""
    q, I3 = as_expr(q), as_expr(I3)
    _require_q(q)
    Qx, Qxy, Qxxy = _log_derivatives(q)
    return _dx(I3) + q * _dy(I3) + (_dy(q) - Qx) * I3 - Qx * Qxy + Qxxy


def invariant_conditions(inv: EvolutionInvariants) -> Tuple[Expr, Expr]:
    """Both conditions vanish exactly when the pair admits a Darboux transformation."""
    q = inv.I1
    _require_q(q)
    _, Qxy, _ = _log_derivatives(q)
    return inv.I2 + Qxy, i3_residual(q, inv.I3)


def reduced_conditions(q, R, h, m) -> Tuple[Expr, Expr]:
    """The existence conditions written on the gauge invariants."""
    q, R, h, m = (as_expr(v) for v in (q, R, h, m))
    qx, qy = _dx(q), _dy(q)
    Rx, Ry = _dx(R), _dy(R)
    first = omega(q, R, m)
    second = (qx * h - q * _dx(h) - q ** 2 * _dy(h) - qx * m + qx * Ry
              + q * _dx(m) - q * _dy(Rx) - qy * q * h - q * R * m + q * R * Ry)
    return first, second


def omega(q, R, m) -> Expr:
    """First reduced condition; it multiplies ``a`` in the direct substitution."""
    q, R, m = as_expr(q), as_expr(R), as_expr(m)
    qx = _dx(q)
    return -2 * q ** 2 * m + q ** 2 * _dy(R) + qx * R + _dy(q) * qx - q * _dx(R) - _dy(qx) * q


def i30(z) -> Expr:
    """``-z_xxy/z_x + z_xx z_xy/z_x^2 + z_xy^2/(2 z_x z_y)``."""
    z = as_expr(z)
    zx, zy = _dx(z), _dy(z)
    if zx.is_zero() or zy.is_zero():
        raise DegenerateError("z must depend on both x and y")
    zxx, zxy = _dx(zx), _dy(zx)
    return -_dx(zxy) / zx + zxx * zxy / zx ** 2 + zxy ** 2 / (2 * zx * zy)


def wronskian_invariants(z) -> EvolutionInvariants:
    """``(q, I2, I3) = (-z_x/z_y, B_y - A_x, -A_x + AB/2)`` with
    ``A = z_xy/z_x``, ``B = z_xy/z_y``."""
    z = as_expr(z)
    zx, zy = _dx(z), _dy(z)
    if zx.is_zero() or zy.is_zero():
        raise DegenerateError("z must depend on both x and y")
    zxy = _dy(zx)
    A, B = zxy / zx, zxy / zy
    return EvolutionInvariants(-zx / zy, _dy(B) - _dx(A), -_dx(A) + A * B / 2)


def reparametrization_defect(z, F) -> Expr:
    """``i30(F(z)) - i30(z)``, where ``F`` maps an Expr to an Expr."""
    z = as_expr(z)
    return i30(F(z)) - i30(z)


__all__ = [
    "GaugeInvariants",
    "EvolutionInvariants",
    "laplace_invariants",
    "gauge_invariants",
    "gauge_pair",
    "gauged_evolution",
    "gauged_evolution_by_operators",
    "evolution_from_gauge",
    "evolution_invariants",
    "invariant_conditions",
    "reduced_conditions",
    "omega",
    "i3_residual",
    "i30",
    "wronskian_invariants",
    "reparametrization_defect",
]
