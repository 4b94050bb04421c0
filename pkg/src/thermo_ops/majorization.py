"""Thermo-majorisation via three independent routes (Lorenz curves, the
weighted absolute-deviation characterisation, and classical majorisation of
the embedded vectors), plus the beta-ordering, the embedding map and the
relative-entropy quantities used by the perpetuum-mobile rate bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Literal, Sequence

from .core import DomainError, GibbsContext, Number, as_values

Route = Literal["curve", "abs", "embedded", "all"]


def _auto_tol(tol: Number | None, *value_groups) -> Number:
    """0 when every involved number is exact, else the float default."""
    if tol is not None:
        return tol
    for group in value_groups:
        for v in group:
            if isinstance(v, float):
                return 1e-9
    return 0


@dataclass(frozen=True)
class BetaOrder:
    """Permutation sorting ratios x_i/g_i in non-increasing order.

    Ties go first to the larger occupation and then to the smaller index,
    which keeps the ordering deterministic for the synthesis construction.
    """

    perm: tuple[int, ...]


def beta_order(p, ctx: GibbsContext) -> BetaOrder:
    x = as_values(p)
    if len(x) != ctx.n:
        raise DomainError("population and context dimensions differ")
    g = ctx.g
    return BetaOrder(tuple(
        sorted(range(ctx.n), key=lambda i: (-(x[i] / g[i]), -x[i], i))))


@dataclass(frozen=True)
class LorenzCurve:
    """Piecewise-linear curve through the beta-ordered cumulative points.

    ``points[k] = (sum of g over the first k levels, sum of x over them)``;
    concavity holds because the segment slopes are the sorted ratios.
    """

    points: tuple[tuple[Number, Number], ...]

    @property
    def norm(self) -> Number:
        return self.points[-1][1]

    def evaluate(self, x: Number) -> Number:
        pts = self.points
        if x <= 0:
            return pts[0][1]
        for (x0, y0), (x1, y1) in zip(pts, pts[1:]):
            if x <= x1:
                return y0 + (y1 - y0) * (x - x0) / (x1 - x0)
        return pts[-1][1]


def lorenz_curve(p, ctx: GibbsContext) -> LorenzCurve:
    x = as_values(p)
    order = beta_order(x, ctx).perm
    cx = cy = 0
    pts = [(cx, cy)]
    for i in order:
        cx = cx + ctx.g[i]
        cy = cy + x[i]
        pts.append((cx, cy))
    return LorenzCurve(tuple(pts))


def _check_norms(p, q, tol):
    np_, nq = sum(p), sum(q)
    if abs(np_ - nq) > tol:
        raise DomainError(f"normalisations differ: {np_} vs {nq}")


def thermo_majorizes_curve(p, q, ctx: GibbsContext,
                           tol: Number | None = None) -> bool:
    """Lorenz-curve dominance checked at the elbows of either curve; the
    curves are piecewise linear, so elbow checks are sufficient."""
    pv, qv = as_values(p), as_values(q)
    t = _auto_tol(tol, pv, qv, ctx.g)
    _check_norms(pv, qv, max(t, 1e-9) if isinstance(t, float) else t)
    lp, lq = lorenz_curve(pv, ctx), lorenz_curve(qv, ctx)
    xs = {x for x, _ in lp.points} | {x for x, _ in lq.points}
    return all(lp.evaluate(x) >= lq.evaluate(x) - t for x in xs)


def majorization_witness(p, q, ctx: GibbsContext,
                         tol: Number | None = None):
    """First violated elbow as (x, L_p(x), L_q(x)), or None if p >=_T q."""
    pv, qv = as_values(p), as_values(q)
    t = _auto_tol(tol, pv, qv, ctx.g)
    lp, lq = lorenz_curve(pv, ctx), lorenz_curve(qv, ctx)
    xs = sorted({x for x, _ in lp.points} | {x for x, _ in lq.points})
    for x in xs:
        yp, yq = lp.evaluate(x), lq.evaluate(x)
        if yp < yq - t:
            return (x, yp, yq)
    return None


def thermo_majorizes_abs(p, q, ctx: GibbsContext,
                         tol: Number | None = None) -> bool:
    """Weighted absolute-deviation route.

    Both sides are piecewise linear in the threshold with equal values at zero
    and equal slope past the largest kink, so checking the kink set
    {0} u {p_j/g_j} u {q_j/g_j} decides the inequality for every threshold.
    """
    pv, qv = as_values(p), as_values(q)
    t = _auto_tol(tol, pv, qv, ctx.g)
    _check_norms(pv, qv, max(t, 1e-9) if isinstance(t, float) else t)
    g = ctx.g
    kinks = {0}
    kinks |= {pv[j] / g[j] for j in range(ctx.n)}
    kinks |= {qv[j] / g[j] for j in range(ctx.n)}
    for a in kinks:
        lhs = sum(g[j] * abs(qv[j] / g[j] - a) for j in range(ctx.n))
        rhs = sum(g[j] * abs(pv[j] / g[j] - a) for j in range(ctx.n))
        if lhs > rhs + t:
            return False
    return True


def embed(p, ctx: GibbsContext) -> tuple[Number, ...]:
    """Split level i into d_i equal slots; maps the Gibbs state to the
    uniform distribution on D slots."""
    ctx.require_rational()
    x = as_values(p)
    if len(x) != ctx.n:
        raise DomainError("population and context dimensions differ")
    out = []
    for xi, di in zip(x, ctx.d):
        if isinstance(xi, float):
            out.extend([xi / di] * di)
        else:
            out.extend([Fraction(xi, di)] * di)
    return tuple(out)


def unembed(y: Sequence[Number], ctx: GibbsContext) -> tuple[Number, ...]:
    """Block sums; the left inverse of embed."""
    ctx.require_rational()
    y = tuple(y)
    if len(y) != ctx.D:
        raise DomainError(f"embedded vector must have length {ctx.D}")
    out = []
    pos = 0
    for di in ctx.d:
        out.append(sum(y[pos:pos + di]))
        pos += di
    return tuple(out)


def majorizes_classical(x: Sequence[Number], y: Sequence[Number],
                        tol: Number | None = None) -> bool:
    """Sorted-descending partial sums of x dominate those of y."""
    x, y = tuple(x), tuple(y)
    if len(x) != len(y):
        raise DomainError("vectors must have equal length")
    t = _auto_tol(tol, x, y)
    _check_norms(x, y, max(t, 1e-9) if isinstance(t, float) else t)
    xs = sorted(x, reverse=True)
    ys = sorted(y, reverse=True)
    cx = cy = 0
    for a, b in zip(xs, ys):
        cx += a
        cy += b
        if cx < cy - t:
            return False
    return True


def thermo_majorizes_embedded(p, q, ctx: GibbsContext,
                              tol: Number | None = None) -> bool:
    return majorizes_classical(embed(p, ctx), embed(q, ctx), tol)


def thermo_majorizes(p, q, ctx: GibbsContext, tol: Number | None = None,
                     route: Route = "curve") -> bool:
    if route == "curve":
        return thermo_majorizes_curve(p, q, ctx, tol)
    if route == "abs":
        return thermo_majorizes_abs(p, q, ctx, tol)
    if route == "embedded":
        return thermo_majorizes_embedded(p, q, ctx, tol)
    if route == "all":
        results = {thermo_majorizes_curve(p, q, ctx, tol),
                   thermo_majorizes_abs(p, q, ctx, tol),
                   thermo_majorizes_embedded(p, q, ctx, tol)}
        if len(results) != 1:
            raise DomainError("majorisation routes disagree")
        return results.pop()
    raise DomainError(f"unknown route {route!r}")


def relative_entropy(x, ctx: GibbsContext, tol: float = 1e-9) -> float:
    """S(x||g) in nats, with 0 log 0 = 0; zero exactly at the thermal state."""
    xv = as_values(x)
    if abs(sum(xv) - 1) > tol:
        raise DomainError("relative entropy expects a normalised population")
    total = 0.0
    for xi, gi in zip(xv, ctx.g):
        if xi > 0:
            total += float(xi) * math.log(float(xi) / float(gi))
    return total


def perpetuum_rate(x, ctx: GibbsContext, w: float) -> float:
    """Work-extraction rate S(x||g)/w of a hypothetical cycle fed by x."""
    if w <= 0:
        raise DomainError("work quantum must be positive")
    return relative_entropy(x, ctx) / w
