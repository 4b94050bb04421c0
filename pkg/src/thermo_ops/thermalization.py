"""Collision-model relaxation, partial level thermalisations, repeated-step
convergence, the two-level embeddability test and the thermalisation
predicate (majorisation plus preserved beta-order).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .core import (DomainError, EdpStep, GibbsContext, Number, as_values,
                   make_edp_step)
from .majorization import beta_order, thermo_majorizes


def relax(p0, t: float, xi: float, ctx: GibbsContext) -> tuple[float, ...]:
    """Exponential relaxation toward the thermal distribution:
    ``exp(-t/xi) p0 + N (1 - exp(-t/xi)) g``."""
    if xi <= 0:
        raise DomainError("the time constant xi must be positive")
    if t < 0:
        raise DomainError("time must be nonnegative")
    x = as_values(p0)
    if len(x) != ctx.n:
        raise DomainError("population and context dimensions differ")
    w = math.exp(-t / xi)
    norm = float(sum(x))
    return tuple(w * float(value) + norm * (1.0 - w) * float(gi)
                 for value, gi in zip(x, ctx.g))


@dataclass(frozen=True)
class PltStep:
    """Partial level thermalisation: mix a level pair toward its pairwise
    Gibbs state with weight epsilon."""

    lo: int
    hi: int
    epsilon: Number


def make_plt_step(ctx: GibbsContext, lo: int, hi: int,
                  epsilon: Number) -> PltStep:
    if ctx.degenerate_pair(lo, hi):
        raise DomainError(f"levels {lo} and {hi} are degenerate")
    if ctx.rational:
        if ctx.g[hi] > ctx.g[lo]:
            raise DomainError("hi must be the higher-energy level")
    elif ctx.energies[hi] < ctx.energies[lo]:
        raise DomainError("hi must be the higher-energy level")
    if not 0 <= epsilon <= 1:
        raise DomainError("epsilon must lie in [0, 1]")
    return PltStep(lo, hi, epsilon)


def _pair_weights(ctx: GibbsContext, lo: int, hi: int):
    glo, ghi = ctx.g[lo], ctx.g[hi]
    total = glo + ghi
    if isinstance(glo, float) or isinstance(ghi, float):
        return glo / total, ghi / total
    return Fraction(glo, total), Fraction(ghi, total)


def apply_plt(step: PltStep, x, ctx: GibbsContext) -> tuple[Number, ...]:
    """(x_lo, x_hi) -> (1 - eps)(x_lo, x_hi) + eps * N_pair * g_pair, other
    levels untouched."""
    xv = list(as_values(x))
    wlo, whi = _pair_weights(ctx, step.lo, step.hi)
    npair = xv[step.lo] + xv[step.hi]
    eps = step.epsilon
    xv[step.lo] = (1 - eps) * xv[step.lo] + eps * npair * wlo
    xv[step.hi] = (1 - eps) * xv[step.hi] + eps * npair * whi
    return tuple(xv)


def markov_p_down_max(ctx: GibbsContext, lo: int, hi: int) -> Number:
    """Largest de-exciting probability of an embeddable step on the pair,
    1/(1 + exp(-beta_bar)); the full-thermalisation boundary."""
    wlo, _ = _pair_weights(ctx, lo, hi)
    return wlo


def plt_to_edp(step: PltStep, ctx: GibbsContext) -> EdpStep:
    """Every partial level thermalisation is an elementary step with
    p_down = eps / (1 + exp(-beta_bar))."""
    p_down = step.epsilon * markov_p_down_max(ctx, step.lo, step.hi)
    return make_edp_step(ctx, step.lo, step.hi, p_down)


def edp_to_plt(step: EdpStep, ctx: GibbsContext) -> PltStep:
    """Inverse conversion; only embeddable steps qualify."""
    cap = markov_p_down_max(ctx, step.lo, step.hi)
    if step.p_down > cap:
        raise DomainError(
            f"p_down={step.p_down} exceeds the thermalisation bound {cap}; "
            "the step is not Markovian")
    if isinstance(cap, Fraction) and not isinstance(step.p_down, float):
        eps = Fraction(step.p_down) / cap
    else:
        eps = step.p_down / cap
    return make_plt_step(ctx, step.lo, step.hi, eps)


def is_markovian_edp(step: EdpStep, ctx: GibbsContext) -> bool:
    """Embeddability of the 2x2 action as exp(L t) with a detailed-balanced
    generator; for this one-parameter family it reduces to a nonnegative
    determinant, i.e. p_down <= 1/(1 + exp(-beta_bar))."""
    return step.p_down <= markov_p_down_max(ctx, step.lo, step.hi)


def repeated_edp_limit(step: EdpStep, x, n: int,
                       ctx: GibbsContext) -> tuple[Number, ...]:
    """Closed form of the n-fold application on the pair:
    the lower occupation relaxes geometrically at rate (1 - p_down * Z) with
    Z = 1 + exp(-beta_bar), toward the pair thermal share."""
    if n < 0:
        raise DomainError("n must be nonnegative")
    xv = list(as_values(x))
    lam = step.p_down
    z = 1 + step.up_factor(ctx)
    npair = xv[step.lo] + xv[step.hi]
    shrink = (1 - lam * z) ** n
    xv[step.lo] = xv[step.lo] * shrink + (npair / z) * (1 - shrink)
    xv[step.hi] = npair - xv[step.lo]
    return tuple(xv)


def is_thermalisation_of(p, q, ctx: GibbsContext,
                         tol: Number | None = None) -> bool:
    """q is a thermalisation of p iff p >=_T q and both share a beta-order
    (under the deterministic tie rule)."""
    if not thermo_majorizes(p, q, ctx, tol):
        return False
    return beta_order(p, ctx) == beta_order(q, ctx)
