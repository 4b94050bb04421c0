"""Constructive synthesis of elementary detailed-balanced process sequences.

Given populations with ``p >=_T q`` in rational mode, ``synthesize`` produces
a finite list of two-level detailed-balanced steps whose ordered application
maps p to q exactly.  The solver is layered:

* when p and q share a beta-order, the classical transfer loop runs on the
  embedded vectors (largest-excess slot to the first later deficit slot); in
  this aligned regime every slot transfer is realisable as a level step and
  the run finishes within D - 1 transfers;
* otherwise a portfolio of exact greedy schedules is tried, each move capped
  so that every intermediate state still thermo-majorizes the target.

Targets that are thermo-majorized but not reachable by any two-level
detailed-balanced sequence do exist; for those ``synthesize`` raises
``SynthesisError`` rather than returning an approximation.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .core import (DomainError, EdpStep, GibbsContext, Number, as_values,
                   make_edp_step)
from .majorization import majorization_witness

_ZERO = Fraction(0)


class SynthesisError(DomainError):
    """Raised when no elementary sequence from p to q was found."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


@dataclass(frozen=True)
class StepRecord:
    """Ungrouped provenance of one transfer.

    ``j_ex``/``j_df`` are 1-based slot positions in the beta-sorted embedding
    at the time of the transfer (donor block tail, receiver block head),
    ``delta`` the level mass moved and ``lam`` the identity weight of the
    step's mixture form ``lam * I + (1 - lam) * (extreme step)``.
    """

    lo: int
    hi: int
    delta: Fraction
    j_ex: int
    j_df: int
    lam: Fraction
    origin: str


@dataclass(frozen=True)
class EdpSequence:
    """Ordered steps (first applied first) with per-transfer provenance.

    ``relabel_in``/``relabel_out`` record the beta-orders of source and target;
    they are bookkeeping only, no physical action is attached to them.
    """

    steps: tuple[EdpStep, ...]
    provenance: tuple[StepRecord, ...]
    relabel_in: tuple[int, ...]
    relabel_out: tuple[int, ...]


def apply_edp(step: EdpStep, p, ctx: GibbsContext) -> tuple[Number, ...]:
    """Act with the two-level step; other levels are untouched and the
    normalisation is preserved."""
    if ctx.degenerate_pair(step.lo, step.hi):
        raise DomainError("cannot apply a step on a degenerate pair")
    x = list(as_values(p))
    up = step.up_factor(ctx) * step.p_down
    lo, hi = x[step.lo], x[step.hi]
    x[step.lo] = (1 - up) * lo + step.p_down * hi
    x[step.hi] = up * lo + (1 - step.p_down) * hi
    return tuple(x)


def compose_edps_same_pair(a: EdpStep, b: EdpStep,
                           ctx: GibbsContext) -> EdpStep:
    """Single step whose matrix equals (b after a); closure holds because
    every 2x2 Gibbs-preserving stochastic matrix is detailed balanced."""
    if (a.lo, a.hi) != (b.lo, b.hi):
        raise DomainError("steps act on different level pairs")
    z = 1 + a.up_factor(ctx)
    p3 = a.p_down + b.p_down - a.p_down * b.p_down * z
    return make_edp_step(ctx, a.lo, a.hi, p3)


# --------------------------------------------------------------------------
# internal exact machinery (rational mode only)

def _beta_perm(x, g):
    return sorted(range(len(x)), key=lambda i: (-(x[i] / g[i]), -x[i], i))


def _lorenz_pts(x, g):
    pts = [(_ZERO, _ZERO)]
    cx = cy = _ZERO
    for i in _beta_perm(x, g):
        cx += g[i]
        cy += x[i]
        pts.append((cx, cy))
    return pts


def _lorenz_at(order, x, g, c):
    cum_g = _ZERO
    cum_x = _ZERO
    for i in order:
        if c <= cum_g + g[i]:
            return cum_x + (c - cum_g) * x[i] / g[i]
        cum_g += g[i]
        cum_x += x[i]
    return cum_x


def _dominant(y, g, q_elbows):
    order = _beta_perm(y, g)
    return all(_lorenz_at(order, y, g, c) >= v for c, v in q_elbows)


def _feas_cap(x, g, a, b):
    """Largest net mass one step can move from a to b (needs r_a > r_b)."""
    return min(g[a], g[b]) * (x[a] / g[a] - x[b] / g[b])


def _dominance_cap(x, q_elbows, g, a, b, delta_hi):
    """Largest d in [0, delta_hi] keeping (x - d e_a + d e_b) >=_T target.

    Piecewise analysis: between ratio-crossing values of d the curve value at
    each target elbow is affine in d, so the binding d solves a linear
    equation inside one regime.
    """
    n = len(x)

    def shifted(d):
        y = list(x)
        y[a] -= d
        y[b] += d
        return y

    if _dominant(shifted(delta_hi), g, q_elbows):
        return delta_hi
    crits = set()
    for j in range(n):
        for i, s in ((a, Fraction(-1)), (b, Fraction(1))):
            if j == i:
                continue
            sj = Fraction(-1) if j == a else (Fraction(1) if j == b else _ZERO)
            num = x[j] * g[i] - x[i] * g[j]
            den = s * g[j] - sj * g[i]
            if den != 0:
                d = num / den
                if 0 < d < delta_hi:
                    crits.add(d)
    grid = [_ZERO] + sorted(crits) + [delta_hi]
    best = _ZERO
    for d0, d1 in zip(grid, grid[1:]):
        mid = (d0 + d1) / 2
        order = _beta_perm(shifted(mid), g)
        bind = d1
        ok_at_d0 = True
        for c, v in q_elbows:
            cum_g = _ZERO
            const = _ZERO
            coef = _ZERO
            for i in order:
                si = Fraction(-1) if i == a else (
                    Fraction(1) if i == b else _ZERO)
                if c <= cum_g + g[i]:
                    frac = (c - cum_g) / g[i]
                    const += frac * x[i]
                    coef += frac * si
                    break
                cum_g += g[i]
                const += x[i]
                coef += si
            if const + coef * d0 - v < 0:
                ok_at_d0 = False
                break
            if coef < 0:
                root = (v - const) / coef
                if root < bind:
                    bind = root
        if not ok_at_d0:
            break
        if bind < d1:
            if bind > best:
                best = bind
            break
        best = d1
    if not _dominant(shifted(best), g, q_elbows):
        raise SynthesisError("internal: dominance cap computation failed")
    return best


def _slot_positions(x, g, d, a, b):
    """(tail slot of a's block, head slot of b's block), 1-based, in the
    current beta-sorted embedding."""
    order = _beta_perm(x, g)
    pos = {}
    cum = 0
    for i in order:
        pos[i] = (cum + 1, cum + d[i])
        cum += d[i]
    return pos[a][1], pos[b][0]


class _Unreachable(Exception):
    pass


def _synth_aligned(p, q, g, d):
    """Embedded transfer loop for beta-aligned pairs; provably exact and
    at most D - 1 transfers (see module docstring)."""
    order = _beta_perm(p, g)
    if _beta_perm(q, g) != order:
        raise _Unreachable("pair is not beta-aligned")
    u = []
    v = []
    owner = []
    for i in order:
        u.extend([p[i] / d[i]] * d[i])
        v.extend([q[i] / d[i]] * d[i])
        owner.extend([i] * d[i])
    total = len(u)
    transfers = []
    guard = 0
    while u != v:
        guard += 1
        if guard > total:
            raise _Unreachable("aligned loop exceeded the slot budget")
        j_ex = max(j for j in range(total) if u[j] > v[j])
        j_df = next((j for j in range(j_ex + 1, total) if u[j] < v[j]), None)
        if j_df is None:
            raise _Unreachable("no deficit slot after the last excess slot")
        delta = min(u[j_ex] - v[j_ex], v[j_df] - u[j_df])
        lam = 1 - delta / (u[j_ex] - u[j_df])
        u[j_ex] -= delta
        u[j_df] += delta
        a, b = owner[j_ex], owner[j_df]
        if a == b:
            raise _Unreachable("intra-block transfer in aligned loop")
        transfers.append((a, b, delta, j_ex + 1, j_df + 1, lam, "aligned"))
    return transfers


def _run_phases(p, q, g, d, phase_levels, asc, q_elbows, max_rounds=120):
    """Settle one level at a time to its exact target, moving mass only
    between unsettled levels; transit boosts reroute mass through middle
    levels when direct pipes are too narrow."""
    n = len(p)
    x = list(p)
    transfers = []
    fixed = set()

    def try_xfer(a, b, delta, origin):
        if delta <= 0:
            return _ZERO
        y = list(x)
        y[a] -= delta
        y[b] += delta
        if not _dominant(y, g, q_elbows):
            delta = _dominance_cap(x, q_elbows, g, a, b, delta)
            if delta <= 0:
                return _ZERO
        j_ex, j_df = _slot_positions(x, g, d, a, b)
        x[a] -= delta
        x[b] += delta
        transfers.append((a, b, delta, j_ex, j_df, None, origin))
        return delta

    for b in phase_levels:
        rounds = 0
        while x[b] != q[b]:
            rounds += 1
            if rounds > max_rounds:
                raise _Unreachable(f"phase for level {b} did not converge")
            progressed = False
            partners = sorted((i for i in range(n) if i not in fixed and i != b),
                              key=lambda i: x[i] / g[i], reverse=not asc)
            for a in partners:
                need = q[b] - x[b]
                if need == 0:
                    break
                if g[a] == g[b]:
                    continue
                if need > 0 and x[a] / g[a] > x[b] / g[b]:
                    if try_xfer(a, b, min(need, _feas_cap(x, g, a, b)),
                                "phase") > 0:
                        progressed = True
                elif need < 0 and x[b] / g[b] > x[a] / g[a]:
                    if try_xfer(b, a, min(-need, _feas_cap(x, g, b, a)),
                                "phase") > 0:
                        progressed = True
            if x[b] != q[b] and not progressed:
                ps = sorted((i for i in range(n) if i not in fixed and i != b),
                            key=lambda i: x[i] / g[i])
                rb = x[b] / g[b]
                filling = q[b] > x[b]
                for lo in ps:
                    rlo = x[lo] / g[lo]
                    if (filling and rlo <= rb) or (not filling and rlo >= rb):
                        continue
                    for hi in reversed(ps):
                        if hi == lo or g[hi] == g[lo]:
                            continue
                        if filling:
                            if x[hi] / g[hi] <= rlo:
                                continue
                            if try_xfer(hi, lo, _feas_cap(x, g, hi, lo),
                                        "transit") > 0:
                                progressed = True
                                break
                        else:
                            if x[hi] / g[hi] >= rlo:
                                continue
                            if try_xfer(lo, hi, _feas_cap(x, g, lo, hi),
                                        "transit") > 0:
                                progressed = True
                                break
                    if progressed:
                        break
            if x[b] != q[b] and not progressed:
                raise _Unreachable(f"no admissible transfer for level {b}")
        fixed.add(b)
    if x != list(q):
        raise _Unreachable("phases ended away from the target")
    return transfers


def _greedy_balanced(p, q, g, d, q_elbows, step_limit=None):
    """Fallback: snap-preferring greedy over all ratio-directional pairs."""
    n = len(p)
    if step_limit is None:
        step_limit = 8 * n * n
    x = list(p)
    transfers = []
    while x != list(q):
        if len(transfers) > step_limit:
            raise _Unreachable("greedy step limit reached")
        best = None
        for a in range(n):
            for b in range(n):
                if a == b or g[a] == g[b]:
                    continue
                if x[a] / g[a] <= x[b] / g[b]:
                    continue
                over_a = max(_ZERO, x[a] - q[a])
                under_b = max(_ZERO, q[b] - x[b])
                if over_a == 0 and under_b == 0:
                    continue
                fc = _feas_cap(x, g, a, b)
                for delta in {min(over_a, fc), min(under_b, fc),
                              min(max(over_a, under_b), fc)}:
                    if delta <= 0:
                        continue
                    y = list(x)
                    y[a] -= delta
                    y[b] += delta
                    if not _dominant(y, g, q_elbows):
                        delta = _dominance_cap(x, q_elbows, g, a, b, delta)
                        if delta <= 0:
                            continue
                        y = list(x)
                        y[a] -= delta
                        y[b] += delta
                    err0 = sum(abs(x[i] - q[i]) for i in range(n))
                    err = sum(abs(y[i] - q[i]) for i in range(n))
                    if err >= err0:
                        continue
                    snaps = sum(1 for i in range(n) if y[i] == q[i])
                    key = (-snaps, err)
                    if best is None or key < best[0]:
                        best = (key, a, b, delta)
        if best is None:
            raise _Unreachable("no admissible greedy transfer")
        _, a, b, delta = best
        j_ex, j_df = _slot_positions(x, g, d, a, b)
        x[a] -= delta
        x[b] += delta
        transfers.append((a, b, delta, j_ex, j_df, None, "greedy"))
    return transfers


def _coerce_exact(values, what):
    out = []
    for v in values:
        if isinstance(v, float):
            raise DomainError(
                f"synthesis runs in rational mode; {what} has float entries")
        out.append(Fraction(v))
    return out


def synthesize(p, q, ctx: GibbsContext, group: bool = True) -> EdpSequence:
    """Find an elementary sequence mapping p to q exactly.

    Requires rational mode and exact inputs with ``p >=_T q``.  Raises
    ``SynthesisError`` carrying the violated elbow when q is not majorized,
    and a descriptive ``SynthesisError`` when the target lies in the known
    gap of the sequential construction (majorized yet unreachable by
    two-level detailed-balanced steps alone).
    """
    ctx.require_rational()
    pv = _coerce_exact(as_values(p), "p")
    qv = _coerce_exact(as_values(q), "q")
    if len(pv) != ctx.n or len(qv) != ctx.n:
        raise DomainError("population and context dimensions differ")
    g = [Fraction(v) for v in ctx.g]
    d = ctx.d
    witness = majorization_witness(pv, qv, ctx, tol=0)
    if witness is not None:
        raise SynthesisError(
            f"p does not thermo-majorize q; violated elbow at x={witness[0]}"
            f" (L_p={witness[1]} < L_q={witness[2]})", witness=witness)

    relabel_in = tuple(_beta_perm(pv, g))
    relabel_out = tuple(_beta_perm(qv, g))
    if pv == qv:
        return EdpSequence((), (), relabel_in, relabel_out)

    q_elbows = _lorenz_pts(qv, g)
    tau = relabel_out
    attempts = [lambda: _synth_aligned(pv, qv, g, d)]
    for asc in (True, False):
        attempts.append(lambda a=asc: _run_phases(
            pv, qv, g, d, list(tau[:-1]), a, q_elbows))
        attempts.append(lambda a=asc: _run_phases(
            pv, qv, g, d, list(tau[1:][::-1]), a, q_elbows))
    attempts.append(lambda: _greedy_balanced(pv, qv, g, d, q_elbows))

    transfers = None
    for attempt in attempts:
        try:
            transfers = attempt()
            break
        except _Unreachable:
            continue
    if transfers is None:
        raise SynthesisError(
            "no elementary sequence found: the pair is thermo-majorized but "
            "appears unreachable by two-level detailed-balanced steps alone "
            "(a known gap of the sequential construction)")

    if len(transfers) > ctx.D:
        raise SynthesisError(
            f"internal: produced {len(transfers)} steps, above the D={ctx.D} "
            "bound")

    # transfers -> validated steps with provenance
    x = list(pv)
    raw_steps: list[EdpStep] = []
    records: list[StepRecord] = []
    for a, b, delta, j_ex, j_df, lam, origin in transfers:
        lo, hi = (a, b) if g[a] > g[b] else (b, a)
        cap = _feas_cap(x, g, a, b)
        p_down = Fraction(delta) / cap
        step = make_edp_step(ctx, lo, hi, p_down)
        if lam is None:
            lam = 1 - p_down
        raw_steps.append(step)
        records.append(StepRecord(lo, hi, Fraction(delta), j_ex, j_df,
                                  Fraction(lam), origin))
        x[a] -= delta
        x[b] += delta
    if x != qv:
        raise SynthesisError("internal: replay of the found sequence failed")

    steps: list[EdpStep] = []
    if group:
        for step in raw_steps:
            if steps and (steps[-1].lo, steps[-1].hi) == (step.lo, step.hi):
                steps[-1] = compose_edps_same_pair(steps[-1], step, ctx)
            else:
                steps.append(step)
    else:
        steps = raw_steps
    return EdpSequence(tuple(steps), tuple(records), relabel_in, relabel_out)


@dataclass(frozen=True)
class VerifyReport:
    ok: bool
    reason: str
    failing_step: int | None
    terminal: tuple[Number, ...]


def verify_sequence(seq: EdpSequence, p, q, ctx: GibbsContext,
                    tol: Number | None = None) -> VerifyReport:
    """Replay the steps and check stochasticity, detailed balance and the
    terminal state; returns diagnostics instead of raising."""
    from .core import is_detailed_balanced, validate_stochastic

    pv = as_values(p)
    qv = as_values(q)
    exact = not any(isinstance(v, float) for v in (*pv, *qv, *ctx.g))
    t = 0 if (tol is None and exact) else (tol if tol is not None else 1e-9)
    x = pv
    for idx, step in enumerate(seq.steps):
        if not 0 <= step.p_down <= 1:
            return VerifyReport(False, "p_down out of range", idx, x)
        m = step.as_matrix(ctx)
        if not validate_stochastic(m, t):
            return VerifyReport(False, "step is not stochastic", idx, x)
        if not is_detailed_balanced(m, ctx, t):
            return VerifyReport(False, "step violates detailed balance", idx, x)
        x = apply_edp(step, x, ctx)
    drift = max((abs(a - b) for a, b in zip(x, qv)), default=0)
    if drift > t:
        return VerifyReport(False, "terminal state differs from target",
                            None, x)
    return VerifyReport(True, "ok", None, x)
