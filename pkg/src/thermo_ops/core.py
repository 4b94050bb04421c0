"""Domain types shared by every other module: Gibbs contexts with a dual
exact-rational / float representation, populations, column-stochastic
matrices, elementary detailed-balanced steps and their validation predicates.

Conventions: level energies are stored pre-multiplied by beta as dimensionless
numbers, and stochastic matrices are column-stochastic with ``T[i|j]`` the
probability of the jump ``j -> i``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

Number = Union[int, float, Fraction]

#: widest denominator D we allow for the common-denominator weight form
MAX_WEIGHT_DENOMINATOR = 10**9


class ThermoOpsError(Exception):
    """Base class for all library errors."""


class DomainError(ThermoOpsError):
    """Violated mathematical precondition (CLI exit status 1)."""


class FormatError(ThermoOpsError):
    """Malformed input file or schema mismatch (CLI exit status 2)."""


@dataclass(frozen=True)
class GibbsContext:
    """Thermal weights of an n-level system.

    ``energies[i]`` is the dimensionless gap beta*hbar*omega_i.  When ``d`` is
    present the working weights are exactly ``g[i] = d[i]/D`` and every
    predicate in the library can be evaluated without floating error; ``exact``
    records whether the rational form was given directly rather than fitted.
    """

    energies: tuple[float, ...]
    g: tuple[Number, ...]
    d: tuple[int, ...] | None
    D: int | None
    exact: bool = False

    @property
    def n(self) -> int:
        return len(self.g)

    @property
    def rational(self) -> bool:
        return self.d is not None

    def require_rational(self) -> None:
        if not self.rational:
            raise DomainError("operation requires a rational-mode context")

    def degenerate_pair(self, i: int, j: int) -> bool:
        """Levels indistinguishable for detailed-balance purposes."""
        if self.rational:
            return self.g[i] == self.g[j]
        return self.energies[i] == self.energies[j]


def _float_weights(energies: Sequence[float]) -> list[float]:
    z = sum(math.exp(-e) for e in energies)
    return [math.exp(-e) / z for e in energies]


def make_gibbs_context(energies: Sequence[float],
                       max_denominator: int | None = 1000) -> GibbsContext:
    """Build a context from dimensionless energies.

    The common-denominator fit scans every total ``D <= n * max_denominator``
    and keeps the one minimising the worst per-level error, so small exact
    cases such as weights (2/3, 1/3) are recovered with D = 3.  Passing
    ``max_denominator=None`` skips the rational form entirely (float mode).
    """
    energies = tuple(float(e) for e in energies)
    if not energies:
        raise DomainError("at least one energy level is required")
    if any(not math.isfinite(e) for e in energies):
        raise DomainError("energies must be finite")
    gf = _float_weights(energies)
    if max_denominator is None:
        return GibbsContext(energies, tuple(gf), None, None, exact=False)
    if max_denominator < 1:
        raise DomainError("max_denominator must be >= 1")
    n = len(energies)
    if n * max_denominator > MAX_WEIGHT_DENOMINATOR:
        raise DomainError(
            f"denominator budget {n * max_denominator} exceeds configured "
            f"width {MAX_WEIGHT_DENOMINATOR}")
    best: tuple[float, int, list[int]] | None = None
    for total in range(n, n * max_denominator + 1):
        d = [max(1, round(gi * total)) for gi in gf]
        s = sum(d)
        err = max(abs(gi - di / s) for gi, di in zip(gf, d))
        if best is None or err < best[0] - 1e-18:
            best = (err, s, d)
            if err == 0.0:
                break
    _, D, d = best
    g = tuple(Fraction(di, D) for di in d)
    return GibbsContext(energies, g, tuple(d), D, exact=False)


def gibbs_context_from_weights(weights: Sequence[Number]) -> GibbsContext:
    """Exact-mode context from rational weights summing to one."""
    w = [Fraction(v) for v in weights]
    if not w:
        raise DomainError("at least one weight is required")
    if any(v <= 0 for v in w):
        raise DomainError("weights must be positive")
    if sum(w) != 1:
        raise DomainError("weights must sum to one exactly")
    D = math.lcm(*(v.denominator for v in w))
    if D > MAX_WEIGHT_DENOMINATOR:
        raise DomainError(
            f"common denominator {D} exceeds configured width "
            f"{MAX_WEIGHT_DENOMINATOR}")
    d = tuple(int(v * D) for v in w)
    energies = tuple(-math.log(float(v)) for v in w)
    return GibbsContext(energies, tuple(w), d, D, exact=True)


@dataclass(frozen=True)
class Population:
    """Nonnegative level occupations; the normalisation may differ from one
    to support restrictions to subsystems."""

    x: tuple[Number, ...]

    def __post_init__(self):
        if any(v < 0 for v in self.x):
            raise DomainError("populations must be nonnegative")
        if sum(self.x) <= 0:
            raise DomainError("population norm must be positive")

    @property
    def norm(self) -> Number:
        return sum(self.x)

    def __iter__(self):
        return iter(self.x)

    def __len__(self):
        return len(self.x)

    def __getitem__(self, i):
        return self.x[i]


def as_values(p) -> tuple[Number, ...]:
    """Accept a Population or any sequence of numbers."""
    if isinstance(p, Population):
        return p.x
    return tuple(p)


@dataclass(frozen=True)
class StochasticMatrix:
    """Column-stochastic matrix; ``cols[j][i]`` is T[i|j]."""

    cols: tuple[tuple[Number, ...], ...]

    @property
    def n(self) -> int:
        return len(self.cols)

    def entry(self, i: int, j: int) -> Number:
        return self.cols[j][i]

    def apply(self, p) -> tuple[Number, ...]:
        x = as_values(p)
        if len(x) != self.n:
            raise DomainError("dimension mismatch in matrix application")
        return tuple(sum(self.cols[j][i] * x[j] for j in range(self.n))
                     for i in range(self.n))

    def compose(self, first: "StochasticMatrix") -> "StochasticMatrix":
        """Matrix of (self after first), i.e. self @ first."""
        if first.n != self.n:
            raise DomainError("dimension mismatch in composition")
        n = self.n
        cols = tuple(
            tuple(sum(self.cols[k][i] * first.cols[j][k] for k in range(n))
                  for i in range(n))
            for j in range(n))
        return StochasticMatrix(cols)

    @staticmethod
    def identity(n: int) -> "StochasticMatrix":
        one, zero = Fraction(1), Fraction(0)
        return StochasticMatrix(tuple(
            tuple(one if i == j else zero for i in range(n))
            for j in range(n)))


def validate_stochastic(T: StochasticMatrix, tol: Number = 1e-9) -> bool:
    """Entries >= -tol and every column sums to one within tol."""
    n = T.n
    if any(len(c) != n for c in T.cols):
        raise DomainError("matrix must be square")
    for col in T.cols:
        if any(v < -tol for v in col):
            return False
        if abs(sum(col) - 1) > tol:
            return False
    return True


def is_gibbs_preserving(T: StochasticMatrix, ctx: GibbsContext,
                        tol: Number = 1e-9) -> bool:
    if T.n != ctx.n:
        raise DomainError("matrix and context dimensions differ")
    img = T.apply(ctx.g)
    return all(abs(img[i] - ctx.g[i]) <= tol for i in range(ctx.n))


def is_detailed_balanced(T: StochasticMatrix, ctx: GibbsContext,
                         tol: Number = 1e-9) -> bool:
    # multiplicative form T[i|j] g_j == T[j|i] g_i avoids dividing by zero
    if T.n != ctx.n:
        raise DomainError("matrix and context dimensions differ")
    g = ctx.g
    for j in range(ctx.n):
        for i in range(j):
            if abs(T.entry(i, j) * g[j] - T.entry(j, i) * g[i]) > tol:
                return False
    return True


@dataclass(frozen=True)
class EdpStep:
    """Elementary detailed-balanced process on one level pair.

    ``p_down`` is the de-exciting probability E[lo|hi]; detailed balance fixes
    the exciting probability to E[hi|lo] = (g_hi/g_lo) * p_down and
    stochasticity fixes the diagonal.
    """

    lo: int
    hi: int
    p_down: Number

    def up_factor(self, ctx: GibbsContext) -> Number:
        """Boltzmann factor for the reverse jump, g_hi/g_lo."""
        if ctx.rational:
            return Fraction(ctx.g[self.hi], ctx.g[self.lo])
        return math.exp(-(ctx.energies[self.hi] - ctx.energies[self.lo]))

    def p_up(self, ctx: GibbsContext) -> Number:
        return self.up_factor(ctx) * self.p_down

    def as_matrix(self, ctx: GibbsContext) -> StochasticMatrix:
        n = ctx.n
        one, zero = Fraction(1), Fraction(0)
        cols = [[one if i == j else zero for i in range(n)] for j in range(n)]
        up = self.p_up(ctx)
        cols[self.hi][self.lo] = self.p_down
        cols[self.hi][self.hi] = 1 - self.p_down
        cols[self.lo][self.hi] = up
        cols[self.lo][self.lo] = 1 - up
        return StochasticMatrix(tuple(tuple(c) for c in cols))


def make_edp_step(ctx: GibbsContext, lo: int, hi: int,
                  p_down: Number) -> EdpStep:
    """Validated constructor; rejects degenerate pairs, which admit no
    detailed-balanced process with distinct frequencies."""
    n = ctx.n
    if not (0 <= lo < n and 0 <= hi < n) or lo == hi:
        raise DomainError("step needs two distinct levels in range")
    if ctx.degenerate_pair(lo, hi):
        raise DomainError(f"levels {lo} and {hi} are degenerate")
    if ctx.rational:
        if ctx.g[hi] > ctx.g[lo]:
            raise DomainError("hi must be the higher-energy level")
    elif ctx.energies[hi] < ctx.energies[lo]:
        raise DomainError("hi must be the higher-energy level")
    if not 0 <= p_down <= 1:
        raise DomainError("p_down must lie in [0, 1]")
    return EdpStep(lo, hi, p_down)


def thermo_transposition(ctx: GibbsContext, lo: int, hi: int) -> EdpStep:
    """Extreme step with de-exciting probability one."""
    return make_edp_step(ctx, lo, hi, Fraction(1) if ctx.rational else 1.0)


@dataclass(frozen=True)
class ThermoPermutation:
    """Pullback through the embedding of a permutation acting on D slots."""

    lifted_perm: tuple[int, ...]
    pulled_back: StochasticMatrix

    def apply(self, p) -> tuple[Number, ...]:
        return self.pulled_back.apply(p)


@dataclass(frozen=True)
class ConvexDecomposition:
    """Weights and thermo-permutation factors of a Gibbs-preserving matrix."""

    terms: tuple[tuple[Number, ThermoPermutation], ...]

    def __post_init__(self):
        if any(w < 0 for w, _ in self.terms):
            raise DomainError("decomposition weights must be nonnegative")
        if abs(sum(w for w, _ in self.terms) - 1) > 1e-9:
            raise DomainError("decomposition weights must sum to one")

    @property
    def n(self) -> int:
        return self.terms[0][1].pulled_back.n

    def reconstruct(self) -> StochasticMatrix:
        n = self.n
        cols = [[Fraction(0)] * n for _ in range(n)]
        for w, perm in self.terms:
            m = perm.pulled_back
            for j in range(n):
                for i in range(n):
                    cols[j][i] += w * m.cols[j][i]
        return StochasticMatrix(tuple(tuple(c) for c in cols))
