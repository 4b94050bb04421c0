"""Transition probabilities of the resonant two-level exchange with a
single-mode thermal bosonic bath, with certified truncation, the closed-form
achievability bounds, and the comparison against partial level thermalisation.

Everything here is float arithmetic; the series are sums of nonnegative terms
so truncation always yields certified lower bounds, and dropping the tail of
the de-exciting sum costs at most ``exp(-beta_bar * m)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .core import DomainError

#: truncation order of the certified lower bound (all dropped terms >= 0)
LOWER_BOUND_TERMS = 12
#: reference control time known to sit near the achievable maximum
LOWER_BOUND_S_REF = 98.92
_S_MAX = 200.0
_S_STEP = 0.01
_M_CAP = 10**6

#: 2019 SI exact constants
HBAR = 1.054571817e-34
PLANCK_H = 6.62607015e-34
BOLTZMANN_K = 1.380649e-23


@dataclass(frozen=True)
class JcParams:
    """Dimensionless model point: inverse-temperature gap ``beta_bar``,
    rescaled interaction time ``s`` and truncation order ``m`` whose tail
    error is certified by ``tail_bound``."""

    beta_bar: float
    s: float
    m: int
    tail_bound: float
    capped: bool = False


def jc_params(beta_bar: float, s: float, tol: float = 1e-10) -> JcParams:
    """Pick the truncation order from the tail rule ceil(ln(1/tol)/beta_bar),
    capped at 10^6 with the residual error surfaced in ``tail_bound``."""
    if beta_bar <= 0:
        raise DomainError("beta_bar must be positive (the series diverges)")
    if s < 0:
        raise DomainError("the rescaled time s must be nonnegative")
    m = math.ceil(math.log(1.0 / tol) / beta_bar)
    capped = False
    if m > _M_CAP:
        m = _M_CAP
        capped = True
    m = max(m, 1)
    return JcParams(beta_bar, s, m, math.exp(-beta_bar * m), capped)


def j_probabilities(params: JcParams) -> tuple[float, float]:
    """(exciting, de-exciting) transition probabilities, truncated at m with
    error at most ``tail_bound``; their ratio is the Boltzmann factor."""
    bb, s, m = params.beta_bar, params.s, params.m
    n = np.arange(1, m + 1, dtype=np.float64)
    sin2 = np.sin(s * np.sqrt(n)) ** 2
    scale = 1.0 - math.exp(-bb)
    j_up = scale * float(np.dot(sin2, np.exp(-bb * n)))
    j_down = scale * float(np.dot(sin2, np.exp(-bb * (n - 1))))
    return j_up, j_down


_LOG4_3 = math.log(4.0) / 3.0


def j_upper_bound(beta_bar: float) -> float:
    """Time-independent cap on the de-exciting probability; the two closed
    forms meet continuously at beta_bar = log(4)/3."""
    if beta_bar < 0:
        raise DomainError("beta_bar must be nonnegative")
    if beta_bar <= _LOG4_3:
        e = math.exp(beta_bar)
        return (8.0 * math.exp(-beta_bar) - e**2 + e**3 + 8.0) / 16.0
    return math.exp(-4.0 * beta_bar) - math.exp(-3.0 * beta_bar) + 1.0


@lru_cache(maxsize=1)
def _lower_grid() -> tuple[np.ndarray, np.ndarray]:
    s = np.arange(0.0, _S_MAX + _S_STEP / 2, _S_STEP)
    roots = np.sqrt(np.arange(1, LOWER_BOUND_TERMS + 1, dtype=np.float64))
    sin2 = np.sin(np.outer(s, roots)) ** 2
    return s, sin2


def _truncated_down(s: float, beta_bar: float) -> float:
    n = np.arange(1, LOWER_BOUND_TERMS + 1, dtype=np.float64)
    w = np.exp(-beta_bar * (n - 1))
    val = (1.0 - math.exp(-beta_bar)) * float(
        np.dot(np.sin(s * np.sqrt(n)) ** 2, w))
    return val


def j_lower_bound_with_argmax(beta_bar: float) -> tuple[float, float]:
    """Certified floor on the achievable de-exciting probability and the
    control time realising it.

    Maximises the truncated sum over a coarse grid augmented with the
    reference time and pi/2, then refines by golden-section; any truncated
    value is a valid lower bound since every dropped term is nonnegative.
    """
    if beta_bar <= 0:
        raise DomainError("beta_bar must be positive")
    grid, sin2 = _lower_grid()
    n = np.arange(1, LOWER_BOUND_TERMS + 1, dtype=np.float64)
    w = np.exp(-beta_bar * (n - 1))
    vals = sin2 @ w
    idx = int(np.argmax(vals))
    best_s = float(grid[idx])
    for cand in (LOWER_BOUND_S_REF, math.pi / 2):
        if _truncated_down(cand, beta_bar) > _truncated_down(best_s, beta_bar):
            best_s = cand
    lo = max(0.0, best_s - _S_STEP)
    hi = min(_S_MAX, best_s + _S_STEP)
    phi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - phi * (b - a)
    dd = a + phi * (b - a)
    fc = _truncated_down(c, beta_bar)
    fd = _truncated_down(dd, beta_bar)
    for _ in range(80):
        if fc > fd:
            b, dd, fd = dd, c, fc
            c = b - phi * (b - a)
            fc = _truncated_down(c, beta_bar)
        else:
            a, c, fc = c, dd, fd
            dd = a + phi * (b - a)
            fd = _truncated_down(dd, beta_bar)
    s_star = (a + b) / 2
    val = _truncated_down(s_star, beta_bar)
    if val < _truncated_down(best_s, beta_bar):
        s_star = best_s
        val = _truncated_down(best_s, beta_bar)
    return val, s_star


def j_lower_bound(beta_bar: float) -> float:
    return j_lower_bound_with_argmax(beta_bar)[0]


def plt_max(beta_bar: float) -> float:
    """Largest de-exciting probability a partial level thermalisation can
    reach: 1 / (1 + exp(-beta_bar))."""
    if beta_bar < 0:
        raise DomainError("beta_bar must be nonnegative")
    return 1.0 / (1.0 + math.exp(-beta_bar))


@dataclass(frozen=True)
class RegionRow:
    beta_bar: float
    lower: float
    upper: float
    plt_max: float
    jc_beats_plt: bool


def region_sweep(beta_grid) -> list[RegionRow]:
    """Achievable-region table over the given gap values."""
    rows = []
    for bb in beta_grid:
        lo = j_lower_bound(bb)
        up = j_upper_bound(bb)
        pm = plt_max(bb)
        rows.append(RegionRow(float(bb), lo, up, pm, lo > pm))
    return rows


@dataclass(frozen=True)
class NotAchievable:
    """Signal value: the target de-exciting probability is above every value
    found; carries the best certified value and where it occurs."""

    best: float
    s_best: float


def find_s_for_target(target: float, beta_bar: float,
                      tol: float = 1e-9) -> float | NotAchievable:
    """Control time s with |J_down(s) - target| <= tol, if one is found.

    The de-exciting probability is continuous in s and zero at s = 0, so any
    grid value above the target brackets a crossing for bisection.
    """
    if not 0 <= target <= 1:
        raise DomainError("target must lie in [0, 1]")
    if target == 0:
        return 0.0
    params0 = jc_params(beta_bar, 0.0, tol=min(tol / 4, 1e-10))
    m = params0.m

    n = np.arange(1, m + 1, dtype=np.float64)
    w = np.exp(-beta_bar * (n - 1)) * (1.0 - math.exp(-beta_bar))
    roots = np.sqrt(n)

    def f(s: float) -> float:
        return float(np.dot(np.sin(s * roots) ** 2, w))

    grid = np.arange(0.0, _S_MAX + 0.05, 0.05)
    best = 0.0
    s_best = 0.0
    bracket = None
    prev_s = 0.0
    for s in grid[1:]:
        v = f(float(s))
        if v > best:
            best, s_best = v, float(s)
        if bracket is None and v >= target:
            bracket = (prev_s, float(s))
        prev_s = float(s)
    if bracket is None:
        return NotAchievable(best, s_best)
    a, b = bracket
    for _ in range(200):
        mid = (a + b) / 2
        if f(mid) >= target:
            b = mid
        else:
            a = mid
        if abs(f(b) - target) <= tol / 2:
            break
    return b


def beta_bar_from_physical(temperature_k: float, frequency_hz: float,
                           angular: bool = False) -> float:
    """Dimensionless gap from lab units.

    ``angular=False`` reads the frequency as an ordinary frequency nu (gap
    h*nu); ``angular=True`` reads it as omega in rad/s (gap hbar*omega).
    """
    if temperature_k <= 0 or frequency_hz <= 0:
        raise DomainError("temperature and frequency must be positive")
    energy = (HBAR if angular else PLANCK_H) * frequency_hz
    return energy / (BOLTZMANN_K * temperature_k)
