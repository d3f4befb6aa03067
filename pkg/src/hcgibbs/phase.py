"""Scalar fixed-point systems for the sums of boundary laws.

A translation-invariant law with sum ``A`` exists iff ``A (1 + A)**k = Lambda``.
A two-periodic law pair with sums ``(A, B)`` solves ``A = f(B)``, ``B = f(A)``
for ``f(x) = Lambda / (1 + x)**k``; its non-diagonal solutions are the outer
fixed points of ``h = f o f``, which exist iff ``Lambda > Lambda_cr(k)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction

import numpy as np

from .activities import ActivitySpec, SeriesSum, sum_activities
from .errors import DomainError, FixedPointScanError, NumericalError

__all__ = [
    "Regime",
    "ModelParams",
    "PhaseReport",
    "critical_lambda",
    "solve_translation_invariant",
    "fixed_points_of_h",
    "solve_two_periodic",
    "closed_form_pair_k2",
    "classify",
    "analyze",
    "ti_residual",
    "pair_residual",
]

GRID_POINTS = 4096
TANGENCY_WINDOW = 1e-6


class Regime(str, Enum):
    NO_MEASURE = "NoMeasure"
    UNIQUE_TI = "UniqueTI"
    THREE_PERIODIC = "ThreePeriodic"


@dataclass(frozen=True)
class ModelParams:
    """Tree order and total activity; ``Lambda = inf`` encodes divergence."""

    k: int
    Lambda: float

    def __post_init__(self):
        _check_k(self.k)
        if math.isnan(self.Lambda) or self.Lambda <= 0:
            raise DomainError(f"Lambda must be positive, got {self.Lambda!r}")

    @property
    def divergent(self) -> bool:
        return math.isinf(self.Lambda)


@dataclass(frozen=True)
class PhaseReport:
    k: int
    Lambda: float
    Lambda_cr: float
    regime: Regime
    A0: float | None = None
    pair: tuple[float, float] | None = None
    residuals: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "Lambda": None if math.isinf(self.Lambda) else self.Lambda,
            "Lambda_cr": self.Lambda_cr,
            "regime": self.regime.value,
            "A0": self.A0,
            "pair": list(self.pair) if self.pair else None,
            "residuals": dict(self.residuals),
        }


def _check_k(k):
    if isinstance(k, bool) or int(k) != k or k < 2:
        raise DomainError(f"tree order k must be an integer >= 2, got {k!r}")


def _check_lambda(Lambda):
    if not (math.isfinite(Lambda) and Lambda > 0):
        raise DomainError(f"Lambda must be positive and finite, got {Lambda!r}")


def critical_lambda(k: int) -> float:
    """``k**k / (k-1)**(k+1)``, the activity above which periodic phases split."""
    _check_k(k)
    k = int(k)
    return float(Fraction(k ** k, (k - 1) ** (k + 1)))


def ti_residual(k: int, Lambda: float, A: float) -> float:
    return abs(A * (1.0 + A) ** k - Lambda)


def pair_residual(k: int, Lambda: float, A: float, B: float) -> float:
    return max(abs(A * (1.0 + B) ** k - Lambda), abs(B * (1.0 + A) ** k - Lambda))


def solve_translation_invariant(k: int, Lambda: float, tol: float = 1e-12) -> float:
    """Unique positive root of ``A (1 + A)**k = Lambda``.

    The map is strictly increasing from 0, so bisection on ``[0, Lambda]``
    always brackets the root; a few guarded Newton steps then polish it.
    """
    _check_k(k)
    _check_lambda(Lambda)

    def F(a):
        return a * (1.0 + a) ** k - Lambda

    lo, hi = 0.0, Lambda
    for _ in range(2000):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if F(mid) < 0:
            lo = mid
        else:
            hi = mid
    a = lo if abs(F(lo)) <= abs(F(hi)) else hi
    for _ in range(4):
        dF = (1.0 + a) ** (k - 1) * (1.0 + (k + 1) * a)
        step = a - F(a) / dF
        if not lo <= step <= hi or abs(F(step)) >= abs(F(a)):
            break
        a = step
    if abs(F(a)) > tol * max(1.0, Lambda):
        raise NumericalError(f"TI root residual {abs(F(a)):.3e} above tolerance")
    return a


def _bisect(g, a, b, ga):
    """Sign-change bisection run to floating resolution."""
    for _ in range(2000):
        m = 0.5 * (a + b)
        if m <= a or m >= b:
            break
        gm = g(m)
        if gm == 0.0:
            return m
        if (gm > 0) == (ga > 0):
            a, ga = m, gm
        else:
            b = m
    return 0.5 * (a + b)


def _pair_from_ratio(k: int, Lambda: float) -> tuple[float, float]:
    """Outer pair via the ratio ``r = ((B/A))**(1/k) = exp(s)``, ``s > 0``.

    Eliminating ``B`` gives ``A = (r - 1) / (r**k - r)`` and ``B = r**k A``,
    which tends to ``1/(k-1)`` as ``r -> 1``. ``Lambda = A (1 + B)**k`` grows
    like ``s**2`` from the critical value, so bisection in ``s`` stays
    well conditioned where the direct scan of ``h(x) - x`` loses all signal.
    """

    def pair(s):
        a = math.expm1(s) / (math.exp(s) * math.expm1((k - 1) * s))
        return a, a * math.exp(k * s)

    def lam(s):
        a, b = pair(s)
        return a * (1.0 + b) ** k

    lo, hi = 0.0, 1e-3
    while lam(hi) <= Lambda:
        lo, hi = hi, 2 * hi
        if hi > 1e3:
            raise NumericalError(f"ratio bracket failed for Lambda={Lambda!r}")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if lam(mid) < Lambda:
            lo = mid
        else:
            hi = mid
    return pair(0.5 * (lo + hi))


def fixed_points_of_h(k: int, Lambda: float, tol: float = 1e-12) -> list[float]:
    """All fixed points of ``h(x) = f(f(x))`` with ``f(x) = Lambda/(1+x)**k``.

    Returns one point (the TI root) when ``Lambda <= Lambda_cr(k)`` and three
    sorted points otherwise. The roots are located by a sign-change scan of
    ``h(x) - x`` on a uniform grid over ``[h(0), Lambda]``, refined by
    bisection. The grid is augmented with a geometric ladder of points around
    the TI root so that nearly tangent outer roots are still bracketed. The
    outer pair is then polished by :func:`_pair_from_ratio`, which also takes
    over just above criticality where ``h(x) - x`` is too flat to scan.
    """
    _check_k(k)
    _check_lambda(Lambda)
    lam_cr = critical_lambda(k)
    A0 = solve_translation_invariant(k, Lambda, tol)
    if Lambda <= lam_cr and lam_cr - Lambda < TANGENCY_WINDOW:
        # triple root collapses onto 1/(k-1); the scan cannot resolve it
        return [A0]

    def f(x):
        return Lambda / (1.0 + x) ** k

    def g(x):
        return f(f(x)) - x

    lo = f(Lambda)  # h(0)
    grid = np.linspace(lo, Lambda, GRID_POINTS)
    spacing = (Lambda - lo) / (GRID_POINTS - 1)
    # below d_min the linear signal |h'(A0) - 1| * d drowns in rounding noise
    slope = abs((k * A0 / (1.0 + A0)) ** 2 - 1.0)
    d_min = 32 * np.finfo(float).eps * max(1.0, A0) / max(slope, 1e-300)
    ladder = spacing * 0.5 ** np.arange(1, 60)
    ladder = ladder[ladder > d_min]
    grid = np.unique(np.concatenate([grid, A0 - ladder, A0 + ladder]))
    # the TI root is known; scan each side separately so its own sign noise is ignored
    sep = 64 * np.finfo(float).eps * max(1.0, A0)
    roots = [A0]
    for side in (grid[grid < A0 - sep], grid[grid > A0 + sep]):
        vals = f(f(side)) - side
        for i in range(side.size - 1):
            if vals[i] == 0.0:
                roots.append(float(side[i]))
            elif vals[i] * vals[i + 1] < 0:
                roots.append(_bisect(g, float(side[i]), float(side[i + 1]), float(vals[i])))
        if side.size and vals[-1] == 0.0:
            roots.append(float(side[-1]))

    scale = max(1.0, Lambda)
    roots.sort()
    merged = [roots[0]]
    for r in roots[1:]:
        if r - merged[-1] > 10 * tol * scale:
            merged.append(r)
    expected = 3 if Lambda > lam_cr else 1
    trace = {"grid": grid, "values": f(f(grid)) - grid, "roots": list(merged), "A0": A0}
    if expected == 3 and (len(merged) == 3 or Lambda - lam_cr < TANGENCY_WINDOW):
        low, high = _pair_from_ratio(k, Lambda)
        if len(merged) == 3 and max(abs(low - merged[0]), abs(high - merged[2])) > 1e-4 * scale:
            raise FixedPointScanError(
                f"scan roots {merged} disagree with polished pair ({low}, {high})", trace)
        merged = [low, A0, high]
    if len(merged) != expected:
        raise FixedPointScanError(
            f"expected {expected} fixed point(s) of h for k={k}, Lambda={Lambda!r}, "
            f"found {len(merged)}", trace)
    return merged


def solve_two_periodic(k: int, Lambda: float, tol: float = 1e-12):
    """Non-diagonal solution ``(A_low, A_high)`` of the two-periodic system, or None."""
    pts = fixed_points_of_h(k, Lambda, tol)
    if len(pts) == 1:
        return None
    low, high = pts[0], pts[2]
    f_low = Lambda / (1.0 + low) ** k
    f_high = Lambda / (1.0 + high) ** k
    scale = max(1.0, Lambda)
    if abs(f_low - high) > 1e-9 * scale or abs(f_high - low) > 1e-9 * scale:
        raise NumericalError(
            f"outer fixed points do not pair under f: f({low})={f_low}, f({high})={f_high}")
    return low, high


def closed_form_pair_k2(Lambda: float) -> tuple[float, float]:
    """Closed-form two-periodic pair for ``k = 2``; requires ``Lambda > 4``."""
    if not (math.isfinite(Lambda) and Lambda > 4.0):
        raise DomainError(f"k=2 pair exists only for Lambda > 4, got {Lambda!r}")
    root = math.sqrt(Lambda * (Lambda - 4.0))
    high = 0.5 * (Lambda - 2.0 + root)
    # product of the pair is 1; this avoids cancellation in the minus branch
    low = 2.0 / (Lambda - 2.0 + root)
    return low, high


def classify(k: int, total, tol: float = 1e-12) -> PhaseReport:
    """Assemble a :class:`PhaseReport` for tree order ``k`` and total activity.

    ``total`` is a :class:`SeriesSum` or a float; an infinite value means the
    activity series diverges, in which case no solver is invoked.
    """
    Lambda = total.value if isinstance(total, SeriesSum) else float(total)
    params = ModelParams(int(k), Lambda)
    lam_cr = critical_lambda(params.k)
    if params.divergent:
        return PhaseReport(params.k, math.inf, lam_cr, Regime.NO_MEASURE)
    A0 = solve_translation_invariant(params.k, Lambda, tol)
    residuals = {"A0": ti_residual(params.k, Lambda, A0)}
    if Lambda <= lam_cr:
        return PhaseReport(params.k, Lambda, lam_cr, Regime.UNIQUE_TI, A0, None, residuals)
    pair = solve_two_periodic(params.k, Lambda, tol)
    residuals["pair"] = pair_residual(params.k, Lambda, *pair)
    return PhaseReport(params.k, Lambda, lam_cr, Regime.THREE_PERIODIC, A0, pair, residuals)


def analyze(spec: ActivitySpec, k: int, tol: float = 1e-12) -> PhaseReport:
    """Sum the activities of ``spec`` and classify the resulting phase."""
    return classify(k, sum_activities(spec, tol), tol)
