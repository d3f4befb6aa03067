"""Boundary-law vectors on the nonzero spins.

For the star graph (every occupied spin adjacent only to 0) a law
normalised at 0 is determined by a single scalar: the sum ``A`` of the
neighbouring law it is built from, via ``z_i = lambda_i / (1 + A)**k``.
A translation-invariant law uses its own sum; a two-periodic pair uses the
sum of the partner law.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Mapping

import numpy as np
from scipy.special import zeta

from .activities import (
    ActivitySpec,
    SeriesSum,
    lambda_at,
    lambda_values,
    sum_activities,
    sum_weighted,
    tail_sup,
)
from .errors import DivergenceError, DomainError

__all__ = [
    "BoundaryLaw",
    "PeriodicLawPair",
    "Normalisability",
    "boundary_law_from_A",
    "periodic_pair",
    "law_sum",
    "consistency_residual",
    "normalisability_check",
    "probe_indices",
]


@dataclass(frozen=True)
class PowerLawProfile:
    """Synthetic values ``scale * |j|**(-exponent)`` replacing the activity form."""

    scale: float
    exponent: float


@dataclass(frozen=True)
class BoundaryLaw:
    """Boundary law ``z(i) = lambda_i / (1 + A)**k`` with ``z(0) = 1``.

    ``A`` is the sum of the neighbouring law this one is built from. For a
    translation-invariant law at the root of ``A (1 + A)**k = Lambda`` it is
    also the sum of this law.

    ``overrides`` replaces single entries and ``profile`` replaces the whole
    activity form with a power law; both exist to probe the consistency and
    normalisability checks with laws that are deliberately wrong.
    """

    spec: ActivitySpec
    k: int
    A: float
    overrides: tuple[tuple[int, float], ...] = ()
    profile: PowerLawProfile | None = None
    _table: dict = field(default=None, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        if not (math.isfinite(self.A) and self.A >= 0):
            raise DomainError(f"A must be a nonnegative finite number, got {self.A!r}")
        if isinstance(self.k, bool) or int(self.k) != self.k or self.k < 1:
            raise DomainError(f"k must be a positive integer, got {self.k!r}")
        object.__setattr__(self, "_table", dict(self.overrides))

    @property
    def denominator(self) -> float:
        return (1.0 + self.A) ** self.k

    def _base(self, js: np.ndarray) -> np.ndarray:
        if self.profile is not None:
            return self.profile.scale * np.abs(js).astype(np.float64) ** (-self.profile.exponent)
        return lambda_values(self.spec, js) / self.denominator

    def z(self, i: int) -> float:
        i = int(i)
        if i == 0:
            return 1.0
        if i in self._table:
            return self._table[i]
        if self.profile is not None:
            return self.profile.scale * abs(i) ** (-self.profile.exponent)
        return lambda_at(self.spec, i) / self.denominator

    __call__ = z

    def values(self, js) -> np.ndarray:
        """Vectorised ``z`` over nonzero integer indices."""
        js = np.asarray(js, dtype=np.int64)
        out = self._base(js)
        if self._table:
            for pos, j in enumerate(js.tolist()):
                if j in self._table:
                    out[pos] = self._table[j]
        return out

    def tail_sup(self, n: int) -> float:
        """``sup_{|j| > n} z(j)``."""
        if self.profile is not None:
            base = self.profile.scale * (n + 1) ** (-self.profile.exponent)
        else:
            base = tail_sup(self.spec, n) / self.denominator
        extra = [v for j, v in self.overrides if abs(j) > n]
        return max([base, *extra])

    def perturbed(self, i: int, delta: float) -> "BoundaryLaw":
        """Copy with ``z(i)`` shifted by ``delta``."""
        if i == 0:
            raise DomainError("z(0) is fixed to 1 by normalisation")
        table = dict(self.overrides)
        table[int(i)] = self.z(i) + delta
        return replace(self, overrides=tuple(sorted(table.items())))

    def with_values(self, values: Mapping[int, float]) -> "BoundaryLaw":
        table = dict(self.overrides)
        table.update({int(j): float(v) for j, v in values.items()})
        return replace(self, overrides=tuple(sorted(table.items())))

    def with_profile(self, exponent: float, scale: float = 1.0) -> "BoundaryLaw":
        """Copy whose values are ``scale * |j|**(-exponent)`` on every nonzero spin."""
        return replace(self, profile=PowerLawProfile(float(scale), float(exponent)))


@dataclass(frozen=True)
class PeriodicLawPair:
    """Two-periodic laws: ``law_even`` is built from ``B``, ``law_odd`` from ``A``.

    So ``sum(law_even) = A`` and ``sum(law_odd) = B`` at a solution.
    """

    law_even: BoundaryLaw
    law_odd: BoundaryLaw
    A: float
    B: float

    @property
    def spec(self) -> ActivitySpec:
        return self.law_even.spec

    @property
    def k(self) -> int:
        return self.law_even.k

    def swapped(self) -> "PeriodicLawPair":
        return PeriodicLawPair(self.law_odd, self.law_even, self.B, self.A)


def boundary_law_from_A(spec: ActivitySpec, k: int, A: float) -> BoundaryLaw:
    return BoundaryLaw(spec, int(k), float(A))


def periodic_pair(spec: ActivitySpec, k: int, A: float, B: float) -> PeriodicLawPair:
    """Pair with ``z_i = lambda_i/(1+B)**k`` on even and ``lambda_i/(1+A)**k`` on odd vertices."""
    return PeriodicLawPair(boundary_law_from_A(spec, k, B), boundary_law_from_A(spec, k, A),
                           float(A), float(B))


def _profile_sum(profile: PowerLawProfile) -> float:
    if profile.exponent <= 1.0:
        raise DivergenceError(
            f"law values decay like |j|^-{profile.exponent:g}; their sum diverges")
    return 2.0 * profile.scale * float(zeta(profile.exponent))


def law_sum(law: BoundaryLaw, tol: float = 1e-12) -> SeriesSum:
    """``sum_{j != 0} z(j)`` with a certified tail."""
    if law.profile is not None:
        value = _profile_sum(law.profile)
        terms = 0
        tail = 0.0
        base_at = lambda j: law.profile.scale * abs(j) ** (-law.profile.exponent)  # noqa: E731
    else:
        total = sum_activities(law.spec, tol * law.denominator)
        if not math.isfinite(total.value):
            raise DivergenceError("activity sequence is flagged divergent")
        value = total.value / law.denominator
        tail = total.tail_bound / law.denominator
        terms = total.terms_used
        base_at = lambda j: lambda_at(law.spec, j) / law.denominator  # noqa: E731
    correction = math.fsum(v - base_at(j) for j, v in law.overrides)
    return SeriesSum(value + correction, tail, terms)


def probe_indices(n_dense: int = 64, n_random: int = 16, seed: int = 0,
                  far: int = 10 ** 6) -> np.ndarray:
    """``0 < |i| <= n_dense`` plus ``n_random`` signed indices drawn from the far tail."""
    rng = np.random.default_rng(seed)
    dense = np.arange(1, n_dense + 1)
    tail = rng.integers(n_dense + 1, far, size=n_random) * rng.choice([-1, 1], size=n_random)
    return np.concatenate([dense, -dense, tail])


def consistency_residual(law, tol: float = 1e-12, seed: int = 0) -> float:
    """Sup over probe indices of ``|z_i - lambda_i / (1 + sum(partner))**k|``.

    The partner of a translation-invariant law is the law itself; for a
    :class:`PeriodicLawPair` each law is checked against the other's sum.
    Raises :class:`DivergenceError` when a law's sum does not converge.
    """
    js = probe_indices(seed=seed)
    if isinstance(law, PeriodicLawPair):
        checks = [(law.law_even, law.law_odd), (law.law_odd, law.law_even)]
    else:
        checks = [(law, law)]
    worst = 0.0
    for target, partner in checks:
        s = law_sum(partner, tol)
        predicted = lambda_values(target.spec, js) / (1.0 + s.value) ** target.k
        worst = max(worst, float(np.max(np.abs(target.values(js) - predicted))))
    return worst


@dataclass(frozen=True)
class Normalisability:
    """Outcome of the summability test for ``sum_j z(j)**((k+1)/k)``.

    Truthy iff normalisable. ``power_sum`` is the certified sum, or None when
    the series diverges or its tail cannot be certified to the tolerance.
    """

    normalisable: bool
    power: float
    power_sum: SeriesSum | None
    reason: str

    def __bool__(self):
        return self.normalisable


def normalisability_check(law: BoundaryLaw, tol: float = 1e-12) -> Normalisability:
    """Decide whether ``sum_j z(j)**((k+1)/k)`` converges.

    Built-in activity kinds decay fast enough for the power sum to converge
    (geometric and Poisson exponentially, telescoping like ``j**-2``), and the
    sum is then evaluated with the tail bound
    ``tail(z) * sup_tail(z)**(1/k)``. Power-law profiles are decided by their
    exponent.
    """
    p = (law.k + 1) / law.k
    if law.profile is not None:
        decay = law.profile.exponent * p
        if decay <= 1.0:
            return Normalisability(False, p, None,
                                   f"z(j)^{p:g} ~ |j|^-{decay:g} is not summable")
        value = 2.0 * law.profile.scale ** p * float(zeta(decay))
        value += math.fsum(v ** p - law.profile.scale ** p * abs(j) ** (-decay)
                           for j, v in law.overrides)
        return Normalisability(True, p, SeriesSum(value, 0.0, 0), f"|j|^-{decay:g} is summable")

    table = dict(law.overrides)

    def weights(js):
        # lambda_j * w_j must equal z_j**p; z_j = lambda_j / D away from overrides
        js = np.asarray(js, dtype=np.int64)
        lam = lambda_values(law.spec, js)
        z = law.values(js)
        with np.errstate(divide="ignore", invalid="ignore"):
            w = np.where(lam > 0, z ** p / lam, 0.0)
        if table:
            for pos, j in enumerate(js.tolist()):
                if j in table and lam[pos] == 0:
                    raise DomainError("override on a spin with zero activity")
        return w

    def weight_sup(n):
        # z**p / lambda = z**(1/k) / D on the base law
        base = tail_sup(law.spec, n) / law.denominator
        out = base ** (1.0 / law.k) / law.denominator
        for j, v in law.overrides:
            if abs(j) > n:
                out = max(out, v ** p / lambda_at(law.spec, j))
        return out

    reason = f"{law.spec.kind.value} activities decay summably"
    try:
        total = sum_weighted(law.spec, weights, tol, weight_sup=weight_sup)
    except DivergenceError:
        # slow polynomial tails (telescoping, large k) converge but not to tol
        # within the term budget; the verdict itself is analytic
        total = None
        reason += f"; power sum not certified to {tol:g}"
    return Normalisability(True, p, total, reason)
