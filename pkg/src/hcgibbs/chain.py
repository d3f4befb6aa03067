"""Transition kernels of the tree-indexed Markov chains and their stationary laws.

Over the star graph every kernel has the same sparse shape: row 0 is a
distribution over all spins and every row ``i != 0`` is one shared
distribution (a point mass at 0 for single-step kernels). Kernels are stored
in that form, so a truncation at ``[-N, N]`` costs O(N) memory and ``x P``
costs O(N) time.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from .activities import ActivitySpec, lambda_values, max_support, sum_weighted, tail_bound
from .boundary import BoundaryLaw, PeriodicLawPair
from .errors import DomainError, TruncationError

__all__ = [
    "TransitionKernel",
    "StationaryDist",
    "truncation_tail",
    "minimal_truncation",
    "build_ti_kernel",
    "build_periodic_kernel",
    "stationary_ti",
    "stationary_periodic",
    "stationarity_residual",
    "to_csv",
]

_MAX_N = 1 << 40


@dataclass(frozen=True)
class TransitionKernel:
    """Row-stochastic kernel on the spins ``-N..N``.

    ``row0`` is the distribution out of spin 0 and ``other`` the common
    distribution out of every nonzero spin, both indexed by ``j + N``.
    """

    N: int
    row0: np.ndarray
    other: np.ndarray
    kind: str = "ti"
    tail_mass: float = 0.0

    @property
    def indices(self) -> np.ndarray:
        return np.arange(-self.N, self.N + 1)

    def row(self, i: int) -> np.ndarray:
        if abs(i) > self.N:
            raise DomainError(f"row {i} outside truncation [-{self.N}, {self.N}]")
        return self.row0 if i == 0 else self.other

    def entry(self, i: int, j: int) -> float:
        return float(self.row(i)[j + self.N])

    def left_apply(self, x) -> np.ndarray:
        """Row vector times kernel, ``x P``."""
        x = np.asarray(x, dtype=np.float64)
        if x.shape != self.row0.shape:
            raise DomainError(f"vector has shape {x.shape}, kernel expects {self.row0.shape}")
        x0 = x[self.N]
        rest = math.fsum(x) - x0
        return x0 * self.row0 + rest * self.other

    def compose(self, right: "TransitionKernel", kind: str = "product") -> "TransitionKernel":
        """Kernel product ``self @ right`` without densifying."""
        if right.N != self.N:
            raise DomainError("kernels must share the truncation level")
        n = self.N

        def mix(r):
            # sum_m r[m] right[m, :] = r[0] right.row0 + (1 - r[0]) right.other
            return r[n] * right.row0 + (math.fsum(r) - r[n]) * right.other

        return TransitionKernel(n, mix(self.row0), mix(self.other), kind,
                                self.tail_mass + right.tail_mass)

    def to_dense(self) -> np.ndarray:
        if self.N > 2000:
            raise DomainError("refusing to densify a kernel with N > 2000")
        P = np.tile(self.other, (2 * self.N + 1, 1))
        P[self.N] = self.row0
        return P

    def row_sums(self) -> tuple[float, float]:
        return math.fsum(self.row0), math.fsum(self.other)

    def to_dict(self) -> dict:
        keep = lambda row: {str(int(j)): float(v) for j, v in zip(self.indices, row) if v != 0.0}  # noqa: E731
        return {"N": self.N, "kind": self.kind, "tail_mass": self.tail_mass,
                "row0": keep(self.row0), "other_row": keep(self.other)}


@dataclass(frozen=True)
class StationaryDist:
    """Closed-form stationary vector ``x_0 = num0 / D``, ``x_j = lambda_j w_j / D``.

    ``law`` supplies the weights ``w``; ``S`` (and ``S_tilde`` for periodic
    chains) are the sums ``sum_l lambda_l w_l`` the formula was built from.
    """

    spec: ActivitySpec
    law: BoundaryLaw | None
    x0: float
    denominator: float
    S: float
    S_tilde: float | None = None

    def prob(self, j: int) -> float:
        if j == 0:
            return self.x0
        if self.law is None:
            return 0.0
        return float(lambda_values(self.spec, [j])[0] * self.law.values([j])[0] / self.denominator)

    def vector(self, N: int) -> np.ndarray:
        """Probabilities over ``-N..N`` without renormalising."""
        out = np.zeros(2 * N + 1)
        out[N] = self.x0
        if self.law is not None and N > 0:
            js = np.concatenate([np.arange(-N, 0), np.arange(1, N + 1)])
            vals = lambda_values(self.spec, js) * self.law.values(js) / self.denominator
            out[:N] = vals[:N]
            out[N + 1:] = vals[N:]
        return out

    def restricted(self, N: int) -> np.ndarray:
        """Probabilities over ``-N..N`` renormalised to sum to 1."""
        v = self.vector(N)
        return v / math.fsum(v)

    def to_dict(self, N: int = 32) -> dict:
        v = self.vector(N)
        return {"x0": self.x0, "S": self.S, "S_tilde": self.S_tilde,
                "x": {str(j): float(p) for j, p in zip(range(-N, N + 1), v) if p != 0.0}}


def truncation_tail(spec: ActivitySpec, law: BoundaryLaw, N: int) -> float:
    """Certified bound on ``sum_{|l| > N} lambda_l z_l``."""
    limit = max_support(spec)
    if limit is not None and N >= limit:
        return 0.0
    return tail_bound(spec, N) * law.tail_sup(N)


def minimal_truncation(spec: ActivitySpec, law: BoundaryLaw, tol: float) -> int:
    """Smallest ``N >= 1`` whose certified truncation tail is at most ``tol``."""
    limit = max_support(spec)
    if limit is not None:
        hi = max(limit, 1)
    else:
        hi = 1
        while truncation_tail(spec, law, hi) > tol:
            hi *= 2
            if hi > _MAX_N:
                raise TruncationError(f"no truncation below 2^40 reaches tail {tol:g}", hi)
    lo = hi // 2
    if truncation_tail(spec, law, lo) <= tol or lo < 1:
        lo = 0
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if truncation_tail(spec, law, mid) <= tol:
            hi = mid
        else:
            lo = mid
    return max(hi, 1)


def _check_N(spec, law, N, tol):
    if N is None:
        return minimal_truncation(spec, law, tol)
    N = int(N)
    if N < 1:
        raise DomainError("truncation level N must be at least 1")
    if truncation_tail(spec, law, N) > tol:
        need = minimal_truncation(spec, law, tol)
        raise TruncationError(
            f"truncation N={N} leaves tail mass above {tol:g}; need N >= {need}", need)
    return N


def _single_step(spec: ActivitySpec, law: BoundaryLaw, N: int) -> TransitionKernel:
    js = np.concatenate([np.arange(-N, 0), np.arange(1, N + 1)])
    w = lambda_values(spec, js) * law.values(js)
    S_N = math.fsum(w)
    row0 = np.empty(2 * N + 1)
    row0[:N] = w[:N]
    row0[N] = 1.0
    row0[N + 1:] = w[N:]
    row0 /= 1.0 + S_N
    other = np.zeros(2 * N + 1)
    other[N] = 1.0
    return TransitionKernel(N, row0, other, "ti", truncation_tail(spec, law, N))


def build_ti_kernel(spec: ActivitySpec, law: BoundaryLaw, N: int | None = None,
                    tol: float = 1e-12) -> TransitionKernel:
    """Single-step kernel of the chain for ``law``, truncated at ``[-N, N]``.

    Row 0 is ``(1, lambda_j z_j) / (1 + S_N)`` with ``S_N`` the truncated sum;
    every other row jumps to 0. ``N=None`` picks the smallest admissible
    truncation; an explicit ``N`` whose tail exceeds ``tol`` raises
    :class:`TruncationError` carrying the required level.
    """
    return _single_step(spec, law, _check_N(spec, law, N, tol))


def build_periodic_kernel(spec: ActivitySpec, pair: PeriodicLawPair, N: int | None = None,
                          tol: float = 1e-12) -> TransitionKernel:
    """Two-step kernel ``P_even @ P_odd`` of a two-periodic chain.

    Rows ``i != 0`` equal row 0 of the odd-law kernel; row 0 has
    ``c_0i = lambda_i z~_i / ((1 + S)(1 + S~))`` off the diagonal.
    """
    n_even = _check_N(spec, pair.law_even, N, tol)
    n_odd = _check_N(spec, pair.law_odd, N, tol)
    n = max(n_even, n_odd)
    first = _single_step(spec, pair.law_even, n)
    second = _single_step(spec, pair.law_odd, n)
    return first.compose(second, kind="periodic")


def _weighted_S(spec, law, tol):
    return sum_weighted(spec, law, tol).value


def stationary_ti(spec: ActivitySpec, law: BoundaryLaw, tol: float = 1e-12) -> StationaryDist:
    """Stationary vector of the single-step chain: ``x_0 = (1+S)/(1+2S)``."""
    S = _weighted_S(spec, law, tol)
    return StationaryDist(spec, law, (1.0 + S) / (1.0 + 2.0 * S), 1.0 + 2.0 * S, S)


def stationary_periodic(spec: ActivitySpec, pair: PeriodicLawPair,
                        tol: float = 1e-12) -> StationaryDist:
    """Stationary vector of ``P_even @ P_odd``: ``x_0 = (1+S)/(1+S+S~)``.

    ``S`` sums ``lambda z`` over the even law and ``S~`` over the odd law;
    the nonzero entries are ``lambda_j z~_j / (1 + S + S~)``.
    """
    S = _weighted_S(spec, pair.law_even, tol)
    S_t = _weighted_S(spec, pair.law_odd, tol)
    D = 1.0 + S + S_t
    return StationaryDist(spec, pair.law_odd, (1.0 + S) / D, D, S, S_t)


def stationarity_residual(X, P: TransitionKernel) -> float:
    """``max_j |(x P)_j - x_j|`` over the kernel's index set.

    ``X`` is a :class:`StationaryDist` (restricted to ``[-N, N]`` and
    renormalised) or a plain probability vector of matching length.
    """
    x = X.restricted(P.N) if isinstance(X, StationaryDist) else np.asarray(X, dtype=np.float64)
    return float(np.max(np.abs(P.left_apply(x) - x)))


def to_csv(indices, values, fh=None) -> str:
    """Write ``index,value`` rows; returns the text when ``fh`` is None."""
    buf = fh if fh is not None else io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["index", "value"])
    for j, v in zip(indices, values):
        w.writerow([int(j), repr(float(v))])
    return buf.getvalue() if fh is None else ""

