"""Sampling admissible configurations on a finite Cayley-tree ball.

Vertices are addressed by ``(level, index)``. The root ``(0, 0)`` has
``k + 1`` children ``(1, 0..k)``; every other vertex ``(m, i)`` has the ``k``
children ``(m + 1, i*k .. i*k + k - 1)``. Level parity equals word-length
parity, so even levels carry the even law of a two-periodic measure.

A child of an occupied vertex is vacant. A child of a vacant vertex draws
its spin from row 0 of the single-step kernel built from the law of the
child's own parity. The root is drawn from the marginal at even vertices, so
every vertex of parity ``p`` has the marginal returned by
:func:`parity_marginal`.

Randomness is counter based: vertex ``(m, i)`` of a sample with seed ``s``
always consumes the ``i``-th uniform of the Philox stream keyed by
``(s, m)``, whatever order or thread the levels are produced in.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .activities import ActivitySpec
from .boundary import BoundaryLaw, PeriodicLawPair
from .chain import StationaryDist, build_ti_kernel, stationary_periodic, stationary_ti
from .errors import DomainError

__all__ = [
    "TreeBall",
    "TreeSample",
    "Measure",
    "ti_measure",
    "periodic_measure",
    "parity_marginal",
    "TreeSampler",
    "sample_tree",
    "sample_trees",
    "SpinCounts",
    "empirical_marginals",
    "admissibility_check",
    "sample_to_csv",
    "stats_to_json",
    "binomial_sigma",
    "effective_count",
]


@dataclass(frozen=True)
class TreeBall:
    """The ball ``V_n`` of radius ``depth`` in the Cayley tree of order ``k``."""

    k: int
    depth: int

    def __post_init__(self):
        if self.k < 1 or self.depth < 0:
            raise DomainError("need k >= 1 and depth >= 0")

    def level_size(self, m: int) -> int:
        return 1 if m == 0 else (self.k + 1) * self.k ** (m - 1)

    @property
    def n_vertices(self) -> int:
        return sum(self.level_size(m) for m in range(self.depth + 1))

    def parents(self, m: int) -> np.ndarray:
        """Parent index (in level ``m - 1``) of every vertex of level ``m >= 1``."""
        if m == 1:
            return np.zeros(self.k + 1, dtype=np.int64)
        return np.arange(self.level_size(m), dtype=np.int64) // self.k

    def children(self, m: int, i: int) -> range:
        if m >= self.depth:
            return range(0)
        if m == 0:
            return range(self.k + 1)
        return range(i * self.k, (i + 1) * self.k)


@dataclass(frozen=True)
class Measure:
    """Which law each parity uses: ``mu0`` (TI), ``mu1`` or ``mu2`` (two-periodic)."""

    tag: str
    spec: ActivitySpec
    law_even: BoundaryLaw
    law_odd: BoundaryLaw

    def law(self, parity: int) -> BoundaryLaw:
        return self.law_even if parity % 2 == 0 else self.law_odd


def ti_measure(spec: ActivitySpec, law: BoundaryLaw) -> Measure:
    return Measure("mu0", spec, law, law)


def periodic_measure(spec: ActivitySpec, pair: PeriodicLawPair, branch: int = 1) -> Measure:
    """``mu1`` keeps ``pair`` as is; ``mu2`` swaps the even and odd laws."""
    if branch == 1:
        return Measure("mu1", spec, pair.law_even, pair.law_odd)
    if branch == 2:
        return Measure("mu2", spec, pair.law_odd, pair.law_even)
    raise DomainError(f"branch must be 1 or 2, got {branch!r}")


def parity_marginal(measure: Measure, parity: int, tol: float = 1e-12) -> StationaryDist:
    """Single-vertex law at vertices of the given parity.

    Nonzero spins carry ``lambda_j z_j`` of the vertex's own parity law. This
    is the stationary vector of the two-step kernel that starts with a step
    into the opposite parity, i.e. ``stationary_periodic`` of the pair with
    the opposite parity's law in the even slot.
    """
    own, other = measure.law(parity), measure.law(parity + 1)
    if own is other:
        return stationary_ti(measure.spec, own, tol)
    return stationary_periodic(measure.spec, PeriodicLawPair(other, own, own.A, other.A), tol)


@dataclass(frozen=True)
class TreeSample:
    k: int
    depth: int
    spins: tuple[np.ndarray, ...]
    measure: str
    seed: int

    def spin(self, level: int, index: int) -> int:
        return int(self.spins[level][index])

    def parity_spins(self, parity: int | None) -> np.ndarray:
        levels = [s for m, s in enumerate(self.spins) if parity is None or m % 2 == parity % 2]
        return np.concatenate(levels) if levels else np.empty(0, dtype=np.int64)


def _spin_order(N: int) -> np.ndarray:
    """0, 1, -1, 2, -2, ..., N, -N."""
    out = np.zeros(2 * N + 1, dtype=np.int64)
    out[1::2] = np.arange(1, N + 1)
    out[2::2] = -np.arange(1, N + 1)
    return out


class TreeSampler:
    """Precomputed inverse-CDF tables for one measure on one tree ball."""

    def __init__(self, measure: Measure, k: int, depth: int, tol: float = 1e-12):
        self.measure = measure
        self.ball = TreeBall(int(k), int(depth))
        spec = measure.spec
        kernels = {p: build_ti_kernel(spec, measure.law(p), None, tol) for p in (0, 1)}
        N = max(K.N for K in kernels.values())
        kernels = {p: build_ti_kernel(spec, measure.law(p), N, tol) for p in (0, 1)}
        self.N = N
        self.order = _spin_order(N)
        pos = self.order + N
        self.child_cdf = {p: self._cdf(kernels[p].row0[pos]) for p in (0, 1)}
        self.root_dist = parity_marginal(measure, 0, tol)
        self.root_cdf = self._cdf(self.root_dist.restricted(N)[pos])

    @staticmethod
    def _cdf(p):
        c = np.cumsum(p)
        return c / c[-1]

    def _draw(self, cdf, u):
        idx = np.searchsorted(cdf, u, side="right")
        return self.order[np.minimum(idx, cdf.size - 1)]

    @staticmethod
    def uniforms(seed: int, level: int, size: int) -> np.ndarray:
        ss = np.random.SeedSequence([int(seed), level])
        return np.random.Generator(np.random.Philox(ss)).random(size)

    def sample(self, seed: int) -> TreeSample:
        seed = _check_seed(seed)
        ball = self.ball
        spins = [self._draw(self.root_cdf, self.uniforms(seed, 0, 1))]
        for m in range(1, ball.depth + 1):
            parent = spins[-1][ball.parents(m)]
            u = self.uniforms(seed, m, ball.level_size(m))
            drawn = self._draw(self.child_cdf[m % 2], u)
            spins.append(np.where(parent == 0, drawn, 0))
        return TreeSample(ball.k, ball.depth, tuple(spins), self.measure.tag, int(seed))

    def sample_many(self, n: int, seed: int, threads: int | None = None) -> list[TreeSample]:
        seeds = np.random.SeedSequence(_check_seed(seed)).generate_state(n, dtype=np.uint64)
        threads = threads or _thread_cap()
        if threads <= 1 or n < 64:
            return [self.sample(int(s)) for s in seeds]
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(self.sample, (int(s) for s in seeds)))


def _check_seed(seed) -> int:
    seed = int(seed)
    if not 0 <= seed < 2 ** 64:
        raise DomainError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return seed


def _thread_cap() -> int:
    raw = os.environ.get("HCGIBBS_THREADS")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            raise DomainError(f"HCGIBBS_THREADS must be an integer, got {raw!r}") from None
    return 1


def sample_tree(spec: ActivitySpec, measure: Measure, k: int, depth: int, seed: int,
                tol: float = 1e-12) -> TreeSample:
    if measure.spec != spec:
        raise DomainError("measure was built for a different activity spec")
    return TreeSampler(measure, k, depth, tol).sample(seed)


def sample_trees(spec: ActivitySpec, measure: Measure, k: int, depth: int, n: int, seed: int,
                 tol: float = 1e-12, threads: int | None = None) -> list[TreeSample]:
    if measure.spec != spec:
        raise DomainError("measure was built for a different activity spec")
    return TreeSampler(measure, k, depth, tol).sample_many(n, seed, threads)


def _parity_code(parity) -> int | None:
    if parity in (None, "all"):
        return None
    if parity in ("even", 0):
        return 0
    if parity in ("odd", 1):
        return 1
    raise DomainError(f"parity must be 'even', 'odd' or 'all', got {parity!r}")


@dataclass(frozen=True)
class SpinCounts:
    """Occupation counts for one measure tag and parity; merge with ``+``.

    Counts from disjoint batches of samples add up to the counts of the
    combined batch, so workers can accumulate independently.
    """

    tag: tuple
    parity: int | None
    counts: tuple[tuple[int, int], ...] = ()

    @classmethod
    def from_sample(cls, sample: TreeSample, parity=None) -> "SpinCounts":
        code = _parity_code(parity)
        values, counts = np.unique(sample.parity_spins(code), return_counts=True)
        return cls((sample.measure, sample.k), code,
                   tuple(zip(values.tolist(), counts.tolist())))

    @property
    def total(self) -> int:
        return sum(c for _, c in self.counts)

    def __add__(self, other: "SpinCounts") -> "SpinCounts":
        if not isinstance(other, SpinCounts):
            return NotImplemented
        if (self.tag, self.parity) != (other.tag, other.parity):
            raise DomainError(f"cannot merge counts for {self.tag}/{self.parity} "
                              f"with {other.tag}/{other.parity}")
        merged = Counter(dict(self.counts))
        merged.update(dict(other.counts))
        return SpinCounts(self.tag, self.parity, tuple(sorted(merged.items())))

    def frequencies(self) -> dict[int, float]:
        n = self.total
        if n == 0:
            raise DomainError("no vertices of the requested parity")
        return {j: c / n for j, c in sorted(self.counts)}


def empirical_marginals(samples, parity=None) -> dict[int, float]:
    """Pooled spin frequencies over all vertices of the requested parity."""
    samples = list(samples)
    if not samples:
        raise DomainError("need at least one sample")
    tags = {(s.measure, s.k) for s in samples}
    if len(tags) > 1:
        raise DomainError(f"samples mix measures or tree orders: {sorted(tags)}")
    total = sum((SpinCounts.from_sample(s, parity) for s in samples[1:]),
                SpinCounts.from_sample(samples[0], parity))
    return total.frequencies()


def admissibility_check(sample: TreeSample) -> bool:
    """True iff no edge joins two occupied vertices."""
    ball = TreeBall(sample.k, sample.depth)
    for m in range(1, sample.depth + 1):
        parent = sample.spins[m - 1][ball.parents(m)]
        if np.any((parent != 0) & (sample.spins[m] != 0)):
            return False
    return True


def sample_to_csv(sample: TreeSample, fh=None) -> str:
    buf = fh if fh is not None else io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["level", "index", "spin"])
    for m, level in enumerate(sample.spins):
        for i, s in enumerate(level.tolist()):
            w.writerow([m, i, s])
    return buf.getvalue() if fh is None else ""


def stats_to_json(freq: dict[int, float], parity: str) -> str:
    return json.dumps({"parity": parity, "freq": {str(j): f for j, f in sorted(freq.items())}})


def binomial_sigma(p: float, n: int) -> float:
    return math.sqrt(p * (1.0 - p) / n)


def effective_count(samples, parity=None, spin: int = 0) -> float:
    """Effective number of independent vertices behind a pooled frequency.

    Vertices of one tree are correlated, so the pooled count overstates the
    information. Each tree is treated as a cluster and the variance of the
    pooled frequency is estimated from the spread of per-tree counts; the
    result is the binomial count with that variance,
    ``M_eff = p (1 - p) / Var(p_hat)``.
    """
    code = _parity_code(parity)
    per = [s.parity_spins(code) for s in samples]
    m = np.array([v.size for v in per], dtype=np.float64)
    y = np.array([np.count_nonzero(v == spin) for v in per], dtype=np.float64)
    n = m.size
    if n < 2:
        raise DomainError("need at least two samples to estimate the effective count")
    p = y.sum() / m.sum()
    var = np.sum((y - p * m) ** 2) / (n * (n - 1) * m.mean() ** 2)
    if var == 0.0:
        return float(m.sum())
    return float(p * (1.0 - p) / var)
