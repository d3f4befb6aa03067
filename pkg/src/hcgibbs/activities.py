"""Activity sequences on the nonzero spins and their certified sums.

An activity spec describes the positive weights ``lambda_j`` attached to the
occupied spin values ``j != 0``. The vacant spin ``0`` always has activity 1;
it is not part of an activity spec.

Every sum returned here comes with a certified upper bound on the omitted
tail mass. Closed forms are used where they exist, otherwise partial sums
are extended until an analytic tail bound falls below the tolerance.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum
from numbers import Real
from typing import Callable, Mapping

import numpy as np
from scipy.special import gammaln

from .errors import DivergenceError, DomainError

__all__ = [
    "Kind",
    "ActivitySpec",
    "SeriesSum",
    "lambda_at",
    "lambda_values",
    "tail_bound",
    "tail_sup",
    "max_support",
    "sum_activities",
    "sum_weighted",
]

DIVERGENCE_CAP = 1e12
_MAX_TERMS = 1 << 24
_FIRST_BLOCK = 64


def _num(v):
    return None if v is None else float(v)


class Kind(str, Enum):
    GEOMETRIC = "geometric"
    POISSON = "poisson"
    TELESCOPING = "telescoping"
    EXPLICIT = "explicit"


_FIELDS = {
    Kind.GEOMETRIC: {"alpha", "beta", "scale"},
    Kind.POISSON: {"rate_pos", "rate_neg", "scale"},
    Kind.TELESCOPING: {"scale"},
    Kind.EXPLICIT: {"values", "divergent"},
}


@dataclass(frozen=True)
class ActivitySpec:
    """Description of the activity sequence ``{lambda_j : j != 0}``.

    Use the classmethod constructors rather than filling fields by hand:

    >>> ActivitySpec.telescoping(0.25).kind
    <Kind.TELESCOPING: 'telescoping'>

    Parameters per kind
    -------------------
    geometric
        ``lambda_j = scale * alpha * (1 - alpha)**j`` and
        ``lambda_{-j} = scale * beta * (1 - beta)**j`` for ``j >= 1``.
    poisson
        ``lambda_{+-j} = scale * rate**j * exp(-rate) / j!`` with
        ``rate_pos`` on the positive side and ``rate_neg`` on the negative.
    telescoping
        ``lambda_j = 9 scale / ((4j-3)(4j-1))`` for ``j >= 1`` and
        ``lambda_j = 9 scale / ((4j-1)(4j+1))`` for ``j <= -1``.
    explicit
        A finite map ``j -> lambda_j``; unlisted indices have activity 0.
        ``divergent=True`` marks a user sequence whose total is infinite.
    """

    kind: Kind
    alpha: float | None = None
    beta: float | None = None
    rate_pos: float | None = None
    rate_neg: float | None = None
    scale: float = 1.0
    values: tuple[tuple[int, float], ...] = ()
    divergent: bool = False
    _lookup: dict = field(default=None, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "kind", Kind(self.kind))
        if not (math.isfinite(self.scale) and self.scale > 0):
            raise DomainError(f"scale must be a positive finite number, got {self.scale!r}")
        if self.kind is Kind.GEOMETRIC:
            for name in ("alpha", "beta"):
                v = getattr(self, name)
                if v is None or not 0.0 < v < 1.0:
                    raise DomainError(f"geometric {name} must lie in (0, 1), got {v!r}")
        elif self.kind is Kind.POISSON:
            for name in ("rate_pos", "rate_neg"):
                v = getattr(self, name)
                if v is None or not (math.isfinite(v) and v > 0):
                    raise DomainError(f"poisson {name} must be positive, got {v!r}")
        elif self.kind is Kind.EXPLICIT:
            lookup = {}
            for j, v in self.values:
                if j == 0:
                    raise DomainError("explicit activities are indexed by nonzero spins only")
                if j in lookup:
                    raise DomainError(f"duplicate explicit index {j}")
                if not (math.isfinite(v) and v > 0):
                    raise DomainError(f"explicit activity at {j} must be positive, got {v!r}")
                lookup[j] = float(v)
            object.__setattr__(self, "_lookup", lookup)
        if self.divergent and self.kind is not Kind.EXPLICIT:
            raise DomainError("only explicit specs may be flagged divergent")

    # -- constructors -------------------------------------------------------

    @classmethod
    def geometric(cls, alpha, beta, scale=1.0):
        return cls(Kind.GEOMETRIC, alpha=_num(alpha), beta=_num(beta), scale=float(scale))

    @classmethod
    def poisson(cls, rate_pos, rate_neg, scale=1.0):
        return cls(Kind.POISSON, rate_pos=_num(rate_pos), rate_neg=_num(rate_neg),
                   scale=float(scale))

    @classmethod
    def telescoping(cls, scale=1.0):
        return cls(Kind.TELESCOPING, scale=float(scale))

    @classmethod
    def explicit(cls, values: Mapping[int, float], divergent=False):
        items = tuple(sorted((int(j), float(v)) for j, v in values.items()))
        return cls(Kind.EXPLICIT, values=items, divergent=bool(divergent))

    @classmethod
    def from_dict(cls, data: Mapping) -> "ActivitySpec":
        """Build a spec from its JSON object form, rejecting unknown fields."""
        if "kind" not in data:
            raise DomainError("activity spec needs a 'kind' field")
        try:
            kind = Kind(data["kind"])
        except ValueError:
            raise DomainError(f"unknown activity kind {data['kind']!r}") from None
        extra = set(data) - _FIELDS[kind] - {"kind"}
        if extra:
            raise DomainError(f"unknown field(s) for {kind.value} spec: {sorted(extra)}")
        args = {k: v for k, v in data.items() if k != "kind"}
        for name, v in args.items():
            if name in ("values", "divergent"):
                continue
            if isinstance(v, bool) or not isinstance(v, Real):
                raise DomainError(f"field {name!r} must be a number, got {v!r}")
        if kind is Kind.EXPLICIT:
            raw = args.get("values")
            if not isinstance(raw, Mapping):
                raise DomainError("explicit spec needs a 'values' object")
            try:
                values = {int(j): float(v) for j, v in raw.items()}
            except (TypeError, ValueError) as exc:
                raise DomainError(f"bad explicit values: {exc}") from None
            divergent = args.get("divergent", False)
            if not isinstance(divergent, bool):
                raise DomainError("'divergent' must be true or false")
            return cls.explicit(values, divergent=divergent)
        if kind is Kind.GEOMETRIC:
            return cls.geometric(args.get("alpha"), args.get("beta"), args.get("scale", 1.0))
        if kind is Kind.POISSON:
            return cls.poisson(args.get("rate_pos"), args.get("rate_neg"), args.get("scale", 1.0))
        return cls.telescoping(args.get("scale", 1.0))

    @classmethod
    def from_json(cls, text: str) -> "ActivitySpec":
        """Parse the JSON object form; syntax errors name their line and column."""
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise DomainError(f"{exc.lineno}:{exc.colno}: {exc.msg}") from None
        if not isinstance(data, Mapping):
            raise DomainError("1:1: activity spec must be a JSON object")
        return cls.from_dict(data)

    def to_dict(self) -> dict:
        if self.kind is Kind.GEOMETRIC:
            return {"kind": "geometric", "alpha": self.alpha, "beta": self.beta,
                    "scale": self.scale}
        if self.kind is Kind.POISSON:
            return {"kind": "poisson", "rate_pos": self.rate_pos, "rate_neg": self.rate_neg,
                    "scale": self.scale}
        if self.kind is Kind.TELESCOPING:
            return {"kind": "telescoping", "scale": self.scale}
        out = {"kind": "explicit", "values": {str(j): v for j, v in self.values}}
        if self.divergent:
            out["divergent"] = True
        return out

    @property
    def finite_support(self) -> bool:
        """True when some ``lambda_j`` vanish (explicit specs only)."""
        return self.kind is Kind.EXPLICIT

    def scaled(self, t: float) -> "ActivitySpec":
        """Same sequence with every activity multiplied by ``t``."""
        if self.kind is Kind.EXPLICIT:
            return ActivitySpec.explicit({j: v * t for j, v in self.values}, self.divergent)
        return ActivitySpec(self.kind, alpha=self.alpha, beta=self.beta,
                            rate_pos=self.rate_pos, rate_neg=self.rate_neg,
                            scale=self.scale * t)


@dataclass(frozen=True)
class SeriesSum:
    """A nonnegative series value with a certified bound on the omitted tail.

    The true sum lies in ``[value, value + tail_bound]`` up to floating
    rounding. ``certified`` is False only when the caller supplied weights
    without a bound on their tail.
    """

    value: float
    tail_bound: float
    terms_used: int
    certified: bool = True

    @property
    def upper(self) -> float:
        return self.value + self.tail_bound


# -- term evaluation --------------------------------------------------------

def _side_values(spec: ActivitySpec, n: np.ndarray, positive: bool) -> np.ndarray:
    """Activities at ``+n`` (or ``-n``) for an array of integers ``n >= 1``."""
    n = n.astype(np.float64)
    c = spec.scale
    if spec.kind is Kind.GEOMETRIC:
        p = spec.alpha if positive else spec.beta
        return c * p * np.exp(n * math.log1p(-p))
    if spec.kind is Kind.POISSON:
        r = spec.rate_pos if positive else spec.rate_neg
        return c * np.exp(n * math.log(r) - r - gammaln(n + 1.0))
    if spec.kind is Kind.TELESCOPING:
        if positive:
            return 9.0 * c / ((4 * n - 3) * (4 * n - 1))
        return 9.0 * c / ((4 * n + 1) * (4 * n - 1))
    sign = 1 if positive else -1
    lookup = spec._lookup
    return np.array([lookup.get(sign * int(m), 0.0) for m in n], dtype=np.float64)


def lambda_values(spec: ActivitySpec, js) -> np.ndarray:
    """Vectorised :func:`lambda_at` over an integer array of nonzero spins."""
    js = np.asarray(js, dtype=np.int64)
    if np.any(js == 0):
        raise DomainError("lambda_0 is fixed to 1 by normalisation and is not part of an activity spec")
    out = np.empty(js.shape, dtype=np.float64)
    pos = js > 0
    out[pos] = _side_values(spec, js[pos], True)
    out[~pos] = _side_values(spec, -js[~pos], False)
    return out


def lambda_at(spec: ActivitySpec, j: int) -> float:
    """Activity of the nonzero spin ``j``."""
    j = int(j)
    if j == 0:
        raise DomainError("lambda_0 is fixed to 1 by normalisation and is not part of an activity spec")
    if spec.kind is Kind.EXPLICIT:
        return spec._lookup.get(j, 0.0)
    if spec.kind is Kind.TELESCOPING:
        # rational form keeps exact small cases exact, e.g. 9/(4*3*1) = 3/4
        c = spec.scale
        return 9.0 * c / ((4 * j - 3) * (4 * j - 1)) if j > 0 else 9.0 * c / ((4 * j - 1) * (4 * j + 1))
    return float(_side_values(spec, np.array([abs(j)]), j > 0)[0])


def max_support(spec: ActivitySpec) -> int | None:
    """Largest ``|j|`` with nonzero activity, or None for infinite support."""
    if spec.kind is Kind.EXPLICIT:
        return max((abs(j) for j, _ in spec.values), default=0)
    return None


# -- tails --------------------------------------------------------------------

def _poisson_side_tail(c: float, n: int, r: float) -> float:
    first = c * math.exp((n + 1) * math.log(r) - r - math.lgamma(n + 2))
    if n + 2 > r:
        # lambda_{j+1}/lambda_j = r/(j+1) <= r/(n+2) for every j > n
        return first / (1.0 - r / (n + 2))
    total = -c * math.expm1(-r)
    head = math.fsum(c * math.exp(m * math.log(r) - r - math.lgamma(m + 1)) for m in range(1, n + 1))
    return max(total - head, first)


def tail_bound(spec: ActivitySpec, n: int) -> float:
    """Certified upper bound on ``sum_{|j| > n} lambda_j``."""
    if n < 0:
        raise DomainError("n must be nonnegative")
    c = spec.scale
    if spec.kind is Kind.GEOMETRIC:
        return c * ((1 - spec.alpha) ** (n + 1) + (1 - spec.beta) ** (n + 1))
    if spec.kind is Kind.POISSON:
        return _poisson_side_tail(c, n, spec.rate_pos) + _poisson_side_tail(c, n, spec.rate_neg)
    if spec.kind is Kind.TELESCOPING:
        if n == 0:
            return 4.5 * c
        # each term is below (1/16)(1/(m-1) - 1/m), so each side's tail is below 1/(16 n)
        return 2 * 9.0 * c / (16.0 * n)
    return math.fsum(v for j, v in spec.values if abs(j) > n)


def tail_sup(spec: ActivitySpec, n: int) -> float:
    """``sup_{|j| > n} lambda_j`` (0 when the tail is empty)."""
    c = spec.scale
    if spec.kind is Kind.GEOMETRIC:
        return c * max(spec.alpha * (1 - spec.alpha) ** (n + 1),
                       spec.beta * (1 - spec.beta) ** (n + 1))
    if spec.kind is Kind.POISSON:
        out = 0.0
        for r in (spec.rate_pos, spec.rate_neg):
            m = max(n + 1, int(math.floor(r)))
            out = max(out, c * math.exp(m * math.log(r) - r - math.lgamma(m + 1)))
        return out
    if spec.kind is Kind.TELESCOPING:
        m = n + 1
        return 9.0 * c / min((4 * m - 3) * (4 * m - 1), (4 * m - 1) * (4 * m + 1))
    return max((v for j, v in spec.values if abs(j) > n), default=0.0)


# -- sums -------------------------------------------------------------------

def sum_activities(spec: ActivitySpec, tol: float = 1e-12) -> SeriesSum:
    """Total activity ``Lambda = sum_{j != 0} lambda_j``.

    All built-in kinds have closed forms, so ``tail_bound`` is 0. A spec
    flagged divergent returns an infinite value instead of raising; callers
    such as the phase classifier interpret that as "no measure".
    """
    if tol <= 0:
        raise DomainError("tol must be positive")
    c = spec.scale
    if spec.kind is Kind.GEOMETRIC:
        value = c * (1 - spec.alpha) + c * (1 - spec.beta)
    elif spec.kind is Kind.POISSON:
        value = -c * math.expm1(-spec.rate_pos) - c * math.expm1(-spec.rate_neg)
    elif spec.kind is Kind.TELESCOPING:
        # sum over both sides interleaves to (9c/2) * sum 1/((2m-1)(2m+1)) = 9c/2
        value = 4.5 * c
    else:
        if spec.divergent:
            return SeriesSum(math.inf, math.inf, len(spec.values))
        return SeriesSum(math.fsum(v for _, v in spec.values), 0.0, len(spec.values))
    return SeriesSum(value, 0.0, 0)


Weights = Callable[[np.ndarray], np.ndarray]


def _as_weight_fn(weights):
    if isinstance(weights, Real):
        w = float(weights)
        return (lambda js: np.full(js.shape, w)), (lambda n: abs(w))
    if isinstance(weights, Mapping):
        table = {int(j): float(v) for j, v in weights.items()}

        def fn(js):
            return np.array([table.get(int(j), 0.0) for j in js], dtype=np.float64)

        def sup(n):
            return max((abs(v) for j, v in table.items() if abs(j) > n), default=0.0)

        return fn, sup
    if hasattr(weights, "values") and hasattr(weights, "tail_sup"):
        return weights.values, weights.tail_sup
    return weights, None


def sum_weighted(spec: ActivitySpec, weights, tol: float = 1e-12, *,
                 weight_sup: Callable[[int], float] | None = None) -> SeriesSum:
    """Compute ``sum_{j != 0} lambda_j * w_j`` with a tail bound below ``tol``.

    ``weights`` may be a constant, a finite mapping ``j -> w_j`` (missing
    indices weigh 0), a boundary law, or a vectorised callable on integer
    arrays. The tail is bounded by ``tail_bound(spec, n) * sup_{|j|>n} |w_j|``.
    For a bare callable pass ``weight_sup``; without it the supremum is
    estimated from the last block and the result is marked uncertified.
    """
    if tol <= 0:
        raise DomainError("tol must be positive")
    if spec.divergent:
        raise DivergenceError("activity sequence is flagged divergent")
    if isinstance(weights, Real):
        # constant weights scale the closed-form total
        w = abs(float(weights))
        total = sum_activities(spec, tol / w if w else tol)
        return SeriesSum(float(weights) * total.value, w * total.tail_bound, total.terms_used)
    fn, sup = _as_weight_fn(weights)
    certified = True
    if weight_sup is not None:
        sup = weight_sup

    limit = max_support(spec)
    if limit is not None:
        if limit == 0:
            return SeriesSum(0.0, 0.0, 0)
        js = np.concatenate([np.arange(1, limit + 1), -np.arange(1, limit + 1)])
        terms = lambda_values(spec, js) * np.asarray(fn(js), dtype=np.float64)
        return SeriesSum(math.fsum(terms), 0.0, int(js.size))

    parts = []
    lo, hi = 0, _FIRST_BLOCK
    while True:
        block = np.arange(lo + 1, hi + 1)
        js = np.concatenate([block, -block])
        terms = lambda_values(spec, js) * np.asarray(fn(js), dtype=np.float64)
        parts.append(math.fsum(terms))
        value = math.fsum(parts)
        if sup is None:
            certified = False
            w_tail = float(np.max(np.abs(fn(js)))) if js.size else 0.0
        else:
            w_tail = sup(hi)
        bound = tail_bound(spec, hi) * w_tail
        if not math.isfinite(value) or abs(value) > DIVERGENCE_CAP:
            raise DivergenceError(f"weighted partial sum reached {value:.3e} after {2 * hi} terms")
        if bound <= tol:
            return SeriesSum(value, bound, 2 * hi, certified)
        if hi >= _MAX_TERMS:
            raise DivergenceError(
                f"tail bound {bound:.3e} did not close below {tol:.1e} within {2 * hi} terms")
        lo, hi = hi, 2 * hi
