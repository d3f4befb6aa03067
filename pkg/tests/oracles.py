"""Independent reference computations for the test suite.

Nothing here calls the package's numerics. Activity terms are re-derived
from their defining formulas in mpmath, roots are found with mpmath at 50
digits, and stationary vectors come from a dense linear solve.
"""

from __future__ import annotations

import math

import mpmath as mp
import numpy as np

mp.mp.dps = 50


def lam(params: dict, j: int):
    """Activity ``lambda_j`` straight from the kind's formula, as an mpf."""
    kind = params["kind"]
    if j == 0:
        raise ValueError("j = 0")
    n = abs(j)
    if kind == "geometric":
        c = mp.mpf(params.get("scale", 1.0))
        a = mp.mpf(params["alpha"] if j > 0 else params["beta"])
        return c * a * (1 - a) ** n
    if kind == "poisson":
        c = mp.mpf(params.get("scale", 1.0))
        r = mp.mpf(params["rate_pos"] if j > 0 else params["rate_neg"])
        return c * r ** n * mp.exp(-r) / mp.factorial(n)
    if kind == "telescoping":
        c = mp.mpf(params.get("scale", 1.0))
        if j > 0:
            return c * 9 / ((4 * j - 3) * (4 * j - 1))
        return c * 9 / ((4 * j - 1) * (4 * j + 1))
    if kind == "explicit":
        return mp.mpf(params["values"].get(str(j), 0.0))
    raise ValueError(kind)


def _nsum_sides(term):
    if term is None:
        return mp.mpf(0)
    pos = mp.nsum(lambda n: term(int(n)), [1, mp.inf])
    neg = mp.nsum(lambda n: term(-int(n)), [1, mp.inf])
    return pos + neg


def total(params: dict):
    """``sum_{j != 0} lambda_j`` by mpmath series acceleration."""
    if params["kind"] == "explicit":
        return mp.fsum(mp.mpf(v) for v in params["values"].values())
    return _nsum_sides(lambda j: lam(params, j))


def tail(params: dict, n: int):
    """``sum_{|j| > n} lambda_j``."""
    full = total(params)
    head = mp.fsum(lam(params, j) + lam(params, -j) for j in range(1, n + 1))
    return full - head


def weighted_total(params: dict, A, k: int):
    """``S = sum_j lambda_j z_j`` with ``z_j = lambda_j / (1 + A)**k``."""
    D = (1 + mp.mpf(A)) ** k
    if params["kind"] == "explicit":
        return mp.fsum(mp.mpf(v) ** 2 for v in params["values"].values()) / D
    return _nsum_sides(lambda j: lam(params, j) ** 2) / D


def brute_partial_sum(fn, n_terms: int = 10 ** 6) -> float:
    """Direct ``fsum`` of ``fn(j)`` over ``0 < |j| <= n_terms`` (vectorised ``fn``)."""
    j = np.arange(1, n_terms + 1, dtype=np.float64)
    return math.fsum(np.concatenate([fn(j), fn(-j)]))


def telescoping_np(c: float):
    """Vectorised telescoping activities for :func:`brute_partial_sum`."""
    def f(j):
        out = np.empty_like(j)
        pos = j > 0
        jp, jn = j[pos], j[~pos]
        out[pos] = c * 9.0 / ((4 * jp - 3) * (4 * jp - 1))
        out[~pos] = c * 9.0 / ((4 * jn - 1) * (4 * jn + 1))
        return out
    return f


def geometric_np(alpha: float, beta: float, c: float = 1.0):
    def f(j):
        a = np.where(j > 0, alpha, beta)
        return c * a * (1 - a) ** np.abs(j)
    return f


def poisson_np(rp: float, rn: float, c: float = 1.0):
    from math import lgamma

    def f(j):
        r = np.where(j > 0, rp, rn)
        n = np.abs(j)
        lg = np.array([lgamma(x + 1) for x in n]) if n.size < 10 ** 5 else _lgamma_vec(n)
        return c * np.exp(n * np.log(r) - r - lg)
    return f


def _lgamma_vec(n):
    # Stirling with enough terms for n >= 1 to float precision; small n exact
    out = np.empty_like(n)
    small = n < 20
    out[small] = [math.lgamma(x + 1) for x in n[small]]
    m = n[~small] + 1
    out[~small] = ((m - 0.5) * np.log(m) - m + 0.5 * np.log(2 * np.pi)
                   + 1 / (12 * m) - 1 / (360 * m ** 3) + 1 / (1260 * m ** 5))
    return out


def ti_root(k: int, Lambda) -> float:
    """Positive root of ``A (1 + A)**k = Lambda`` at 50 digits."""
    L = mp.mpf(Lambda)
    # A**(k+1) <= A (1+A)**k, so the root lies below min(L, L**(1/(k+1)))
    lo, hi = mp.mpf(0), min(L, L ** (mp.mpf(1) / (k + 1)))
    for _ in range(200):
        mid = (lo + hi) / 2
        if mid * (1 + mid) ** k < L:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2


def h_fixed_points(k: int, Lambda: float, n_grid: int = 10 ** 5) -> list:
    """Fixed points of ``f o f`` by a dense scan refined with mpmath bisection."""
    L = mp.mpf(Lambda)

    def g(x):
        x = mp.mpf(x)
        fx = L / (1 + x) ** k
        return L / (1 + fx) ** k - x

    xs = np.linspace(0.0, Lambda, n_grid)
    fx = Lambda / (1 + xs) ** k
    vals = Lambda / (1 + fx) ** k - xs
    roots = []
    for i in range(n_grid - 1):
        if vals[i] == 0:
            roots.append(mp.mpf(xs[i]))
        elif vals[i] * vals[i + 1] < 0:
            roots.append(mp.findroot(g, (mp.mpf(xs[i]), mp.mpf(xs[i + 1])), solver="bisect"))
    return [float(r) for r in roots]


def dense_stationary(P: np.ndarray) -> np.ndarray:
    """Solve ``x P = x``, ``sum x = 1`` by least squares on the augmented system."""
    n = P.shape[0]
    M = np.vstack([P.T - np.eye(n), np.ones(n)])
    rhs = np.zeros(n + 1)
    rhs[-1] = 1.0
    x, *_ = np.linalg.lstsq(M, rhs, rcond=None)
    return x


def binomial_halfwidth(p: float, n: float, nsigma: float) -> float:
    return nsigma * math.sqrt(p * (1 - p) / n)
