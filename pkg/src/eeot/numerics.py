"""Scalar primitives shared by the analytic modules.

Binomial sums are accumulated from log-domain terms: at N=100 and flip
rates around 0.15 the individual terms span forty orders of magnitude.
"""

import math

import numpy as np
from scipy.special import gammaln

# exact big-integer path below this size, lgamma above
_EXACT_CHOOSE_LIMIT = 5000


def q_tail(x: float) -> float:
    """Standard normal upper tail P(X > x)."""
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"q_tail needs a finite argument, got {x!r}")
    return 0.5 * math.erfc(x / math.sqrt(2.0))


def log_choose(n: int, k: int) -> float:
    """Natural log of the binomial coefficient C(n, k)."""
    n, k = int(n), int(k)
    if n < 0 or k < 0:
        raise ValueError(f"log_choose needs non-negative arguments, got ({n}, {k})")
    if k > n:
        raise ValueError(f"log_choose needs k <= n, got ({n}, {k})")
    if k == 0 or k == n:
        return 0.0
    if n <= _EXACT_CHOOSE_LIMIT:
        return math.log(math.comb(n, k))
    return math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)


def _log_terms(n, q, lo, hi):
    i = np.arange(lo, hi + 1, dtype=float)
    if n <= _EXACT_CHOOSE_LIMIT:
        log_c = np.array([log_choose(n, k) for k in range(lo, hi + 1)])
    else:
        log_c = gammaln(n + 1.0) - gammaln(i + 1.0) - gammaln(n - i + 1.0)
    return log_c + i * math.log(q) + (n - i) * math.log1p(-q)


def log_binomial_sum(n: int, q: float, lo: int, hi: int) -> float:
    """Log of sum_{i=lo}^{hi} C(n,i) q^i (1-q)^(n-i), clipped to [0, n].

    Returns -inf for an empty range.
    """
    n = int(n)
    if n < 0:
        raise ValueError(f"n must be non-negative, got {n}")
    q = float(q)
    if not 0.0 <= q <= 1.0:
        raise ValueError(f"q must lie in [0, 1], got {q}")
    lo, hi = max(int(lo), 0), min(int(hi), n)
    if lo > hi:
        return -math.inf
    if lo == 0 and hi == n:
        return 0.0
    # point masses at the boundary of the support
    if q == 0.0:
        return 0.0 if lo == 0 else -math.inf
    if q == 1.0:
        return 0.0 if hi == n else -math.inf
    terms = _log_terms(n, q, lo, hi)
    top = float(terms.max())
    if top == -math.inf:
        return -math.inf
    total = math.fsum(np.exp(terms - top).tolist())
    return min(top + math.log(total), 0.0)


def binomial_sum(n: int, q: float, lo: int, hi: int) -> float:
    return math.exp(log_binomial_sum(n, q, lo, hi))


def binomial_tail_geq(n: int, q: float, k0: int) -> float:
    """P(Bin(n, q) >= k0); 1 for k0 <= 0 and 0 for k0 > n."""
    return binomial_sum(n, q, k0, n)


def binomial_cdf_leq(n: int, q: float, k: int) -> float:
    """P(Bin(n, q) <= k); 0 for negative k."""
    return binomial_sum(n, q, 0, k)
