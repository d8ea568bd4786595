"""Lower bound on the transmissions saved by ordered transmission.

For a slack ``beta`` the bound is ``f1(beta) + f2(beta)`` with

    f1 = (N - ceil(T) - beta) * g1(beta) * pi1
    f2 = (ceil(T) - beta)     * g2(beta) * pi0

where ``g1`` is the probability that the first ``ceil(T) + beta`` bits
under H1 hold at most ``beta`` zeros, and ``g2`` the probability that the
first ``N - ceil(T) + beta`` bits under H0 hold at most
``floor(T) - ceil(T) + beta`` ones. The best slack is found either by the
structured search (the sequence rises then falls, so the first ``beta``
with ``D(beta) >= D2(beta)`` is the maximizer) or by scanning every
feasible ``beta``.
"""

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Tuple

from eeot.detection import DecisionProbs
from eeot.errors import UnsupportedModeError
from eeot.numerics import binomial_cdf_leq, log_choose

MODES = ("assumption1", "exact")


@dataclass(frozen=True)
class BoundConfig:
    """Inputs of the savings bound.

    In ``assumption1`` mode only the effective flip rate of ``probs`` is
    used: the bits are wrong with probability ``alpha*p`` under either
    hypothesis. ``exact`` mode uses the attacked probabilities as given.
    """

    N: int
    T: float
    pi1: float
    probs: DecisionProbs
    mode: str = "assumption1"

    def __post_init__(self):
        if self.N < 1:
            raise ValueError(f"N must be positive, got {self.N}")
        if not 0 < self.T < self.N:
            raise ValueError(f"threshold T must lie in (0, N={self.N}), got {self.T}")
        if not 0.0 < self.pi1 < 1.0:
            raise ValueError(f"pi1 must lie strictly inside (0, 1), got {self.pi1}")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")

    @classmethod
    def assumption1(cls, N: int, T: float, pi1: float, flip_rate: float) -> "BoundConfig":
        return cls(N, T, pi1, DecisionProbs.assumption1(flip_rate), "assumption1")

    @property
    def pi0(self) -> float:
        return 1.0 - self.pi1

    @property
    def ceil_t(self) -> int:
        return math.ceil(self.T)

    @property
    def floor_t(self) -> int:
        return math.floor(self.T)

    @property
    def t_d(self) -> int:
        """-1 for fractional T, 0 for integer T."""
        return self.floor_t - self.ceil_t

    @property
    def beta_max(self) -> int:
        return min(self.N - self.ceil_t, self.ceil_t)

    @property
    def miss_prob(self) -> float:
        """P(bit = 0 | H1) as used by g1 and A."""
        if self.mode == "assumption1":
            return self.probs.flip_rate
        return self.probs.tilde_0_1

    @property
    def false_alarm_prob(self) -> float:
        """P(bit = 1 | H0) as used by g2 and B."""
        if self.mode == "assumption1":
            return self.probs.flip_rate
        return self.probs.tilde_1_0

    def kappa(self, beta: int) -> float:
        return self.T - (self.ceil_t - beta)


@dataclass(frozen=True)
class BoundResult:
    N: int
    beta_star: int
    savings_lb: float
    transmissions_ub: float
    per_beta: Tuple[Tuple[int, float, float], ...]

    @property
    def fraction_ub(self) -> float:
        return self.transmissions_ub / self.N


def _check_beta(beta, cfg):
    if not 0 <= beta <= cfg.beta_max:
        raise ValueError(f"beta must lie in [0, {cfg.beta_max}], got {beta}")


@lru_cache(maxsize=4096)
def _g1(beta, cfg):
    return binomial_cdf_leq(cfg.ceil_t + beta, cfg.miss_prob, beta)


@lru_cache(maxsize=4096)
def _g2(beta, cfg):
    return binomial_cdf_leq(cfg.N - cfg.ceil_t + beta, cfg.false_alarm_prob, cfg.t_d + beta)


def g1(beta: int, cfg: BoundConfig) -> float:
    _check_beta(beta, cfg)
    return _g1(beta, cfg)


def g2(beta: int, cfg: BoundConfig) -> float:
    _check_beta(beta, cfg)
    return _g2(beta, cfg)


def _pow_term(n, k, q, exp_one, exp_other):
    # C(n, k) q^exp_one (1-q)^exp_other with 0^0 = 1
    if exp_one > 0 and q == 0.0:
        return 0.0
    if exp_other > 0 and q == 1.0:
        return 0.0
    log_val = log_choose(n, k)
    if exp_one > 0:
        log_val += exp_one * math.log(q)
    if exp_other > 0:
        log_val += exp_other * math.log1p(-q)
    return math.exp(log_val)


def coef_A(beta: int, cfg: BoundConfig) -> float:
    """Increment g1(beta + 1) - g1(beta)."""
    _check_beta(beta, cfg)
    c = cfg.ceil_t
    return _pow_term(c + beta, beta + 1, cfg.miss_prob, beta + 1, c)


def coef_B(beta: int, cfg: BoundConfig) -> float:
    """Increment g2(beta + 1) - g2(beta)."""
    _check_beta(beta, cfg)
    n = cfg.N - cfg.ceil_t + beta
    k = beta + cfg.t_d + 1
    if k < 0 or k > n:
        return 0.0
    return _pow_term(n, k, cfg.false_alarm_prob, k, cfg.N - cfg.ceil_t - cfg.t_d)


def f1(beta: int, cfg: BoundConfig) -> float:
    """Savings credited to rounds that stop on H1 within ceil(T) + beta bits."""
    return (cfg.N - cfg.ceil_t - beta) * g1(beta, cfg) * cfg.pi1


def f2(beta: int, cfg: BoundConfig) -> float:
    return (cfg.ceil_t - beta) * g2(beta, cfg) * cfg.pi0


def savings_lower_bound(beta: int, cfg: BoundConfig) -> float:
    return f1(beta, cfg) + f2(beta, cfg)


def _result(cfg, beta_star, per_beta):
    lb = savings_lower_bound(beta_star, cfg)
    return BoundResult(cfg.N, beta_star, lb, cfg.N - lb, tuple(per_beta))


def optimal_beta(cfg: BoundConfig) -> BoundResult:
    """Structured search for the best slack.

    Walks ``beta`` upward, advancing g1 and g2 with their one-step
    increments, and stops at the first ``beta`` where the bound stops
    growing (``D >= D2``). Falls back to ``beta_max``. Only valid in
    ``assumption1`` mode.
    """
    if cfg.mode != "assumption1":
        raise UnsupportedModeError(
            f"the structured search needs mode='assumption1', got {cfg.mode!r}; "
            "use brute_force_beta for exact probabilities"
        )
    N, c, pi1, pi0 = cfg.N, cfg.ceil_t, cfg.pi1, cfg.pi0
    g1_b, g2_b = g1(0, cfg), g2(0, cfg)
    per_beta = []
    beta_star = cfg.beta_max
    for beta in range(cfg.beta_max + 1):
        per_beta.append(((beta, (N - c - beta) * g1_b * pi1, (c - beta) * g2_b * pi0)))
        a, b = coef_A(beta, cfg), coef_B(beta, cfg)
        d = pi1 * g1_b + pi0 * g2_b
        d2 = pi1 * (N - c - beta - 1) * a + pi0 * (c - beta - 1) * b
        if d >= d2:
            beta_star = beta
            break
        g1_b += a
        g2_b += b
    return _result(cfg, beta_star, per_beta)


def brute_force_beta(cfg: BoundConfig) -> BoundResult:
    """Evaluate the bound at every feasible slack; smallest argmax wins ties."""
    per_beta = [(beta, f1(beta, cfg), f2(beta, cfg)) for beta in range(cfg.beta_max + 1)]
    best = max(per_beta, key=lambda row: (row[1] + row[2], -row[0]))
    return _result(cfg, best[0], per_beta)


def best_bound(cfg: BoundConfig) -> BoundResult:
    if cfg.mode == "assumption1":
        return optimal_beta(cfg)
    return brute_force_beta(cfg)


def transmission_upper_bound(cfg: BoundConfig) -> float:
    """Upper bound on the expected number of transmissions per round."""
    return best_bound(cfg).transmissions_ub
