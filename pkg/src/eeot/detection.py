"""Local sensor model, attack transformation and fusion-center performance."""

import math
from dataclasses import dataclass
from enum import IntEnum

from eeot.errors import DegenerateChannelError
from eeot.numerics import binomial_cdf_leq, binomial_tail_geq, q_tail

# how the local threshold is mapped into the observation domain
THRESHOLD_DOMAINS = ("llr", "observation")


class Hypothesis(IntEnum):
    H0 = 0
    H1 = 1


def _check_probability(name, value):
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {value}")


@dataclass(frozen=True)
class SensorModel:
    """Gaussian shift-in-mean observation model shared by all sensors.

    Under H0 a sensor sees N(0, sigma^2), under H1 N(s, sigma^2). The
    local threshold ``lam`` is derived from the prior and never set
    directly.
    """

    s: float = 10.0
    sigma: float = 1.0
    pi1: float = 0.5

    def __post_init__(self):
        if not self.s > 0:
            raise ValueError(f"signal amplitude s must be positive, got {self.s}")
        if not self.sigma > 0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")
        if not 0.0 < self.pi1 < 1.0:
            raise ValueError(f"pi1 must lie strictly inside (0, 1), got {self.pi1}")

    @property
    def pi0(self) -> float:
        return 1.0 - self.pi1

    @property
    def lam(self) -> float:
        return math.log(self.pi0 / self.pi1)

    @property
    def observation_threshold(self) -> float:
        """Observation value at which the local LLR equals ``lam``."""
        return self.sigma**2 * self.lam / self.s + self.s / 2.0


@dataclass(frozen=True)
class AttackModel:
    alpha: float = 0.0
    p: float = 0.0

    def __post_init__(self):
        _check_probability("alpha", self.alpha)
        _check_probability("p", self.p)
        if not self.alpha * self.p < 0.5:
            raise ValueError(
                f"effective flip rate alpha*p must be below 0.5, got {self.alpha * self.p}"
            )

    @property
    def flip_rate(self) -> float:
        return self.alpha * self.p


@dataclass(frozen=True)
class DecisionProbs:
    """P(decision = 1 | H_h) before (``pi_1_h``) and after (``tilde_1_h``) the attack."""

    pi_1_0: float
    pi_1_1: float
    tilde_1_0: float
    tilde_1_1: float

    def __post_init__(self):
        for name in ("pi_1_0", "pi_1_1", "tilde_1_0", "tilde_1_1"):
            _check_probability(name, getattr(self, name))

    @classmethod
    def assumption1(cls, flip_rate: float) -> "DecisionProbs":
        """High-SNR limit: honest sensors never err, so only the attack flips bits."""
        _check_probability("flip_rate", flip_rate)
        return cls(0.0, 1.0, flip_rate, 1.0 - flip_rate)

    @property
    def pi_0_0(self) -> float:
        return 1.0 - self.pi_1_0

    @property
    def pi_0_1(self) -> float:
        return 1.0 - self.pi_1_1

    @property
    def tilde_0_0(self) -> float:
        return 1.0 - self.tilde_1_0

    @property
    def tilde_0_1(self) -> float:
        return 1.0 - self.tilde_1_1

    @property
    def flip_rate(self) -> float:
        """Effective flip rate alpha*p recovered by inverting the attack map."""
        return (self.tilde_1_0 - self.pi_1_0) / (1.0 - 2.0 * self.pi_1_0)


@dataclass(frozen=True)
class FcPerformance:
    pf: float
    pd: float
    pm: float
    pe: float


def local_llr(y, model: SensorModel):
    """Gaussian log-likelihood ratio log f(y|H1)/f(y|H0). Works on arrays."""
    return (model.s * y - model.s**2 / 2.0) / model.sigma**2


def local_decide(llr, model: SensorModel) -> int:
    # ties resolve to 0
    return int(llr > model.lam)


def decision_probs(
    model: SensorModel, attack: AttackModel, threshold_domain: str = "llr"
) -> DecisionProbs:
    """Honest and attacked local decision probabilities.

    ``threshold_domain="llr"`` compares the LLR against ``lam`` and maps it
    to the observation threshold ``sigma^2 lam / s + s / 2``. The
    ``"observation"`` variant uses ``lam`` itself as the observation
    threshold; it breaks the high-SNR limit and exists for comparison only.
    """
    if threshold_domain == "llr":
        tau = model.observation_threshold
    elif threshold_domain == "observation":
        tau = model.lam
    else:
        raise ValueError(
            f"threshold_domain must be one of {THRESHOLD_DOMAINS}, got {threshold_domain!r}"
        )
    pi_1_0 = q_tail(tau / model.sigma)
    pi_1_1 = q_tail((tau - model.s) / model.sigma)
    a = attack.flip_rate
    tilde_1_0 = a * (1.0 - pi_1_0) + (1.0 - a) * pi_1_0
    tilde_1_1 = a * (1.0 - pi_1_1) + (1.0 - a) * pi_1_1
    return DecisionProbs(pi_1_0, pi_1_1, tilde_1_0, tilde_1_1)


def decision_cutoff(T: float, strict: bool = False) -> int:
    """Smallest count of ones that makes the fusion center decide H1.

    The default rule decides H1 when the count reaches ``T``; ``strict``
    requires the count to exceed it. The two only differ for integer ``T``.
    """
    if strict:
        return math.floor(T) + 1
    return math.ceil(T)


def fc_performance(
    N: int, T: float, probs: DecisionProbs, model: SensorModel, strict: bool = False
) -> FcPerformance:
    """Fusion-center error probabilities for the count rule sum(u) vs T.

    Uses the attacked probabilities, since the fusion center only sees
    the transmitted bits.
    """
    if not 0 < T < N:
        raise ValueError(f"threshold T must lie in (0, N={N}), got {T}")
    k0 = decision_cutoff(T, strict)
    pd = binomial_tail_geq(N, probs.tilde_1_1, k0)
    pf = binomial_tail_geq(N, probs.tilde_1_0, k0)
    # summed directly rather than 1 - pd: pm is often far below machine epsilon
    pm = binomial_cdf_leq(N, probs.tilde_1_1, k0 - 1)
    return FcPerformance(pf=pf, pd=pd, pm=pm, pe=model.pi0 * pf + model.pi1 * pm)


def error_at_cutoff(N: int, k0: int, probs: DecisionProbs, model: SensorModel) -> float:
    """Bayes error of the rule "decide H1 iff sum(u) >= k0".

    Unlike :func:`fc_performance` any integer cutoff is accepted, including
    the trivial rules ``k0 <= 0`` and ``k0 > N``.
    """
    pf = binomial_tail_geq(N, probs.tilde_1_0, k0)
    pm = binomial_cdf_leq(N, probs.tilde_1_1, k0 - 1)
    return model.pi0 * pf + model.pi1 * pm


def optimal_threshold(N: int, probs: DecisionProbs, model: SensorModel) -> float:
    """Bayes-optimal count threshold T* for the fused decision."""
    t10, t11 = probs.tilde_1_0, probs.tilde_1_1
    if t11 == t10:
        raise DegenerateChannelError(
            f"attacked decision channel is uninformative (tilde_1_0 = tilde_1_1 = {t10})"
        )
    if t10 in (0.0, 1.0) or t11 in (0.0, 1.0):
        raise DegenerateChannelError(
            f"attacked decision channel is noiseless (tilde_1_0={t10}, tilde_1_1={t11}); "
            "every threshold separating the two outcomes is optimal"
        )
    numerator = math.log(model.pi0 / model.pi1) + N * (
        math.log1p(-t10) - math.log1p(-t11)
    )
    denominator = math.log(t11) + math.log1p(-t10) - math.log(t10) - math.log1p(-t11)
    return numerator / denominator
