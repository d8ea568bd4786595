"""Seeded Monte Carlo simulation of ordered-transmission rounds.

Every trial draws from its own SplitMix64 stream, keyed by
``derive_trial_seed(master_seed, trial_index)``. Draw ``j`` of a trial is
``mix64(seed + (j + 1) * GOLDEN)``, so any trial can be regenerated on its
own and a block of trials is generated in one vectorized pass. Layout of
the draws within a trial (N sensors):

    0            hypothesis
    1 .. N       observation noise (inverse-CDF normal)
    N+1 .. 2N    malicious indicator
    2N+1 .. 3N   flip indicator

Blocks are fixed by trial index, and per-block totals are integer
counts, so results do not depend on how blocks are spread over workers.
"""

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields
from typing import Optional

import numpy as np
from scipy.special import ndtri

from eeot.detection import AttackModel, Hypothesis, SensorModel, local_llr
from eeot.errors import ProtocolError
from eeot.protocol import LOWER, UPPER, RoundOutcome, stopping_index_batch

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB

Z_95 = 1.96
DEFAULT_BLOCK = 5000


def mix64(x: int) -> int:
    """SplitMix64 output finalizer; a bijection on 64-bit integers."""
    x &= MASK64
    x = ((x ^ (x >> 30)) * _MIX1) & MASK64
    x = ((x ^ (x >> 27)) * _MIX2) & MASK64
    return x ^ (x >> 31)


def _mix64_array(x):
    x = x ^ (x >> np.uint64(30))
    x = x * np.uint64(_MIX1)
    x = x ^ (x >> np.uint64(27))
    x = x * np.uint64(_MIX2)
    return x ^ (x >> np.uint64(31))


def derive_trial_seed(master_seed: int, trial_index: int) -> int:
    """Per-trial seed; injective in ``trial_index`` for a fixed master seed."""
    return mix64((mix64(master_seed) + trial_index * GOLDEN) & MASK64)


def _trial_seeds(master_seed, start, stop):
    idx = np.arange(start, stop, dtype=np.uint64)
    base = np.uint64(mix64(master_seed))
    return _mix64_array(base + idx * np.uint64(GOLDEN))


def _uniforms(seeds, first, count):
    """Draws ``first .. first+count-1`` of each trial stream, as doubles in (0, 1)."""
    j = np.arange(first + 1, first + count + 1, dtype=np.uint64)
    bits = _mix64_array(seeds[:, None] + j[None, :] * np.uint64(GOLDEN))
    return ((bits >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0**-53


@dataclass(frozen=True)
class TrialConfig:
    N: int = 100
    sensor: SensorModel = SensorModel()
    attack: AttackModel = AttackModel()
    T: float = 49.5
    trials: int = 100_000
    master_seed: int = 1
    strict: bool = False

    def __post_init__(self):
        if self.N < 1:
            raise ValueError(f"N must be positive, got {self.N}")
        if self.trials < 1:
            raise ValueError(f"trials must be at least 1, got {self.trials}")
        if not 0 < self.T < self.N:
            raise ValueError(f"threshold T must lie in (0, N={self.N}), got {self.T}")
        if not 0 <= self.master_seed <= MASK64:
            raise ValueError(f"master_seed must be an unsigned 64-bit integer, got {self.master_seed}")


@dataclass
class _Block:
    hypothesis: np.ndarray
    y: np.ndarray
    malicious: np.ndarray
    v: np.ndarray
    u: np.ndarray
    order: np.ndarray
    decision: np.ndarray
    k_star: np.ndarray
    decision_unordered: np.ndarray


def _simulate(cfg: TrialConfig, start: int, stop: int) -> _Block:
    N, sensor = cfg.N, cfg.sensor
    seeds = _trial_seeds(cfg.master_seed, start, stop)
    h = (_uniforms(seeds, 0, 1)[:, 0] < sensor.pi1).astype(np.int8)
    noise = ndtri(_uniforms(seeds, 1, N))
    y = sensor.s * h[:, None] + sensor.sigma * noise
    llr = local_llr(y, sensor)
    v = (llr > sensor.lam).astype(np.int8)
    malicious = (_uniforms(seeds, N + 1, N) < cfg.attack.alpha).astype(np.int8)
    flipped = malicious & (_uniforms(seeds, 2 * N + 1, N) < cfg.attack.p)
    u = v ^ flipped
    order = np.argsort(-np.abs(llr), axis=1, kind="stable")
    u_ordered = np.take_along_axis(u, order, axis=1)
    decision, k_star = stopping_index_batch(u_ordered, cfg.T, cfg.strict)
    counts = u.sum(axis=1, dtype=np.int64)
    unordered = (counts > cfg.T if cfg.strict else counts >= cfg.T).astype(np.int8)
    bad = np.flatnonzero(decision != unordered)
    if bad.size:
        raise ProtocolError(
            f"ordered and unordered fusion disagree on trial {start + int(bad[0])}"
        )
    return _Block(h, y, malicious, v, u, order, decision, k_star, unordered)


@dataclass(frozen=True)
class TrialRecord:
    hypothesis: Hypothesis
    y: np.ndarray
    malicious: np.ndarray
    v: np.ndarray
    u: np.ndarray
    order: np.ndarray
    outcome_eeot: RoundOutcome
    decision_unordered: Hypothesis


def sample_trial(cfg: TrialConfig, trial_index: int) -> TrialRecord:
    """Regenerate one trial of ``cfg`` exactly as :func:`estimate` sees it."""
    b = _simulate(cfg, trial_index, trial_index + 1)
    decision = Hypothesis(int(b.decision[0]))
    k_star = int(b.k_star[0])
    partial = int(b.u[0][b.order[0][:k_star]].sum())
    outcome = RoundOutcome(
        decision, k_star, cfg.N, LOWER if decision == Hypothesis.H1 else UPPER, partial
    )
    return TrialRecord(
        hypothesis=Hypothesis(int(b.hypothesis[0])),
        y=b.y[0],
        malicious=b.malicious[0],
        v=b.v[0],
        u=b.u[0],
        order=b.order[0],
        outcome_eeot=outcome,
        decision_unordered=Hypothesis(int(b.decision_unordered[0])),
    )


@dataclass
class Totals:
    """Integer tallies over a set of trials; adding two Totals is exact."""

    trials: int = 0
    n_h0: int = 0
    n_h1: int = 0
    errors: int = 0
    false_alarms: int = 0
    misses: int = 0
    false_alarms_unordered: int = 0
    misses_unordered: int = 0
    sum_k: int = 0
    sum_k_sq: int = 0
    ones_h0: int = 0
    ones_h1: int = 0

    def __add__(self, other):
        return Totals(*(getattr(self, f.name) + getattr(other, f.name) for f in fields(self)))


def simulate_block(cfg: TrialConfig, start: int, stop: int) -> Totals:
    b = _simulate(cfg, start, stop)
    h1 = b.hypothesis == 1
    h0 = ~h1
    wrong = b.decision != b.hypothesis
    wrong_unordered = b.decision_unordered != b.hypothesis
    k = b.k_star.astype(np.int64)
    ones = b.u.sum(axis=1, dtype=np.int64)
    return Totals(
        trials=stop - start,
        n_h0=int(h0.sum()),
        n_h1=int(h1.sum()),
        errors=int(wrong.sum()),
        false_alarms=int((wrong & h0).sum()),
        misses=int((wrong & h1).sum()),
        false_alarms_unordered=int((wrong_unordered & h0).sum()),
        misses_unordered=int((wrong_unordered & h1).sum()),
        sum_k=int(k.sum()),
        sum_k_sq=int((k * k).sum()),
        ones_h0=int(ones[h0].sum()),
        ones_h1=int(ones[h1].sum()),
    )


def _simulate_block_args(args):
    return simulate_block(*args)


def wald_half_width(p_hat: float, n: int) -> float:
    """95% normal-approximation half-width for a proportion."""
    return Z_95 * math.sqrt(p_hat * (1.0 - p_hat) / n)


@dataclass(frozen=True)
class EstimateRecord:
    """Monte Carlo estimates with 95% half-widths.

    Conditional rates are ``None`` when no trial drew the conditioning
    hypothesis.
    """

    N: int
    trials: int
    pe_hat: float
    pe_ci: float
    pf_hat: Optional[float]
    pf_ci: Optional[float]
    pm_hat: Optional[float]
    pm_ci: Optional[float]
    pf_hat_unordered: Optional[float]
    pm_hat_unordered: Optional[float]
    mean_transmissions: float
    fraction_transmissions: float
    fraction_ci: float
    ones_rate_h0: Optional[float]
    ones_rate_h1: Optional[float]

    @classmethod
    def from_totals(cls, N: int, t: Totals) -> "EstimateRecord":
        def rate(count, n):
            return None if n == 0 else count / n

        def ci(p, n):
            return None if p is None else wald_half_width(p, n)

        pe = t.errors / t.trials
        pf = rate(t.false_alarms, t.n_h0)
        pm = rate(t.misses, t.n_h1)
        mean_k = t.sum_k / t.trials
        if t.trials > 1:
            var_k = max(t.sum_k_sq - t.trials * mean_k**2, 0.0) / (t.trials - 1)
        else:
            var_k = 0.0
        return cls(
            N=N,
            trials=t.trials,
            pe_hat=pe,
            pe_ci=wald_half_width(pe, t.trials),
            pf_hat=pf,
            pf_ci=ci(pf, t.n_h0),
            pm_hat=pm,
            pm_ci=ci(pm, t.n_h1),
            pf_hat_unordered=rate(t.false_alarms_unordered, t.n_h0),
            pm_hat_unordered=rate(t.misses_unordered, t.n_h1),
            mean_transmissions=mean_k,
            fraction_transmissions=mean_k / N,
            fraction_ci=Z_95 * math.sqrt(var_k / t.trials) / N,
            ones_rate_h0=rate(t.ones_h0, t.n_h0 * N),
            ones_rate_h1=rate(t.ones_h1, t.n_h1 * N),
        )


def _blocks(trials, block_size):
    return [(s, min(s + block_size, trials)) for s in range(0, trials, block_size)]


def estimate(
    cfg: TrialConfig,
    workers: int = 1,
    block_size: int = DEFAULT_BLOCK,
    executor: Optional[ProcessPoolExecutor] = None,
) -> EstimateRecord:
    """Run ``cfg.trials`` rounds and aggregate error rates and transmissions.

    ``workers > 1`` (or an explicit ``executor``) spreads blocks over
    processes; the result is identical either way.
    """
    jobs = [(cfg, start, stop) for start, stop in _blocks(cfg.trials, block_size)]
    if executor is not None:
        parts = list(executor.map(_simulate_block_args, jobs))
    elif workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_simulate_block_args, jobs))
    else:
        parts = [simulate_block(*job) for job in jobs]
    total = Totals()
    for part in parts:
        total = total + part
    return EstimateRecord.from_totals(cfg.N, total)
