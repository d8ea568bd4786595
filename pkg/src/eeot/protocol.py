"""Ordered transmission and the fusion center's early-stopping rule.

Sensors report their one-bit decisions in descending order of LLR
magnitude. After the k-th bit the fusion center decides H1 as soon as
the running count reaches T, and H0 as soon as the count stays below T
even if every outstanding bit were a one. Either way it broadcasts a
stop and the remaining sensors stay silent.

Sensor indices are 0-based throughout.
"""

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from eeot.detection import Hypothesis
from eeot.errors import ProtocolError

LOWER = "lower"  # H1 committed at k_L*
UPPER = "upper"  # H0 committed at k_U*


def order_sensors(llrs: Sequence[float]) -> np.ndarray:
    """Transmission order: descending |LLR|, ties by ascending sensor index."""
    llrs = np.asarray(llrs, dtype=float)
    if llrs.ndim != 1 or llrs.size == 0:
        raise ValueError("order_sensors needs a non-empty 1-d sequence of LLRs")
    if not np.all(np.isfinite(llrs)):
        raise ValueError("order_sensors needs finite LLRs")
    return np.argsort(-np.abs(llrs), kind="stable")


def _check_round(N, T):
    if N < 1:
        raise ValueError("a round needs at least one sensor")
    if not 0 < T < N:
        raise ValueError(f"threshold T must lie in (0, N={N}), got {T}")


def _says_h1(count, T, strict):
    return count > T if strict else count >= T


def _says_h0(count, remaining, T, strict):
    # even a one from every silent sensor cannot reach the H1 region
    return count + remaining <= T if strict else count + remaining < T


@dataclass
class FcState:
    """Fusion-center state within one round; owned by a single round."""

    N: int
    T: float
    k: int = 0
    running_sum: int = 0
    decision: Optional[Hypothesis] = None
    strict: bool = False

    def __post_init__(self):
        _check_round(self.N, self.T)

    def step(self, u: int) -> Optional[Hypothesis]:
        """Receive the next bit; return the decision if this bit settles it."""
        if self.decision is not None:
            raise ProtocolError(
                f"bit received after the fusion center decided {self.decision.name} at k={self.k}"
            )
        if self.k >= self.N:
            raise ProtocolError(f"all {self.N} bits already received")
        if u not in (0, 1):
            raise ValueError(f"local decisions are bits, got {u!r}")
        self.k += 1
        self.running_sum += int(u)
        if _says_h1(self.running_sum, self.T, self.strict):
            self.decision = Hypothesis.H1
        elif _says_h0(self.running_sum, self.N - self.k, self.T, self.strict):
            self.decision = Hypothesis.H0
        return self.decision


def fc_step(state: FcState, u: int) -> Optional[Hypothesis]:
    return state.step(u)


@dataclass(frozen=True)
class RoundOutcome:
    decision: Hypothesis
    k_star: int
    N: int
    stop_kind: str
    partial_sum: int

    @property
    def savings(self) -> int:
        return self.N - self.k_star

    @property
    def z_bound(self) -> int:
        """Bound on the full count implied at the stop.

        A lower bound (Z_L) after an H1 stop, an upper bound (Z_U) after
        an H0 stop.
        """
        if self.stop_kind == LOWER:
            return self.partial_sum
        return self.partial_sum + self.savings


def stopping_index(u_seq: Sequence[int], T: float, strict: bool = False) -> RoundOutcome:
    """Run the stopping rule over bits already in transmission order."""
    state = FcState(N=len(u_seq), T=T, strict=strict)
    for u in u_seq:
        decision = state.step(int(u))
        if decision is not None:
            kind = LOWER if decision == Hypothesis.H1 else UPPER
            return RoundOutcome(decision, state.k, state.N, kind, state.running_sum)
    raise ProtocolError(f"no stopping condition fired for T={T} over {state.N} bits")


def run_unordered(u_seq: Sequence[int], T: float, strict: bool = False) -> Hypothesis:
    """Fusion over all N bits at once."""
    _check_round(len(u_seq), T)
    return Hypothesis(int(_says_h1(int(np.sum(u_seq)), T, strict)))


def run_round(llrs: Sequence[float], u: Sequence[int], T: float, strict: bool = False):
    """Order the bits by LLR magnitude, then stop as early as the rule allows."""
    order = order_sensors(llrs)
    return stopping_index(np.asarray(u)[order], T, strict)


def stopping_index_batch(u_ordered, T: float, strict: bool = False):
    """Vectorized :func:`stopping_index` over the rows of a 2-d bit array.

    Returns ``(decision, k_star)`` as integer arrays; ``decision`` is 1 for H1.
    """
    u_ordered = np.asarray(u_ordered)
    _, N = u_ordered.shape
    _check_round(N, T)
    counts = np.cumsum(u_ordered, axis=1, dtype=np.int64)
    remaining = N - np.arange(1, N + 1)
    hit_h1 = _says_h1(counts, T, strict)
    hit_h0 = _says_h0(counts, remaining, T, strict)
    never = N + 1
    k_h1 = np.where(hit_h1.any(axis=1), hit_h1.argmax(axis=1) + 1, never)
    k_h0 = np.where(hit_h0.any(axis=1), hit_h0.argmax(axis=1) + 1, never)
    k_star = np.minimum(k_h1, k_h0)
    if np.any(k_star > N) or np.any(k_h1 == k_h0):
        raise ProtocolError("stopping rule failed to fire exactly once on some round")
    return (k_h1 < k_h0).astype(np.int8), k_star
