"""Ordered-transmission distributed detection under data falsification attacks.

Analytic error probabilities and fusion thresholds, lower bounds on the
transmissions saved by ordered transmission, and a seeded Monte Carlo
simulator of the protocol.
"""

from eeot.errors import (
    ConfigError,
    DegenerateChannelError,
    ProtocolError,
    UnsupportedModeError,
)
from eeot.detection import (
    AttackModel,
    DecisionProbs,
    FcPerformance,
    Hypothesis,
    SensorModel,
    decision_probs,
    fc_performance,
    optimal_threshold,
)
from eeot.protocol import (
    FcState,
    RoundOutcome,
    order_sensors,
    run_unordered,
    stopping_index,
)
from eeot.bounds import (
    BoundConfig,
    BoundResult,
    brute_force_beta,
    optimal_beta,
    transmission_upper_bound,
)
from eeot.montecarlo import EstimateRecord, TrialConfig, estimate, sample_trial

__all__ = [
    "AttackModel",
    "BoundConfig",
    "BoundResult",
    "ConfigError",
    "DecisionProbs",
    "DegenerateChannelError",
    "EstimateRecord",
    "FcPerformance",
    "FcState",
    "Hypothesis",
    "ProtocolError",
    "RoundOutcome",
    "SensorModel",
    "TrialConfig",
    "UnsupportedModeError",
    "brute_force_beta",
    "decision_probs",
    "estimate",
    "fc_performance",
    "optimal_beta",
    "optimal_threshold",
    "order_sensors",
    "run_unordered",
    "sample_trial",
    "stopping_index",
    "transmission_upper_bound",
]

__version__ = "0.1.0"
