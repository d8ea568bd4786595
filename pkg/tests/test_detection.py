import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from eeot.detection import (
    AttackModel,
    DecisionProbs,
    Hypothesis,
    SensorModel,
    decision_cutoff,
    decision_probs,
    error_at_cutoff,
    fc_performance,
    local_decide,
    local_llr,
    optimal_threshold,
)
from eeot.errors import DegenerateChannelError
from oracles import exact_binomial_sum, exact_tail


@pytest.fixture
def unit():
    return SensorModel(s=2.0, sigma=1.0, pi1=0.5)


class TestModels:
    def test_lambda_is_log_prior_ratio(self):
        m = SensorModel(pi1=0.3)
        assert m.pi0 == pytest.approx(0.7)
        assert m.lam == pytest.approx(math.log(7 / 3))

    @pytest.mark.parametrize("kwargs", [{"s": 0.0}, {"s": -1.0}, {"sigma": 0.0}, {"pi1": 0.0}, {"pi1": 1.0}])
    def test_invalid_sensor(self, kwargs):
        with pytest.raises(ValueError):
            SensorModel(**kwargs)

    @pytest.mark.parametrize("alpha,p", [(1.5, 0.1), (0.3, -0.1), (0.5, 1.0), (1.0, 0.5)])
    def test_invalid_attack(self, alpha, p):
        with pytest.raises(ValueError):
            AttackModel(alpha, p)

    def test_flip_rate(self):
        assert AttackModel(0.3, 0.5).flip_rate == pytest.approx(0.15)

    def test_assumption1_probs(self):
        probs = DecisionProbs.assumption1(0.15)
        assert (probs.tilde_1_0, probs.tilde_1_1) == (0.15, 0.85)
        assert probs.tilde_0_0 == pytest.approx(0.85)
        assert probs.flip_rate == 0.15

    def test_flip_rate_inverts_attack(self):
        probs = decision_probs(SensorModel(s=1.5, pi1=0.4), AttackModel(0.4, 0.6))
        assert probs.flip_rate == pytest.approx(0.24, rel=1e-12)


class TestLocalTest:
    def test_llr_zero_at_midpoint(self, unit):
        assert local_llr(1.0, unit) == 0.0

    def test_llr_values(self, unit):
        assert local_llr(0.0, unit) == -2.0
        assert local_llr(3.0, unit) == 4.0

    def test_llr_vectorized_and_increasing(self, unit):
        y = np.linspace(-5, 5, 101)
        assert np.all(np.diff(local_llr(y, unit)) > 0)

    def test_decide(self):
        m = SensorModel(pi1=0.3)
        assert local_decide(m.lam + 1, m) == 1
        assert local_decide(m.lam - 1, m) == 0
        assert local_decide(m.lam, m) == 0

    def test_observation_threshold_matches_llr_test(self):
        m = SensorModel(s=3.0, sigma=1.7, pi1=0.2)
        assert local_llr(m.observation_threshold, m) == pytest.approx(m.lam)


class TestDecisionProbs:
    def test_equal_priors(self):
        probs = decision_probs(SensorModel(s=5.0, sigma=1.0, pi1=0.5), AttackModel())
        # threshold sits at s/2 = 2.5; Q(2.5) = 0.0062096653
        assert probs.pi_1_0 == pytest.approx(0.0062097, abs=1e-6)
        assert probs.pi_1_1 == pytest.approx(0.9937903, abs=1e-6)

    def test_no_attack_is_identity(self):
        probs = decision_probs(SensorModel(s=1.3, pi1=0.35), AttackModel(0.0, 0.8))
        assert probs.tilde_1_0 == probs.pi_1_0
        assert probs.tilde_1_1 == probs.pi_1_1

    def test_high_snr_limit(self):
        probs = decision_probs(SensorModel(s=40.0, pi1=0.5), AttackModel(0.3, 0.5))
        assert probs.tilde_1_0 == pytest.approx(0.15, abs=1e-12)
        assert probs.tilde_1_1 == pytest.approx(0.85, abs=1e-12)

    def test_observation_domain_variant(self):
        m = SensorModel(s=10.0, pi1=0.5)
        literal = decision_probs(m, AttackModel(), threshold_domain="observation")
        # lam = 0 taken as an observation threshold: half the H0 mass decides 1
        assert literal.pi_1_0 == pytest.approx(0.5)
        with pytest.raises(ValueError):
            decision_probs(m, AttackModel(), threshold_domain="nope")

    @given(
        st.floats(0.5, 20), st.floats(0.1, 0.9), st.floats(0, 1), st.floats(0, 1)
    )
    def test_attack_keeps_order(self, s, pi1, alpha, p):
        if alpha * p >= 0.5:
            return
        probs = decision_probs(SensorModel(s=s, pi1=pi1), AttackModel(alpha, p))
        assert probs.pi_1_1 > probs.pi_1_0
        assert probs.tilde_1_1 > probs.tilde_1_0
        assert probs.tilde_0_0 == 1.0 - probs.tilde_1_0


class TestFcPerformance:
    def test_single_sensor(self):
        probs = DecisionProbs(0.1, 0.9, 0.1, 0.9)
        perf = fc_performance(1, 0.5, probs, SensorModel(pi1=0.5))
        assert perf.pd == pytest.approx(0.9)
        assert perf.pf == pytest.approx(0.1)

    def test_uninformative_channel(self):
        probs = DecisionProbs(0.3, 0.3, 0.3, 0.3)
        perf = fc_performance(20, 7.5, probs, SensorModel())
        assert perf.pf == perf.pd

    def test_tiny_error_at_n100(self):
        probs = DecisionProbs.assumption1(0.15)
        perf = fc_performance(100, 49.5, probs, SensorModel(pi1=0.5))
        # exact rational oracle: 1.3455783374761947e-16
        assert perf.pe < 1e-15
        assert perf.pe == pytest.approx(1.3455783374761947e-16, rel=1e-9)

    @pytest.mark.parametrize("T", [0.0, 20.0, -1.0])
    def test_threshold_range(self, T):
        with pytest.raises(ValueError):
            fc_performance(20, T, DecisionProbs.assumption1(0.1), SensorModel())

    def test_integer_threshold_convention(self):
        assert decision_cutoff(49.5) == 50
        assert decision_cutoff(50.0) == 50
        assert decision_cutoff(50.0, strict=True) == 51
        assert decision_cutoff(49.5, strict=True) == 50
        probs = DecisionProbs.assumption1(0.2)
        m = SensorModel()
        assert fc_performance(10, 5.0, probs, m) == fc_performance(10, 4.5, probs, m)
        assert fc_performance(10, 5.0, probs, m, strict=True) == fc_performance(10, 5.5, probs, m)

    @given(st.integers(1, 40), st.floats(0.01, 0.99), st.floats(0, 0.49), st.floats(0.05, 0.95))
    def test_complement_identities(self, N, frac, flip, pi1):
        T = max(min(frac * N, N - 0.25), 0.25)
        m = SensorModel(pi1=pi1)
        perf = fc_performance(N, T, DecisionProbs.assumption1(flip), m)
        assert perf.pm == pytest.approx(1.0 - perf.pd, abs=1e-12)
        assert perf.pe == pytest.approx(m.pi0 * perf.pf + m.pi1 * perf.pm, abs=1e-12)

    def test_against_exact_sums(self):
        probs = decision_probs(SensorModel(s=1.0, pi1=0.4), AttackModel(0.2, 0.7))
        perf = fc_performance(25, 11.5, probs, SensorModel(s=1.0, pi1=0.4))
        assert perf.pd == pytest.approx(float(exact_tail(25, probs.tilde_1_1, 12)), rel=1e-12)
        assert perf.pf == pytest.approx(float(exact_tail(25, probs.tilde_1_0, 12)), rel=1e-12)
        assert perf.pm == pytest.approx(float(exact_binomial_sum(25, probs.tilde_1_1, 0, 11)), rel=1e-12)

    def test_no_attack_floor(self):
        for N in (20, 50, 100):
            m = SensorModel(s=10.0, sigma=1.0, pi1=0.5)
            perf = fc_performance(N, N / 2 - 0.5, decision_probs(m, AttackModel()), m)
            assert perf.pe <= 1e-6

    def test_error_grows_with_flip_rate(self):
        m = SensorModel(pi1=0.3)
        last = -1.0
        for flip in np.linspace(0.0, 0.49, 50):
            probs = DecisionProbs.assumption1(float(flip))
            T = 50.0 if flip == 0 else optimal_threshold(100, probs, m)
            pe = error_at_cutoff(100, decision_cutoff(T), probs, m)
            assert pe >= last
            last = pe


class TestOptimalThreshold:
    @pytest.mark.parametrize("flip", [0.01, 0.15, 0.3, 0.45])
    def test_equal_priors_give_half(self, flip):
        T = optimal_threshold(100, DecisionProbs.assumption1(flip), SensorModel(pi1=0.5))
        assert T == pytest.approx(50.0, abs=1e-9)

    def test_unequal_priors(self):
        T = optimal_threshold(100, DecisionProbs.assumption1(0.15), SensorModel(pi1=0.3))
        expected = math.log(7 / 3) / (2 * math.log(0.85 / 0.15)) + 50
        assert T == pytest.approx(50.2443, abs=1e-3)
        assert T == pytest.approx(expected, rel=1e-12)

    def test_degenerate(self):
        with pytest.raises(DegenerateChannelError):
            optimal_threshold(100, DecisionProbs.assumption1(0.5), SensorModel())
        with pytest.raises(DegenerateChannelError):
            optimal_threshold(100, DecisionProbs.assumption1(0.0), SensorModel())

    def test_cutoff_scan_small_networks(self):
        # exhaustive scan over integer cutoffs; ties within float noise allowed
        for N in range(1, 31):
            for pi1 in (0.2, 0.3, 0.5, 0.7):
                for flip in (0.02, 0.1, 0.2, 0.3, 0.4):
                    m = SensorModel(pi1=pi1)
                    probs = DecisionProbs.assumption1(flip)
                    T = optimal_threshold(N, probs, m)
                    errs = [error_at_cutoff(N, k, probs, m) for k in range(0, N + 2)]
                    best = min(errs)
                    argmins = {k for k, e in enumerate(errs) if e <= best * (1 + 1e-9) + 1e-300}
                    implied = {round(T), round(T) + 1} if abs(T - round(T)) < 1e-9 else {math.ceil(T)}
                    # every cutoff past either end makes the same constant decision
                    implied = {min(max(k, 0), N + 1) for k in implied}
                    assert argmins & implied, (N, pi1, flip, T, argmins)


def test_hypothesis_enum():
    assert Hypothesis.H1 == 1 and Hypothesis(0) is Hypothesis.H0
