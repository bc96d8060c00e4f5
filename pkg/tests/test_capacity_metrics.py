import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate

from ehrelay.capacity_metrics import (
    CapacityResult,
    Method,
    Metric,
    ergodic_capacity,
    evaluate_throughput,
    outage_capacity,
    outage_capacity_sign_changes,
    throughput,
)
from ehrelay.link_model import ChannelConfig, EffectiveParams, Protocol, outage_probability

pytestmark = pytest.mark.filterwarnings("ignore::ehrelay.link_model.DegeneracyWarning")


def sampled_rate(p: EffectiveParams, n: int, seed: int):
    rng = np.random.default_rng(seed)
    gh = rng.exponential(p.gbar_h, n)
    i_r = rng.exponential(np.asarray(p.mu), (n, len(p.mu))).sum(axis=1) if p.mu else np.zeros(n)
    w = rng.exponential(p.gbar_g, n)
    rate = 0.5 * np.log2(1 + np.minimum(gh / (1 + i_r), w * (gh + i_r)))
    return rate.mean(), rate.std() / math.sqrt(n)


@pytest.mark.parametrize("p,seed", [
    (EffectiveParams.from_values(20.0, 0.6), 1),
    (EffectiveParams.from_values(15.0, 1.2, (2.0,)), 2),
    (EffectiveParams.from_values(100.0, 0.3, (3.0, 1.5)), 3),
    (EffectiveParams.from_values(1.0, 2.0, (0.8, 0.8, 0.8)), 4),
    (EffectiveParams.from_values(1000.0, 0.05, (40.0, 40.0, 10.0, 5.0, 25.0)), 5),
])
def test_ergodic_capacity_against_samples(p, seed):
    mean, se = sampled_rate(p, 400000, seed)
    cap = ergodic_capacity(p)
    assert cap.method is Method.ANALYTIC
    assert abs(cap.value - mean) <= 4 * se
    assert cap.est_error < 1e-6


def test_ergodic_capacity_without_interference_by_double_integral():
    # E[0.5 log2(1 + min(X, W X))] with X ~ Exp(a), W ~ Exp(b): integrate over X in closed form
    a, b = 10.0, 0.7
    def conditional(x):
        # E over W of 0.5 log2(1 + x min(1, W)) given X = x
        inner, _ = integrate.quad(lambda w: math.log2(1 + x * w) * math.exp(-w / b) / b, 0, 1)
        return 0.5 * (inner + math.exp(-1 / b) * math.log2(1 + x))

    ref, _ = integrate.quad(lambda x: conditional(x) * math.exp(-x / a) / a, 0, np.inf, limit=200)
    assert ergodic_capacity(EffectiveParams.from_values(a, b)).value == pytest.approx(ref, rel=1e-7)


def test_ergodic_capacity_zero_second_hop():
    assert ergodic_capacity(EffectiveParams.from_values(5.0, 0.0, (1.0,))).value == 0.0


def test_outage_capacity_formula():
    p = EffectiveParams.from_values(15.0, 1.2, (2.0,))
    gth = 6.3
    expected = 0.5 * (1 - outage_probability(p, gth)) * math.log2(1 + gth)
    assert outage_capacity(p, gth).value == pytest.approx(expected, rel=1e-14)


def test_throughput_protocol_factors():
    c = CapacityResult(2.0)
    assert throughput(Protocol.ts(0.25), c) == pytest.approx(1.5)
    assert throughput(Protocol.ps(0.25), c) == 2.0
    for proto in (Protocol.ts(0.0), Protocol.ts(1.0), Protocol.ps(0.0), Protocol.ps(1.0)):
        assert throughput(proto, c) == 0.0


def test_evaluate_throughput_endpoints_and_aliases():
    cfg = ChannelConfig(source_power=100.0, interferer_powers=(6.0, 4.0))
    assert evaluate_throughput(cfg, Protocol.ts(0.0), "ergodic", 6.3) == 0.0
    value = evaluate_throughput(cfg, Protocol.ps(0.5), "outage", 6.3)
    assert value == evaluate_throughput(cfg, Protocol.ps(0.5), Metric.OUTAGE, 6.3)
    assert Metric("ergodic") is Metric.ERGODIC


def test_capacity_result_validation():
    with pytest.raises(ValueError):
        CapacityResult(-0.1)
    with pytest.raises(ValueError):
        CapacityResult(1.0, est_error=-1.0)


def test_outage_capacity_unimodal_in_threshold(caplog):
    p = EffectiveParams.from_values(100.0, 0.4, (6.0, 4.0))
    thresholds = np.geomspace(0.01, 1e4, 120)
    assert outage_capacity_sign_changes(p, thresholds) == 1
    assert "not unimodal" not in caplog.text


@st.composite
def params(draw):
    gh = draw(st.floats(0.5, 500.0))
    gg = draw(st.floats(0.05, 5.0))
    mu = draw(st.lists(st.floats(0.05, 20.0), max_size=3))
    return EffectiveParams.from_values(gh, gg, mu)


@given(params())
def test_ergodic_capacity_bounded_by_first_hop(p):
    # min(gamma_SR, gamma_RD) <= gamma_h, and Jensen bounds the log of its mean
    value = ergodic_capacity(p).value
    assert 0.0 <= value <= 0.5 * math.log2(1 + p.gbar_h) + 1e-9


@given(params(), st.floats(1.0, 4.0))
def test_ergodic_capacity_grows_with_second_hop(p, factor):
    better = EffectiveParams.from_values(p.gbar_h, p.gbar_g * factor, p.mu)
    assert ergodic_capacity(better).value >= ergodic_capacity(p).value - 1e-7
