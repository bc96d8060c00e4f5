import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from ehrelay.capacity_metrics import Metric
from ehrelay.errors import DomainError
from ehrelay.link_model import ChannelConfig, Protocol, effective_params
from ehrelay.monte_carlo import (
    BLOCK_SIZE,
    block_rng,
    mc_ergodic,
    mc_outage,
    mc_throughput,
    run_estimator,
    sample_trial,
    sample_trials,
)

CFG = ChannelConfig(source_power=100.0, interferer_powers=(6.0, 4.0), efficiency=0.8)


def test_same_seed_same_estimate_any_worker_count():
    n = 3 * BLOCK_SIZE + 123
    serial = mc_outage(CFG, Protocol.ts(0.3), 6.3, n, seed=7)
    threaded = mc_outage(CFG, Protocol.ts(0.3), 6.3, n, seed=7, workers=4)
    assert serial == threaded


def test_different_seeds_differ():
    a = mc_ergodic(CFG, Protocol.ps(0.5), 5000, seed=1)
    b = mc_ergodic(CFG, Protocol.ps(0.5), 5000, seed=2)
    assert a.mean != b.mean


def test_block_merge_equals_pooled_statistics():
    n = 2 * BLOCK_SIZE + 999
    proto = Protocol.ps(0.4)
    est = mc_ergodic(CFG, proto, n, seed=11)
    sizes = [BLOCK_SIZE, BLOCK_SIZE, 999]
    pooled = np.concatenate([
        (lambda b: 0.5 * np.log2(1 + np.minimum(b.gamma_sr, b.gamma_rd)))(
            sample_trials(CFG, proto, size, block_rng(11, k)))
        for k, size in enumerate(sizes)
    ])
    assert est.trials == n
    assert est.mean == pytest.approx(pooled.mean(), rel=1e-12)
    assert est.std_error == pytest.approx(pooled.std(ddof=1) / math.sqrt(n), rel=1e-9)


def test_sample_moments_match_configuration():
    proto = Protocol.ps(0.25)
    p = effective_params(CFG, proto)
    b = sample_trials(CFG, proto, 400000, np.random.default_rng(3))
    assert len(b) == 400000
    assert b.gamma_h.mean() == pytest.approx(p.gbar_h, rel=0.01)
    assert b.i_r.mean() == pytest.approx(sum(p.mu), rel=0.01)
    assert b.w.mean() == pytest.approx(p.gbar_g, rel=0.01)
    # independent exponentials: variance of the sum is the sum of squared means
    assert b.i_r.var() == pytest.approx(sum(m * m for m in p.mu), rel=0.03)


def test_single_trial_fields():
    t = sample_trial(CFG, Protocol.ts(0.5), np.random.default_rng(0))
    assert t.gamma_sr == pytest.approx(t.gamma_h / (1 + t.i_r))
    assert t.gamma_rd == pytest.approx(t.w * (t.gamma_h + t.i_r))


def test_no_interferers():
    b = sample_trials(ChannelConfig(source_power=10.0), Protocol.ts(0.5), 100,
                      np.random.default_rng(0))
    assert not b.i_r.any()


def test_outage_standard_error_is_binomial():
    est = mc_outage(CFG, Protocol.ts(0.3), 6.3, 200000, seed=5)
    expected = math.sqrt(est.mean * (1 - est.mean) / est.trials)
    assert est.std_error == pytest.approx(expected, rel=1e-4)


def test_throughput_scaling():
    proto = Protocol.ts(0.3)
    erg = mc_ergodic(CFG, proto, 20000, seed=9)
    t = mc_throughput(CFG, proto, Metric.ERGODIC, 6.3, 20000, seed=9)
    assert t.mean == pytest.approx(0.7 * erg.mean)
    assert t.std_error == pytest.approx(0.7 * erg.std_error)
    out = mc_outage(CFG, proto, 6.3, 20000, seed=9)
    t_out = mc_throughput(CFG, proto, "outage", 6.3, 20000, seed=9)
    assert t_out.mean == pytest.approx(0.7 * (1 - out.mean) * 0.5 * math.log2(7.3))


@pytest.mark.parametrize("kwargs", [dict(trials=999), dict(seed=-1), dict(seed=2**64)])
def test_estimator_arguments(kwargs):
    args = dict(trials=5000, seed=1) | kwargs
    with pytest.raises(DomainError):
        run_estimator(CFG, Protocol.ts(0.5), lambda b: b.gamma_h, **args)


@pytest.mark.parametrize("ratio", [0.0, 1.0])
def test_sampling_rejects_degenerate_ratio(ratio):
    with pytest.raises(DomainError):
        mc_outage(CFG, Protocol.ps(ratio), 6.3, 5000, seed=1)


@given(st.integers(1000, 3 * BLOCK_SIZE), st.integers(0, 2**32), st.integers(2, 5))
def test_worker_count_never_matters(trials, seed, workers):
    proto = Protocol.ps(0.6)
    assert mc_ergodic(CFG, proto, trials, seed) == mc_ergodic(CFG, proto, trials, seed, workers)
