"""Monte Carlo oracle that samples the physical channel model directly.

Trials are generated in fixed-size blocks.  Block ``k`` draws from its own
PCG64 stream seeded by ``SeedSequence(seed, spawn_key=(k,))``, and block
statistics are merged in block order, so an estimate depends only on
``(cfg, proto, trials, seed)`` and never on how many workers ran the blocks.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .capacity_metrics import Metric
from .errors import DomainError
from .link_model import ChannelConfig, Protocol, Variant, first_hop_scale, harvest_scale

BLOCK_SIZE = 1 << 16
MIN_TRIALS = 1000


@dataclass(frozen=True)
class MonteCarloEstimate:
    mean: float
    std_error: float
    trials: int
    seed: int


@dataclass(frozen=True)
class TrialDraw:
    gamma_h: float
    i_r: float
    w: float
    gamma_sr: float
    gamma_rd: float


@dataclass(frozen=True)
class TrialBatch:
    """Column-wise version of :class:`TrialDraw` for a block of trials."""

    gamma_h: np.ndarray
    i_r: np.ndarray
    w: np.ndarray

    @property
    def gamma_sr(self) -> np.ndarray:
        return self.gamma_h / (1.0 + self.i_r)

    @property
    def gamma_rd(self) -> np.ndarray:
        return self.w * (self.gamma_h + self.i_r)

    def __len__(self) -> int:
        return len(self.gamma_h)


def _exponential(rng: np.random.Generator, mean, size) -> np.ndarray:
    # inverse transform; rng.random() lies in [0, 1) so log1p(-u) is finite
    return -np.asarray(mean) * np.log1p(-rng.random(size))


def _check_proto(proto: Protocol) -> None:
    if not 0.0 < proto.ratio < 1.0:
        raise DomainError(f"sampling needs a ratio inside (0, 1), got {proto.ratio}")


def sample_trials(
    cfg: ChannelConfig, proto: Protocol, n: int, rng: np.random.Generator
) -> TrialBatch:
    """Draw ``n`` independent channel realizations.

    ``|h|^2``, ``|g|^2`` and every ``|beta_i|^2`` are exponential with the
    configured mean gains, drawn in that order.
    """
    _check_proto(proto)
    h2 = _exponential(rng, cfg.mean_gain_sr, n)
    g2 = _exponential(rng, cfg.mean_gain_rd, n)
    s = first_hop_scale(cfg, proto)
    gamma_h = s * cfg.source_power * h2
    if cfg.num_interferers:
        beta2 = _exponential(rng, np.asarray(cfg.mean_gain_interferers), (n, cfg.num_interferers))
        i_r = s * (beta2 @ np.asarray(cfg.interferer_powers))
    else:
        i_r = np.zeros(n)
    w = harvest_scale(cfg, proto) * g2
    return TrialBatch(gamma_h, i_r, w)


def sample_trial(cfg: ChannelConfig, proto: Protocol, rng: np.random.Generator) -> TrialDraw:
    b = sample_trials(cfg, proto, 1, rng)
    return TrialDraw(float(b.gamma_h[0]), float(b.i_r[0]), float(b.w[0]),
                     float(b.gamma_sr[0]), float(b.gamma_rd[0]))


def block_rng(seed: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(block,))))


def _block_stats(cfg, proto, statistic, seed, block, size):
    values = statistic(sample_trials(cfg, proto, size, block_rng(seed, block)))
    mean = float(values.mean())
    return size, mean, float(np.sum((values - mean) ** 2))


def run_estimator(
    cfg: ChannelConfig,
    proto: Protocol,
    statistic: Callable[[TrialBatch], np.ndarray],
    trials: int,
    seed: int,
    workers: int = 1,
) -> MonteCarloEstimate:
    """Mean and standard error of ``statistic`` over ``trials`` draws."""
    if trials < MIN_TRIALS:
        raise DomainError(f"need at least {MIN_TRIALS} trials, got {trials}")
    if not 0 <= seed < 2**64:
        raise DomainError(f"seed must be a 64-bit unsigned integer, got {seed}")
    _check_proto(proto)
    sizes = [BLOCK_SIZE] * (trials // BLOCK_SIZE)
    if trials % BLOCK_SIZE:
        sizes.append(trials % BLOCK_SIZE)

    def job(k):
        return _block_stats(cfg, proto, statistic, seed, k, sizes[k])

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            stats = list(pool.map(job, range(len(sizes))))
    else:
        stats = [job(k) for k in range(len(sizes))]

    # pairwise merge of (count, mean, M2) in block order
    n, mean, m2 = stats[0]
    for nb, mb, m2b in stats[1:]:
        total = n + nb
        delta = mb - mean
        mean += delta * nb / total
        m2 += m2b + delta * delta * n * nb / total
        n = total
    variance = m2 / (n - 1)
    return MonteCarloEstimate(mean, math.sqrt(variance / n), n, seed)


def mc_outage(
    cfg: ChannelConfig, proto: Protocol, gamma_th: float, trials: int, seed: int, workers: int = 1
) -> MonteCarloEstimate:
    """Fraction of trials where the relay fails to decode or the destination falls short."""

    def indicator(b: TrialBatch) -> np.ndarray:
        return ((b.gamma_sr <= gamma_th) | (b.gamma_rd <= gamma_th)).astype(float)

    return run_estimator(cfg, proto, indicator, trials, seed, workers)


def mc_ergodic(
    cfg: ChannelConfig, proto: Protocol, trials: int, seed: int, workers: int = 1
) -> MonteCarloEstimate:
    def rate(b: TrialBatch) -> np.ndarray:
        return 0.5 * np.log2(1.0 + np.minimum(b.gamma_sr, b.gamma_rd))

    return run_estimator(cfg, proto, rate, trials, seed, workers)


def _scaled(est: MonteCarloEstimate, factor: float, offset: float = 0.0) -> MonteCarloEstimate:
    return MonteCarloEstimate(offset + factor * est.mean, abs(factor) * est.std_error,
                              est.trials, est.seed)


def mc_throughput(
    cfg: ChannelConfig,
    proto: Protocol,
    metric: Metric | str,
    gamma_th: float,
    trials: int,
    seed: int,
    workers: int = 1,
) -> MonteCarloEstimate:
    """Simulated ergodic or outage throughput, including the TS time penalty."""
    share = 1.0 - proto.ratio if proto.variant is Variant.TS else 1.0
    if Metric(metric) is Metric.ERGODIC:
        return _scaled(mc_ergodic(cfg, proto, trials, seed, workers), share)
    rate = 0.5 * math.log2(1.0 + gamma_th)
    est = mc_outage(cfg, proto, gamma_th, trials, seed, workers)
    return _scaled(est, -share * rate, share * rate)
