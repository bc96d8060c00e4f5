"""Harvesting-ratio sweeps, optimal-ratio search and majorization checks."""

from __future__ import annotations

import itertools
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from .capacity_metrics import Metric, ergodic_capacity, outage_capacity, throughput
from .errors import DomainError
from .link_model import ChannelConfig, Protocol, Variant, effective_params
from .special_functions import DEFAULT_QUADRATURE, QuadratureSettings

log = logging.getLogger(__name__)

COARSE_POINTS = 33
SCHUR_EPSILON = 1e-6
MAJORIZATION_TOLERANCE = 1e-9
_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class SweepResult:
    ratios: tuple[float, ...]
    values: tuple[float, ...]
    metric: Metric
    argmax_ratio: float
    max_value: float


@dataclass(frozen=True)
class RatioOptimum:
    ratio: float
    value: float
    multimodal: bool = False
    coarse_ratios: tuple[float, ...] = field(default=(), repr=False)
    coarse_values: tuple[float, ...] = field(default=(), repr=False)


def metric_value(
    cfg: ChannelConfig,
    proto: Protocol,
    metric: Metric | str,
    gamma_th: float,
    q: QuadratureSettings = DEFAULT_QUADRATURE,
) -> tuple[float, float]:
    """Throughput and its numerical error bound (zero at the ratio endpoints)."""
    metric = Metric(metric)
    if proto.ratio in (0.0, 1.0):
        return 0.0, 0.0
    p = effective_params(cfg, proto)
    cap = ergodic_capacity(p, q) if metric is Metric.ERGODIC else outage_capacity(p, gamma_th)
    share = 1.0 - proto.ratio if proto.variant is Variant.TS else 1.0
    return throughput(proto, cap), share * cap.est_error


def _evaluate_at(args) -> float:
    cfg, variant, r, metric, gamma_th, q = args
    try:
        return metric_value(cfg, Protocol(variant, r), metric, gamma_th, q)[0]
    except Exception as exc:
        raise type(exc)(f"{Variant(variant).value} ratio={r:g}: {exc}") from exc


def sweep_ratio(
    cfg: ChannelConfig,
    variant: Variant | str,
    grid: Sequence[float],
    metric: Metric | str,
    gamma_th: float,
    q: QuadratureSettings = DEFAULT_QUADRATURE,
    workers: int = 1,
) -> SweepResult:
    grid = tuple(float(r) for r in grid)
    if not grid:
        raise DomainError("ratio grid is empty")
    if any(not 0.0 < r < 1.0 for r in grid) or any(b <= a for a, b in zip(grid, grid[1:])):
        raise DomainError("ratio grid must be strictly increasing inside (0, 1)")
    metric = Metric(metric)
    jobs = [(cfg, Variant(variant), r, metric, gamma_th, q) for r in grid]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            values = tuple(pool.map(_evaluate_at, jobs))
    else:
        values = tuple(_evaluate_at(job) for job in jobs)
    k = int(np.argmax(values))
    return SweepResult(grid, values, metric, grid[k], values[k])


def golden_section_max(
    f: Callable[[float], float], a: float, b: float, tol: float
) -> tuple[float, float]:
    """Maximize a unimodal ``f`` on ``[a, b]`` until the bracket is ``<= tol`` wide."""
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = f(d)
    return (c, fc) if fc >= fd else (d, fd)


def count_local_maxima(values: Sequence[float]) -> int:
    v = list(values)
    padded = [-math.inf] + v + [-math.inf]
    return sum(1 for i in range(1, len(padded) - 1)
               if padded[i] > padded[i - 1] and padded[i] > padded[i + 1])


def optimize_ratio(
    cfg: ChannelConfig,
    variant: Variant | str,
    metric: Metric | str,
    gamma_th: float,
    tol: float = 1e-4,
    q: QuadratureSettings = DEFAULT_QUADRATURE,
) -> RatioOptimum:
    """Best harvesting ratio by a 33-point scan followed by golden-section refinement.

    A coarse scan with more than one strict local maximum sets ``multimodal``.
    """
    if not 1e-6 <= tol <= 1e-2:
        raise DomainError(f"tol must lie in [1e-6, 1e-2], got {tol}")
    variant = Variant(variant)
    grid = np.linspace(0.0, 1.0, COARSE_POINTS + 2)[1:-1]
    coarse = sweep_ratio(cfg, variant, grid, metric, gamma_th, q)
    values = coarse.values
    multimodal = count_local_maxima(values) > 1
    if multimodal:
        log.warning("%s %s throughput has several local maxima on the coarse grid",
                    variant.value, Metric(metric).value)
    k = int(np.argmax(values))
    if values[k] <= 0.0:
        return RatioOptimum(grid[k], 0.0, multimodal, coarse.ratios, values)
    lo = grid[k - 1] if k > 0 else 0.0
    hi = grid[k + 1] if k + 1 < len(grid) else 1.0
    r, v = golden_section_max(
        lambda x: _evaluate_at((cfg, variant, x, metric, gamma_th, q)), lo, hi, tol)
    if v < values[k]:
        r, v = grid[k], values[k]
    return RatioOptimum(float(r), float(v), multimodal, coarse.ratios, values)


# --------------------------------------------------------------------------
# majorization


def majorizes(x: Sequence[float], y: Sequence[float]) -> bool:
    """True when ``x`` majorizes ``y`` (prefix-sum dominance with equal totals)."""
    if len(x) != len(y):
        raise DomainError(f"length mismatch: {len(x)} vs {len(y)}")
    xs = np.sort(np.asarray(x, dtype=float))[::-1]
    ys = np.sort(np.asarray(y, dtype=float))[::-1]
    if (xs < 0).any() or (ys < 0).any():
        raise DomainError("majorization is defined for non-negative vectors")
    px, py = np.cumsum(xs), np.cumsum(ys)
    scale = max(abs(px[-1]), abs(py[-1]), 1e-300) if len(xs) else 1.0
    tol = MAJORIZATION_TOLERANCE * scale
    if len(xs) and abs(px[-1] - py[-1]) > tol:
        return False
    return bool(np.all(px >= py - tol))


@dataclass(frozen=True)
class SchurPair:
    major: int
    minor: int
    major_value: float
    minor_value: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.major_value >= self.minor_value - self.tolerance


@dataclass(frozen=True)
class SchurReport:
    vectors: tuple[tuple[float, ...], ...]
    values: tuple[float, ...]
    pairs: tuple[SchurPair, ...]
    incomparable: tuple[tuple[int, int], ...] = ()

    @property
    def passed(self) -> bool:
        return all(pair.passed for pair in self.pairs)


def config_with_distribution(cfg: ChannelConfig, shares: Sequence[float]) -> ChannelConfig:
    """Redistribute the aggregate mean interference power of ``cfg`` by ``shares``."""
    total = sum(p * g for p, g in zip(cfg.interferer_powers, cfg.mean_gain_interferers))
    weight = sum(shares)
    if weight <= 0:
        raise DomainError("interference shares must have a positive sum")
    powers = tuple(total * s / weight for s in shares)
    return replace(cfg, interferer_powers=powers, mean_gain_interferers=(1.0,) * len(powers))


def schur_order_check(
    cfg: ChannelConfig,
    mu_vectors: Sequence[Sequence[float]],
    proto: Protocol,
    metric: Metric | str,
    gamma_th: float,
    q: QuadratureSettings = DEFAULT_QUADRATURE,
) -> SchurReport:
    """Check ``metric(x) >= metric(y)`` for every pair with ``x`` majorizing ``y``.

    Each vector redistributes the aggregate interference power of ``cfg``.
    Vectors that are permutations of each other are compared both ways.
    """
    vectors = tuple(tuple(float(v) for v in vec) for vec in mu_vectors)
    results = [metric_value(config_with_distribution(cfg, v), proto, metric, gamma_th, q)
               for v in vectors]
    pairs, incomparable = [], []
    for i, j in itertools.combinations(range(len(vectors)), 2):
        x, y = vectors[i], vectors[j]
        if len(x) != len(y):
            n = max(len(x), len(y))
            x = x + (0.0,) * (n - len(x))
            y = y + (0.0,) * (n - len(y))
        tol = SCHUR_EPSILON + results[i][1] + results[j][1]
        forward, backward = majorizes(x, y), majorizes(y, x)
        if forward:
            pairs.append(SchurPair(i, j, results[i][0], results[j][0], tol))
        if backward:
            pairs.append(SchurPair(j, i, results[j][0], results[i][0], tol))
        if not forward and not backward:
            incomparable.append((i, j))
    return SchurReport(vectors, tuple(r[0] for r in results), tuple(pairs), tuple(incomparable))
