"""Ergodic capacity, outage capacity and protocol throughputs."""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .link_model import (
    ChannelConfig,
    EffectiveParams,
    Protocol,
    Variant,
    effective_params,
    outage_probability_auto,
)
from .special_functions import DEFAULT_QUADRATURE, QuadratureSettings, integrate_interval

log = logging.getLogger(__name__)

ERGODIC_CAP = 1e8


class Method(str, enum.Enum):
    ANALYTIC = "analytic"
    MONTE_CARLO = "monte_carlo"


class Metric(str, enum.Enum):
    ERGODIC = "ergodic_throughput"
    OUTAGE = "outage_throughput"

    @classmethod
    def _missing_(cls, value):
        aliases = {"ergodic": cls.ERGODIC, "outage": cls.OUTAGE}
        return aliases.get(str(value).lower())


@dataclass(frozen=True)
class CapacityResult:
    value: float
    method: Method = Method.ANALYTIC
    est_error: float = 0.0

    def __post_init__(self):
        if self.value < 0 or self.est_error < 0:
            raise ValueError(f"capacity and error must be >= 0, got {self}")


def _tail_bound(p: EffectiveParams, cap: float) -> float:
    # 1 - F_min <= 1 - F_SR <= sum|chi| exp(-g/gbar_h); integrate against 1/(1+g)
    weight = sum(abs(chi) for _, _, chi in p.decomp_a.terms()) if p.mu else 1.0
    return weight * p.gbar_h * math.exp(-cap / p.gbar_h) / cap


def ergodic_capacity(
    p: EffectiveParams, q: QuadratureSettings = DEFAULT_QUADRATURE
) -> CapacityResult:
    """Mean of ``0.5*log2(1 + min(gamma_SR, gamma_RD))`` in bits/s/Hz.

    Integrates ``(1 - F_min(g)) / (1 + g)`` after mapping ``g = u/(1-u)`` onto
    the unit interval; the range is capped at ``g = 1e8`` and the neglected
    tail is bounded and folded into ``est_error``.
    """
    if p.gbar_g == 0.0:
        return CapacityResult(0.0)

    def integrand(u: float) -> float:
        g = u / (1.0 - u)
        return (1.0 - outage_probability_auto(p, g)) / (1.0 - u)

    u_cap = ERGODIC_CAP / (1.0 + ERGODIC_CAP)
    landmarks = [p.gbar_h * f for f in (1e-3, 1e-2, 0.1, 1.0, 10.0, 100.0)]
    points = [g / (1.0 + g) for g in landmarks]
    value, err = integrate_interval(integrand, 0.0, u_cap, q, points=points)
    tail = _tail_bound(p, ERGODIC_CAP)
    if tail > q.relative_tolerance * max(value, 1e-300):
        log.warning("ergodic tail beyond %g may reach %g", ERGODIC_CAP, tail)
    scale = 1.0 / (2.0 * math.log(2.0))
    return CapacityResult(max(value * scale, 0.0), Method.ANALYTIC, (err + tail) * scale)


def outage_capacity(p: EffectiveParams, gamma_th: float) -> CapacityResult:
    """``0.5 * (1 - P_out(gamma_th)) * log2(1 + gamma_th)``."""
    p_out = outage_probability_auto(p, gamma_th)
    return CapacityResult(0.5 * (1.0 - p_out) * math.log2(1.0 + gamma_th))


def throughput(proto: Protocol, c: CapacityResult) -> float:
    if proto.ratio in (0.0, 1.0):
        return 0.0
    if proto.variant is Variant.TS:
        return (1.0 - proto.ratio) * c.value
    return c.value


def evaluate_throughput(
    cfg: ChannelConfig,
    proto: Protocol,
    metric: Metric | str,
    gamma_th: float,
    q: QuadratureSettings = DEFAULT_QUADRATURE,
) -> float:
    """Throughput of ``cfg`` under ``proto``; zero at the ratio endpoints."""
    metric = Metric(metric)
    if proto.ratio in (0.0, 1.0):
        return 0.0
    p = effective_params(cfg, proto)
    if metric is Metric.ERGODIC:
        return throughput(proto, ergodic_capacity(p, q))
    return throughput(proto, outage_capacity(p, gamma_th))


def outage_capacity_sign_changes(p: EffectiveParams, thresholds: Sequence[float]) -> int:
    """Number of sign changes of the discrete derivative of C_out over ``thresholds``.

    Logs a warning when the curve is not unimodal (more than one change).
    """
    values = np.array([outage_capacity(p, g).value for g in thresholds])
    slopes = np.sign(np.diff(values))
    slopes = slopes[slopes != 0]
    changes = int(np.count_nonzero(np.diff(slopes)))
    if changes > 1:
        log.warning("outage capacity has %d slope sign changes; not unimodal", changes)
    return changes

