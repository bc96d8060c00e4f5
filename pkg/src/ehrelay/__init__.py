"""Throughput analysis of an energy-harvesting decode-and-forward relay with co-channel interference."""

from .analysis import (
    RatioOptimum,
    SchurReport,
    SweepResult,
    majorizes,
    optimize_ratio,
    schur_order_check,
    sweep_ratio,
)
from .capacity_metrics import (
    CapacityResult,
    Method,
    Metric,
    ergodic_capacity,
    evaluate_throughput,
    outage_capacity,
    throughput,
)
from .errors import ConditioningError, DomainError, QuadratureError
from .interference_mixture import CharDecomp, characteristic_decomposition
from .link_model import (
    ChannelConfig,
    EffectiveParams,
    OutageMethod,
    Protocol,
    Variant,
    effective_params,
    outage_probability,
    outage_probability_auto,
)
from .monte_carlo import MonteCarloEstimate, mc_ergodic, mc_outage, mc_throughput

__version__ = "0.1.0"
