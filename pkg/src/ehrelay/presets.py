"""Reference scenarios used by the figure-reproduction commands.

Noise variances and mean channel gains are fixed to one, so the first-hop
SNR sets the source power and the SIR sets the aggregate interference power:

    P_S = snr,  sum_i P_i = P_S / sir,  P_i proportional to mu_hat_i.
"""

from __future__ import annotations

import math
from typing import Sequence

from .errors import DomainError
from .link_model import ChannelConfig

GAMMA_TH_DB = 8.0
EFFICIENCY = 1.0
MU_HAT = (0.6, 0.4)
SCHUR_VECTORS = (
    (1.0, 0.0, 0.0, 0.0, 0.0),
    (0.6, 0.4, 0.0, 0.0, 0.0),
    (0.2, 0.2, 0.2, 0.2, 0.2),
)
FIGURE_SNR_DB = 20.0
FIGURE_SIR_DB = (5.0, 10.0, 15.0)
SCHUR_SIR_DB = 10.0
SCHUR_ALPHA = 0.2
SCHUR_THETA = 0.6
SNR_GRID_DB = tuple(float(s) for s in range(0, 35, 5))
RATIO_GRID = tuple(round(0.01 * k, 2) for k in range(1, 100))


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


def linear_to_db(x: float) -> float:
    return 10.0 * math.log10(x)


def preset_config(
    snr_db: float,
    sir_db: float,
    mu_hat: Sequence[float] = MU_HAT,
    efficiency: float = EFFICIENCY,
) -> ChannelConfig:
    """Preset link; an empty ``mu_hat`` gives an interference-free relay."""
    source_power = db_to_linear(snr_db)
    powers: tuple[float, ...] = ()
    if len(mu_hat):
        total = source_power / db_to_linear(sir_db)
        weight = sum(mu_hat)
        if weight <= 0:
            raise DomainError("interference shares must have a positive sum")
        powers = tuple(total * m / weight for m in mu_hat)
    return ChannelConfig(source_power=source_power, interferer_powers=powers,
                         efficiency=efficiency)
