"""Row generators for the figure-reproduction presets.

Each function returns a list of dicts with a fixed key order, ready for CSV
output.  ``validate=True`` adds Monte Carlo columns with standard errors.
"""

from __future__ import annotations

from typing import Sequence

from .analysis import config_with_distribution, metric_value, optimize_ratio, sweep_ratio
from .capacity_metrics import Metric
from .link_model import Protocol, Variant
from .monte_carlo import mc_throughput
from .presets import (
    FIGURE_SIR_DB,
    FIGURE_SNR_DB,
    GAMMA_TH_DB,
    MU_HAT,
    RATIO_GRID,
    SCHUR_ALPHA,
    SCHUR_SIR_DB,
    SCHUR_THETA,
    SCHUR_VECTORS,
    SNR_GRID_DB,
    db_to_linear,
    preset_config,
)

RATIO_NAME = {Variant.TS: "alpha", Variant.PS: "theta"}


def _at_point(label: str, fn, *args, **kwargs):
    """Call ``fn`` and prefix any error with the parameter point being evaluated."""
    try:
        return fn(*args, **kwargs)
    except (ArithmeticError, ValueError, RuntimeError) as exc:
        raise type(exc)(f"{label}: {exc}") from exc


def _mc_columns(row, prefix, cfg, proto, metric, gamma_th, trials, seed, workers):
    est = mc_throughput(cfg, proto, metric, gamma_th, trials, seed, workers)
    row[f"{prefix}_mc"] = est.mean
    row[f"{prefix}_mc_se"] = est.std_error


def ratio_sweep_rows(
    variant: Variant | str,
    sir_db: Sequence[float] = FIGURE_SIR_DB,
    snr_db: float = FIGURE_SNR_DB,
    grid: Sequence[float] = RATIO_GRID,
    gamma_th_db: float = GAMMA_TH_DB,
    mu_hat: Sequence[float] = MU_HAT,
    efficiency: float = 1.0,
    validate: bool = False,
    trials: int = 1_000_000,
    seed: int = 42,
    workers: int = 1,
) -> list[dict]:
    """Throughput versus harvesting ratio, one curve per SIR (figures 2 and 3)."""
    variant = Variant(variant)
    gamma_th = db_to_linear(gamma_th_db)
    rows = []
    for sir in sir_db:
        cfg = preset_config(snr_db, sir, mu_hat, efficiency)
        label = f"sir_db={sir:g}"
        erg = _at_point(label, sweep_ratio, cfg, variant, grid, Metric.ERGODIC, gamma_th,
                        workers=workers)
        out = _at_point(label, sweep_ratio, cfg, variant, grid, Metric.OUTAGE, gamma_th,
                        workers=workers)
        for r, te, to in zip(grid, erg.values, out.values):
            row = {"sir_db": sir, RATIO_NAME[variant]: r, "T_erg": te, "T_out": to}
            if validate:
                proto = Protocol(variant, r)
                _mc_columns(row, "T_erg", cfg, proto, Metric.ERGODIC, gamma_th, trials, seed, workers)
                _mc_columns(row, "T_out", cfg, proto, Metric.OUTAGE, gamma_th, trials, seed, workers)
            rows.append(row)
    return rows


def optimal_rows(
    metric: Metric | str,
    snr_grid_db: Sequence[float] = SNR_GRID_DB,
    sir_db: Sequence[float] = FIGURE_SIR_DB,
    gamma_th_db: float = GAMMA_TH_DB,
    mu_hat: Sequence[float] = MU_HAT,
    efficiency: float = 1.0,
    tol: float = 1e-4,
    validate: bool = False,
    trials: int = 1_000_000,
    seed: int = 42,
    workers: int = 1,
) -> list[dict]:
    """Optimal TS and PS throughput versus first-hop SNR (figures 4 and 5)."""
    metric = Metric(metric)
    gamma_th = db_to_linear(gamma_th_db)
    rows = []
    for sir in sir_db:
        for snr in snr_grid_db:
            cfg = preset_config(snr, sir, mu_hat, efficiency)
            label = f"sir_db={sir:g} snr_db={snr:g}"
            ts = _at_point(label, optimize_ratio, cfg, Variant.TS, metric, gamma_th, tol)
            ps = _at_point(label, optimize_ratio, cfg, Variant.PS, metric, gamma_th, tol)
            row = {"sir_db": sir, "snr_db": snr, "opt_T_ts": ts.value, "opt_T_ps": ps.value,
                   "opt_alpha": ts.ratio, "opt_theta": ps.ratio}
            if validate:
                _mc_columns(row, "opt_T_ts", cfg, Protocol.ts(ts.ratio), metric, gamma_th,
                            trials, seed, workers)
                _mc_columns(row, "opt_T_ps", cfg, Protocol.ps(ps.ratio), metric, gamma_th,
                            trials, seed, workers)
            rows.append(row)
    return rows


def distribution_rows(
    variant: Variant | str,
    snr_grid_db: Sequence[float] = SNR_GRID_DB,
    sir_db: float = SCHUR_SIR_DB,
    ratio: float | None = None,
    vectors: Sequence[Sequence[float]] = SCHUR_VECTORS,
    gamma_th_db: float = GAMMA_TH_DB,
    efficiency: float = 1.0,
    validate: bool = False,
    trials: int = 1_000_000,
    seed: int = 42,
    workers: int = 1,
) -> list[dict]:
    """Throughput versus SNR for several interference power distributions (figures 6 and 7)."""
    variant = Variant(variant)
    if ratio is None:
        ratio = SCHUR_ALPHA if variant is Variant.TS else SCHUR_THETA
    proto = Protocol(variant, ratio)
    gamma_th = db_to_linear(gamma_th_db)
    rows = []
    for snr in snr_grid_db:
        base = preset_config(snr, sir_db, vectors[0], efficiency)
        row = {"snr_db": snr}
        combos = [(metric, name, k, config_with_distribution(base, vec))
                  for metric, name in ((Metric.ERGODIC, "T_erg"), (Metric.OUTAGE, "T_out"))
                  for k, vec in enumerate(vectors, start=1)]
        for metric, name, k, cfg in combos:
            row[f"{name}_mu{k}"] = _at_point(
                f"snr_db={snr:g} mu={vectors[k - 1]}", metric_value, cfg, proto, metric,
                gamma_th)[0]
        if validate:
            for metric, name, k, cfg in combos:
                _mc_columns(row, f"{name}_mu{k}", cfg, proto, metric, gamma_th,
                            trials, seed, workers)
        rows.append(row)
    return rows
