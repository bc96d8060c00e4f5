"""Command-line front end.

SNR, SIR and the outage threshold are given in dB on the command line and
converted to linear once, here.  Presets fix the noise variances and mean
channel gains to one, so ``--snr-db`` sets the source power and ``--sir-db``
sets the aggregate interference power, split over interferers by ``--mu``.

Every subcommand writes a CSV (to ``--out`` or stdout) and a one-line summary
that always includes the seed.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import math
import sys
from dataclasses import dataclass
from typing import Iterable, Sequence

from . import figures
from .analysis import metric_value, optimize_ratio, schur_order_check
from .capacity_metrics import Metric, ergodic_capacity, outage_capacity
from .errors import ConditioningError, DomainError, QuadratureError
from .link_model import OutageMethod, Protocol, Variant, effective_params, outage_probability
from .monte_carlo import mc_ergodic, mc_outage, mc_throughput
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

FIGURES = (2, 3, 4, 5, 6, 7)


@dataclass
class RunConfig:
    """Resolved run settings; dB fields stay in dB until :meth:`channel` is called."""

    protocol: str = "ts"
    ratio: float | None = None
    snr_db: float = FIGURE_SNR_DB
    sir_db: float | None = None  # None: 10 dB, or the three preset SIRs for figures 2-5
    gamma_th_db: float = GAMMA_TH_DB
    eta: float = 1.0
    mu: tuple[float, ...] = MU_HAT
    metric: str = "both"
    trials: int = 1_000_000
    seed: int = 42
    workers: int = 1
    tol: float = 1e-4
    snr_grid: tuple[float, ...] | None = None
    ratio_grid: tuple[float, ...] = RATIO_GRID
    vectors: tuple[tuple[float, ...], ...] = SCHUR_VECTORS
    out: str | None = None
    validate: bool = False

    @property
    def variant(self) -> Variant:
        return Variant(self.protocol)

    @property
    def resolved_ratio(self) -> float:
        if self.ratio is not None:
            return self.ratio
        return SCHUR_ALPHA if self.variant is Variant.TS else SCHUR_THETA

    @property
    def sir(self) -> float:
        return SCHUR_SIR_DB if self.sir_db is None else self.sir_db

    @property
    def figure_sirs(self) -> tuple[float, ...]:
        return FIGURE_SIR_DB if self.sir_db is None else (self.sir_db,)

    @property
    def gamma_th(self) -> float:
        return db_to_linear(self.gamma_th_db)

    @property
    def metrics(self) -> tuple[Metric, ...]:
        if self.metric == "both":
            return (Metric.ERGODIC, Metric.OUTAGE)
        return (Metric(self.metric),)

    def channel(self):
        return preset_config(self.snr_db, self.sir, self.mu, self.eta)

    def proto(self) -> Protocol:
        return Protocol(self.variant, self.resolved_ratio)


# --------------------------------------------------------------------------
# parsing


def _float_list(text: str) -> tuple[float, ...]:
    text = text.strip()
    if not text or text.lower() == "none":
        return ()
    try:
        return tuple(float(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated list of numbers, got {text!r}")


def _vector_list(text: str) -> tuple[tuple[float, ...], ...]:
    return tuple(_float_list(part) for part in text.split(";"))


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("run settings (flags override --config values)")
    g.add_argument("--config", help="JSON object with any of the settings below (use underscores)")
    g.add_argument("--protocol", choices=("ts", "ps"))
    g.add_argument("--ratio", type=float, help="alpha (TS) or theta (PS); default 0.2 / 0.6")
    g.add_argument("--snr-db", type=float, help="first-hop SNR P_S/sigma_R^2 in dB (default 20)")
    g.add_argument("--sir-db", type=float, help="P_S / sum(P_i) in dB (default 10)")
    g.add_argument("--gamma-th-db", type=float, help="outage threshold in dB (default 8)")
    g.add_argument("--eta", type=float, help="energy conversion efficiency (default 1)")
    g.add_argument("--mu", type=_float_list,
                   help="interference power shares, e.g. 0.6,0.4; empty for no interference")
    g.add_argument("--metric", choices=("ergodic", "outage", "both"))
    g.add_argument("--trials", type=int, help="Monte Carlo trials (default 1e6)")
    g.add_argument("--seed", type=int, help="Monte Carlo seed (default 42)")
    g.add_argument("--workers", type=int, help="parallel workers; results do not depend on it")
    g.add_argument("--tol", type=float, help="optimizer bracket width (default 1e-4)")
    g.add_argument("--snr-grid", type=_float_list, help="SNR grid in dB (default 0,5,...,30)")
    g.add_argument("--ratio-grid", type=_float_list,
                   help="ratio grid for sweeps (default 0.01,0.02,...,0.99)")
    g.add_argument("--vectors", type=_vector_list,
                   help="share vectors for `schur`, e.g. '1,0;0.5,0.5'")
    g.add_argument("--out", help="CSV path (default stdout)")
    g.add_argument("--validate", action="store_true", default=None,
                   help="add Monte Carlo columns with standard errors")

    parser = argparse.ArgumentParser(
        prog="ehrelay",
        description="Throughput of an energy-harvesting decode-and-forward relay "
                    "with co-channel interference. Presets use unit noise variances "
                    "and unit mean channel gains.")
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "outage": "outage probability, outage capacity and outage throughput",
        "ergodic": "ergodic capacity and ergodic throughput",
        "sweep": "throughput over a grid of harvesting ratios",
        "optimize": "throughput-maximizing ratio",
        "compare-protocols": "optimal TS vs PS throughput over an SNR grid",
        "schur": "check the majorization ordering of throughput",
        "mc-validate": "closed forms against Monte Carlo",
    }
    for name, text in helps.items():
        sub.add_parser(name, parents=[common], help=text, description=text)
    fig = sub.add_parser("figure", parents=[common], help="figure-reproduction presets",
                         description="figure-reproduction presets (M=2, shares 0.6,0.4, "
                                     "threshold 8 dB, eta 1)")
    fig.add_argument("number", type=int, choices=FIGURES)
    return parser


def _load_config(path: str) -> dict:
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise DomainError(f"{path}: config must be a JSON object")
    fields = {f.name for f in dataclasses.fields(RunConfig)}
    out = {}
    for key, value in data.items():
        name = key.replace("-", "_")
        if name not in fields:
            raise DomainError(f"{path}: unknown setting {key!r}")
        if name in ("mu", "snr_grid", "ratio_grid"):
            value = _float_list(value) if isinstance(value, str) else tuple(map(float, value))
        elif name == "vectors":
            value = (_vector_list(value) if isinstance(value, str)
                     else tuple(tuple(map(float, v)) for v in value))
        out[name] = value
    return out


def resolve(args: argparse.Namespace) -> RunConfig:
    values = _load_config(args.config) if args.config else {}
    for f in dataclasses.fields(RunConfig):
        flag = getattr(args, f.name, None)
        if flag is not None:
            values[f.name] = flag
    cfg = RunConfig(**values)
    if cfg.protocol not in ("ts", "ps"):
        raise DomainError(f"protocol must be ts or ps, got {cfg.protocol!r}")
    if cfg.metric not in ("ergodic", "outage", "both"):
        raise DomainError(f"metric must be ergodic, outage or both, got {cfg.metric!r}")
    if cfg.workers < 1:
        raise DomainError(f"workers must be >= 1, got {cfg.workers}")
    return cfg


# --------------------------------------------------------------------------
# output


def _format(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)  # shortest round-trip form, always with '.'
    if isinstance(value, (tuple, list)):
        return " ".join(_format(v) for v in value)
    return str(value)


def write_csv(rows: Sequence[dict], stream) -> None:
    if not rows:
        return
    header = list(rows[0])
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_format(row[k]) for k in header])


# --------------------------------------------------------------------------
# subcommands; each returns (rows, summary)


def _point(cfg: RunConfig) -> dict:
    return {"protocol": cfg.protocol, "ratio": cfg.resolved_ratio, "snr_db": cfg.snr_db,
            "sir_db": cfg.sir}


def cmd_outage(cfg: RunConfig):
    p = effective_params(cfg.channel(), cfg.proto())
    try:
        closed = outage_probability(p, cfg.gamma_th, OutageMethod.CLOSED_FORM)
    except ConditioningError:
        closed = math.nan
    integral = outage_probability(p, cfg.gamma_th, OutageMethod.INTEGRAL)
    t_out = metric_value(cfg.channel(), cfg.proto(), Metric.OUTAGE, cfg.gamma_th)[0]
    row = _point(cfg) | {"gamma_th_db": cfg.gamma_th_db, "p_out": closed,
                         "p_out_integral": integral,
                         "c_out": outage_capacity(p, cfg.gamma_th).value, "T_out": t_out}
    if cfg.validate:
        est = mc_outage(cfg.channel(), cfg.proto(), cfg.gamma_th, cfg.trials, cfg.seed, cfg.workers)
        row |= {"p_out_mc": est.mean, "p_out_mc_se": est.std_error}
    return [row], f"P_out={integral:.6g} T_out={t_out:.6g}"


def cmd_ergodic(cfg: RunConfig):
    p = effective_params(cfg.channel(), cfg.proto())
    cap = ergodic_capacity(p)
    t_erg = metric_value(cfg.channel(), cfg.proto(), Metric.ERGODIC, cfg.gamma_th)[0]
    row = _point(cfg) | {"c_erg": cap.value, "c_erg_err": cap.est_error, "T_erg": t_erg}
    if cfg.validate:
        est = mc_throughput(cfg.channel(), cfg.proto(), Metric.ERGODIC, cfg.gamma_th,
                            cfg.trials, cfg.seed, cfg.workers)
        row |= {"T_erg_mc": est.mean, "T_erg_mc_se": est.std_error}
    return [row], f"C_erg={cap.value:.6g} T_erg={t_erg:.6g}"


def cmd_sweep(cfg: RunConfig):
    rows = figures.ratio_sweep_rows(
        cfg.variant, (cfg.sir,), cfg.snr_db, cfg.ratio_grid, cfg.gamma_th_db, cfg.mu, cfg.eta,
        cfg.validate, cfg.trials, cfg.seed, cfg.workers)
    keep = {"T_erg"} if cfg.metric == "ergodic" else {"T_out"} if cfg.metric == "outage" else None
    if keep is not None:
        drop = {"T_erg", "T_out"} - keep
        rows = [{k: v for k, v in r.items() if not any(k.startswith(d) for d in drop)}
                for r in rows]
    name = figures.RATIO_NAME[cfg.variant]
    parts = []
    for col in ("T_erg", "T_out"):
        if col in rows[0]:
            best = max(rows, key=lambda r: r[col])
            parts.append(f"max {col}={best[col]:.6g} at {name}={best[name]:g}")
    return rows, "; ".join(parts)


def cmd_optimize(cfg: RunConfig):
    rows = []
    for metric in cfg.metrics:
        opt = optimize_ratio(cfg.channel(), cfg.variant, metric, cfg.gamma_th, cfg.tol)
        row = {"protocol": cfg.protocol, "metric": metric.value, "snr_db": cfg.snr_db,
               "sir_db": cfg.sir, "opt_ratio": opt.ratio, "opt_T": opt.value,
               "multimodal": opt.multimodal}
        if cfg.validate:
            est = mc_throughput(cfg.channel(), Protocol(cfg.variant, opt.ratio), metric,
                                cfg.gamma_th, cfg.trials, cfg.seed, cfg.workers)
            row |= {"opt_T_mc": est.mean, "opt_T_mc_se": est.std_error}
        rows.append(row)
    summary = "; ".join(f"{r['metric']}: ratio={r['opt_ratio']:.5f} T={r['opt_T']:.6g}"
                        for r in rows)
    return rows, summary


def cmd_compare(cfg: RunConfig):
    metric = Metric.ERGODIC if cfg.metric == "both" else Metric(cfg.metric)
    rows = figures.optimal_rows(
        metric, cfg.snr_grid or SNR_GRID_DB, (cfg.sir,), cfg.gamma_th_db, cfg.mu, cfg.eta,
        cfg.tol, cfg.validate, cfg.trials, cfg.seed, cfg.workers)
    ps_wins = [r["snr_db"] for r in rows if r["opt_T_ps"] > r["opt_T_ts"]]
    return rows, f"{metric.value}: PS ahead at snr_db={ps_wins or 'none'}"


def cmd_schur(cfg: RunConfig):
    base = cfg.channel()
    if not base.num_interferers:
        raise DomainError("schur needs at least one interferer (--mu)")
    rows = []
    for snr in cfg.snr_grid or (cfg.snr_db,):
        cfg_snr = dataclasses.replace(cfg, snr_db=snr).channel()
        for metric in cfg.metrics:
            report = schur_order_check(cfg_snr, cfg.vectors, cfg.proto(), metric, cfg.gamma_th)
            for pair in report.pairs:
                rows.append({"protocol": cfg.protocol, "ratio": cfg.resolved_ratio,
                             "metric": metric.value, "snr_db": snr,
                             "major": report.vectors[pair.major],
                             "minor": report.vectors[pair.minor],
                             "major_value": pair.major_value, "minor_value": pair.minor_value,
                             "passed": pair.passed})
    failed = sum(not r["passed"] for r in rows)
    return rows, f"{len(rows) - failed}/{len(rows)} majorization pairs ordered"


def cmd_mc_validate(cfg: RunConfig):
    channel, proto = cfg.channel(), cfg.proto()
    p = effective_params(channel, proto)
    checks = [
        ("p_out", outage_probability(p, cfg.gamma_th, OutageMethod.INTEGRAL),
         mc_outage(channel, proto, cfg.gamma_th, cfg.trials, cfg.seed, cfg.workers)),
        ("c_erg", ergodic_capacity(p).value,
         mc_ergodic(channel, proto, cfg.trials, cfg.seed, cfg.workers)),
    ]
    rows = []
    for name, analytic, est in checks:
        z = (analytic - est.mean) / est.std_error if est.std_error > 0 else 0.0
        rows.append(_point(cfg) | {"quantity": name, "analytic": analytic,
                                   "mc_mean": est.mean, "mc_std_error": est.std_error,
                                   "z_score": z, "trials": est.trials, "seed": est.seed})
    worst = max(abs(r["z_score"]) for r in rows)
    return rows, f"max |analytic - MC| = {worst:.2f} standard errors"


def cmd_figure(cfg: RunConfig, number: int):
    common = dict(validate=cfg.validate, trials=cfg.trials, seed=cfg.seed, workers=cfg.workers)
    if number in (2, 3):
        variant = Variant.TS if number == 2 else Variant.PS
        rows = figures.ratio_sweep_rows(variant, cfg.figure_sirs, cfg.snr_db, cfg.ratio_grid, cfg.gamma_th_db,
                                        cfg.mu, cfg.eta, **common)
        name = figures.RATIO_NAME[variant]
        best = {}
        for r in rows:
            if r["T_erg"] > best.get(r["sir_db"], (0, -1))[1]:
                best[r["sir_db"]] = (r[name], r["T_erg"])
        summary = "argmax " + ", ".join(f"sir_db={s:g}: {name}={a:g}" for s, (a, _) in best.items())
    elif number in (4, 5):
        metric = Metric.ERGODIC if number == 4 else Metric.OUTAGE
        rows = figures.optimal_rows(metric, cfg.snr_grid or SNR_GRID_DB, cfg.figure_sirs, cfg.gamma_th_db,
                                    cfg.mu, cfg.eta, cfg.tol, **common)
        summary = f"{len(rows)} optimal-ratio points for {metric.value}"
    else:
        variant = Variant.TS if number == 6 else Variant.PS
        rows = figures.distribution_rows(variant, cfg.snr_grid or SNR_GRID_DB, cfg.sir,
                                         cfg.ratio, cfg.vectors, cfg.gamma_th_db, cfg.eta,
                                         **common)
        summary = f"{len(rows)} SNR points, {len(cfg.vectors)} share vectors"
    return rows, summary


HANDLERS = {
    "outage": cmd_outage,
    "ergodic": cmd_ergodic,
    "sweep": cmd_sweep,
    "optimize": cmd_optimize,
    "compare-protocols": cmd_compare,
    "schur": cmd_schur,
    "mc-validate": cmd_mc_validate,
}


def main(argv: Iterable[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve(args)
        if args.command == "figure":
            rows, summary = cmd_figure(cfg, args.number)
        else:
            rows, summary = HANDLERS[args.command](cfg)
    except (DomainError, ConditioningError, QuadratureError, ValueError, OSError) as exc:
        print(f"ehrelay {args.command}: error: {exc}", file=sys.stderr)
        return 1
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8", newline="") as fh:
            write_csv(rows, fh)
        report = sys.stdout
    else:
        write_csv(rows, sys.stdout)
        report = sys.stderr
    label = f"figure {args.number}" if args.command == "figure" else args.command
    print(f"{label}: {summary} (seed={cfg.seed}, trials={cfg.trials})", file=report)
    return 0


if __name__ == "__main__":
    sys.exit(main())
