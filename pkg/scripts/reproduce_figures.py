"""Write the CSV tables behind figures 2-7 into an output directory.

    python scripts/reproduce_figures.py --out results
    python scripts/reproduce_figures.py --figures 6 7 --validate --trials 200000
"""

from __future__ import annotations

import argparse
import csv
import time
from dataclasses import dataclass
from pathlib import Path

from ehrelay import figures
from ehrelay.capacity_metrics import Metric
from ehrelay.link_model import Variant


@dataclass
class FigureRun:
    out: Path = Path("results")
    figures: tuple[int, ...] = (2, 3, 4, 5, 6, 7)
    validate: bool = False
    trials: int = 1_000_000
    seed: int = 42
    workers: int = 1


def rows_for(number: int, run: FigureRun) -> list[dict]:
    common = dict(validate=run.validate, trials=run.trials, seed=run.seed, workers=run.workers)
    if number in (2, 3):
        return figures.ratio_sweep_rows(Variant.TS if number == 2 else Variant.PS, **common)
    if number in (4, 5):
        return figures.optimal_rows(Metric.ERGODIC if number == 4 else Metric.OUTAGE, **common)
    return figures.distribution_rows(Variant.TS if number == 6 else Variant.PS, **common)


def write_rows(path: Path, rows: list[dict]) -> None:
    with path.open("w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(rows[0]), lineterminator="\n")
        writer.writeheader()
        writer.writerows({k: repr(v) if isinstance(v, float) else v for k, v in r.items()}
                         for r in rows)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", type=Path, default=FigureRun.out)
    parser.add_argument("--figures", type=int, nargs="+", choices=range(2, 8),
                        default=list(FigureRun.figures))
    parser.add_argument("--validate", action="store_true", help="add Monte Carlo columns")
    parser.add_argument("--trials", type=int, default=FigureRun.trials)
    parser.add_argument("--seed", type=int, default=FigureRun.seed)
    parser.add_argument("--workers", type=int, default=FigureRun.workers)
    args = parser.parse_args()
    run = FigureRun(args.out, tuple(args.figures), args.validate, args.trials, args.seed,
                    args.workers)

    run.out.mkdir(parents=True, exist_ok=True)
    for number in run.figures:
        start = time.perf_counter()
        rows = rows_for(number, run)
        path = run.out / f"figure{number}.csv"
        write_rows(path, rows)
        print(f"figure {number}: {len(rows)} rows -> {path} ({time.perf_counter() - start:.1f}s)")


if __name__ == "__main__":
    main()
