#!/usr/bin/env python3
"""Map the pump-pump correlation over cavity decay and bath temperature and
report, per decay value, the highest temperature still below the bound."""
import argparse
from collections import defaultdict
from pathlib import Path

from omsim import emit_gnuplot_script, load_config, run_sweep, write_csv

ROOT = Path(__file__).resolve().parent.parent


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument(
        "--config", type=Path, default=ROOT / "configs" / "temperature_decay_grid.yaml"
    )
    parser.add_argument("--out-dir", type=Path, default=ROOT / "results")
    parser.add_argument("--threads", type=int, default=None)
    args = parser.parse_args()

    spec = load_config(args.config).sweep
    rows = run_sweep(spec, threads=args.threads)
    args.out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = args.out_dir / "temperature_decay_grid.csv"
    write_csv(rows, spec, csv_path)
    emit_gnuplot_script(spec, csv_path, csv_path.with_suffix(".gp"))

    print(f"{len(rows)} points -> {csv_path}")
    survival: dict[float, float] = defaultdict(lambda: float("nan"))
    for row in rows:
        corr = row.correlations[0]
        if row.stable and corr is not None and corr.value < 2.0:
            current = survival[row.axis1]
            if not current == current or row.axis2 > current:
                survival[row.axis1] = row.axis2
    for decay in sorted({r.axis1 for r in rows}):
        temp = survival.get(decay)
        status = f"below bound up to T = {temp:g} K" if temp is not None else "never below bound"
        print(f"decay = {decay:.3f} * base: {status}")


if __name__ == "__main__":
    main()
