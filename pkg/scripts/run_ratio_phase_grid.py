#!/usr/bin/env python3
"""Map the pump-pump correlation over pump power ratio and relative drive
phase; print the global minimum and the unstable fraction."""
import argparse
from pathlib import Path

from omsim import emit_gnuplot_script, load_config, run_sweep, write_csv

ROOT = Path(__file__).resolve().parent.parent


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument(
        "--config", type=Path, default=ROOT / "configs" / "ratio_phase_grid.yaml"
    )
    parser.add_argument("--out-dir", type=Path, default=ROOT / "results")
    parser.add_argument("--threads", type=int, default=None)
    args = parser.parse_args()

    spec = load_config(args.config).sweep
    rows = run_sweep(spec, threads=args.threads)
    args.out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = args.out_dir / "ratio_phase_grid.csv"
    write_csv(rows, spec, csv_path)
    emit_gnuplot_script(spec, csv_path, csv_path.with_suffix(".gp"))

    stable = [r for r in rows if r.stable and r.correlations[0] is not None]
    print(f"{len(rows)} points, {len(stable)} stable -> {csv_path}")
    if stable:
        best = min(stable, key=lambda r: r.correlations[0].value)
        print(
            f"min V_0m_0p = {best.correlations[0].value:.6f} at "
            f"pump_ratio = {best.axis1:.4f}, phase = {best.axis2:.4f} rad"
        )
    n_unstable = sum(1 for r in rows if r.stable is False)
    print(f"unstable fraction: {n_unstable}/{len(rows)}")


if __name__ == "__main__":
    main()
