#!/usr/bin/env python3
"""Run both solver cross-checks on the reference system at full statistics:
Lyapunov vs frequency-integral covariance, and Monte-Carlo vs
frequency-domain pairwise correlations."""
import argparse
import sys
from pathlib import Path

from omsim.cli import cli_main

ROOT = Path(__file__).resolve().parent.parent


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument(
        "--config", type=Path, default=ROOT / "configs" / "reference_point.yaml"
    )
    parser.add_argument("--seed", type=int, default=None)
    args = parser.parse_args()
    argv = ["verify", "--config", str(args.config)]
    if args.seed is not None:
        argv += ["--seed", str(args.seed)]
    return cli_main(argv)


if __name__ == "__main__":
    sys.exit(main())
