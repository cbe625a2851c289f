#!/usr/bin/env python3
"""Emit a plot-ready profile of the real angular wave K_{i ell}(m x) showing
the oscillatory region below the turning point x* = ell/m and the
exponential decay above it.

Usage: wave_profile.py [ell] [mass] [out.csv]
"""

import sys

from entlab.cli import ExperimentConfig, run_experiment


def main() -> int:
    ell = float(sys.argv[1]) if len(sys.argv) > 1 else 8.0
    mass = float(sys.argv[2]) if len(sys.argv) > 2 else 1.0
    out = sys.argv[3] if len(sys.argv) > 3 else f"wave_ell{ell:g}.csv"
    config = ExperimentConfig(experiment="modes", out=out,
                              params={"ell": ell, "mass": mass})
    report = run_experiment(config)
    print(f"wrote {len(report.rows)} samples to {out} "
          f"(turning point x* = {ell / mass:g})")
    return 0 if report.passed else 1


if __name__ == "__main__":
    sys.exit(main())
