#!/usr/bin/env python3
"""Sweep the control-region radius for the single-disk geometry and report the
maximal ray entry time as the observation region shrinks toward the damping
threshold radius.

Usage: python3 scripts/gcc_sweep.py [--T 15] [--n-pos 128] [--n-dir 64]
"""

import argparse
import sys

from attenua.rays import RadialOmega, check_gcc
from attenua.scenarios import build_obstacle, builtin_scenarios


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--T", type=float, default=15.0)
    ap.add_argument("--n-pos", type=int, default=128)
    ap.add_argument("--n-dir", type=int, default=64)
    args = ap.parse_args()

    cfg = builtin_scenarios()["gcc_disk"]
    obstacle = build_obstacle(cfg)
    print(f"{'r_star':>8s} {'controlled':>10s} {'max entry time':>15s}")
    for r_star in (2.0, 2.5, 3.0, 3.5, 4.0, 4.5):
        rep = check_gcc(obstacle, RadialOmega(r_star), args.T,
                        args.n_pos, args.n_dir, L=cfg.damping.L,
                        dt_ray=cfg.gcc.dt_ray)
        entry = f"{rep.max_entry_time:.3f}" if rep.controlled else "-"
        print(f"{r_star:8.1f} {str(rep.controlled):>10s} {entry:>15s}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
