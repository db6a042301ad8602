#!/usr/bin/env python3
"""Energy-balance residual under grid refinement.

Runs the single-disk damped scenario at a sequence of grid spacings, prints the
balance residual |E(T) - E(0) + cumulative dissipation| / E(0) at each level and
the ratio between consecutive levels (expected ~4 for a second-order scheme).

Usage: python3 scripts/refinement_study.py [--t-final 1.5] [--levels 3]
"""

import argparse
import sys
import time

import numpy as np

from attenua.damping import node_values
from attenua.geometry import Grid, build_mask
from attenua.observables import energy_balance_residual
from attenua.scenarios import build_initial, build_obstacle, build_profile, \
    builtin_scenarios
from attenua.simulate import run_simulation
from attenua.solver import cfl_timestep


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--t-final", type=float, default=1.5)
    ap.add_argument("--levels", type=int, default=3)
    ap.add_argument("--h0", type=float, default=1.0 / 16.0)
    args = ap.parse_args()

    cfg = builtin_scenarios()["thm2_disk"]
    obstacle = build_obstacle(cfg)
    profile = build_profile(cfg)

    prev = None
    print(f"{'h':>10s} {'residual':>12s} {'ratio':>7s} {'wall':>8s}")
    for level in range(args.levels):
        h = args.h0 / 2**level
        t0 = time.perf_counter()
        grid = Grid(h=h, r_max=cfg.geometry.r_max)
        mask = build_mask(obstacle, grid)
        a = np.where(mask.fluid, node_values(profile, grid), 0.0)
        data = build_initial(cfg, grid, mask, obstacle,
                             np.random.default_rng(cfg.seed))
        res = run_simulation(grid, mask, a, data, cfl_timestep(grid, 0.45),
                             args.t_final, record_stride=10**9,
                             collect_au2=False)
        s = res.series
        r = energy_balance_residual(s.t, s["E"], s["dissipation_cum"],
                                    float(s.t[-1]))
        wall = time.perf_counter() - t0
        ratio = f"{prev / r:7.2f}" if prev else "      -"
        print(f"{h:10.5f} {r:12.3e} {ratio} {wall:7.1f}s")
        prev = r
    return 0


if __name__ == "__main__":
    sys.exit(main())
