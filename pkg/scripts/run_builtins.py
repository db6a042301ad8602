#!/usr/bin/env python3
"""Run every builtin scenario and print a one-line verdict summary.

Usage: python3 scripts/run_builtins.py [--out DIR] [--seed N]
"""

import argparse
import sys
import time

from attenua.scenarios import builtin_scenarios, run_scenario


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="out/builtins")
    ap.add_argument("--seed", type=int, default=None)
    args = ap.parse_args()

    failed = []
    for name, cfg in builtin_scenarios().items():
        t0 = time.perf_counter()
        manifest = run_scenario(cfg, args.out, seed=args.seed)
        wall = time.perf_counter() - t0
        ok = manifest.error is None and manifest.all_passed
        print(f"{'PASS' if ok else 'FAIL':4s}  {name:18s}  {wall:6.1f}s  "
              f"{manifest.error or ''}")
        if not ok:
            failed.append(name)
    if failed:
        print(f"failed: {', '.join(failed)}")
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
