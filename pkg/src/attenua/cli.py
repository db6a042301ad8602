"""Command-line entry point for running scenarios and ray checks."""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .errors import AttenuaError, ConfigError
from .scenarios import list_scenarios, load_scenario, run_scenario


def _resolve_out(args) -> Path:
    env = os.environ.get("ATTENUA_OUT")
    return Path(env) if env else Path(args.out)


def _apply_threads(n: int | None) -> None:
    if n is None:
        return
    for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS",
                "NUMEXPR_NUM_THREADS"):
        os.environ[var] = str(n)


def _print_manifest(m) -> None:
    print(f"scenario {m.scenario} [{m.mode}]  wall {m.wall_time_s:.2f}s")
    if m.error:
        print(f"  ERROR: {m.error}")
    for v in m.verdicts:
        name = v.get("name") or v.get("quantity", "?")
        status = v.get("status", "VERIFIED")
        mark = "PASS" if v.get("pass") else "FAIL"
        print(f"  [{mark}] {name} ({status})")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="attenua",
        description="damped-wave decay laboratory: simulations, ray control "
                    "checks, and decay-rate certificates")
    p.add_argument("--out", default="out", help="output directory "
                   "(env ATTENUA_OUT overrides)")
    p.add_argument("--threads", type=int, default=None,
                   help="cap BLAS/OpenMP thread counts")
    p.add_argument("--seed", type=int, default=None,
                   help="override the scenario RNG seed")
    sub = p.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run one scenario end to end")
    run_p.add_argument("config", help="builtin scenario name or INI file path")

    gcc_p = sub.add_parser("gcc", help="ray-based control check only")
    gcc_p.add_argument("config", help="builtin scenario name or INI file path")

    suite_p = sub.add_parser("suite", help="run every *.ini config in a directory")
    suite_p.add_argument("dir", help="directory of scenario INI files")

    sub.add_parser("list", help="list builtin scenario names")
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    _apply_threads(args.threads)
    try:
        if args.command == "list":
            for name in list_scenarios():
                print(name)
            return 0

        out = _resolve_out(args)
        if args.command in ("run", "gcc"):
            cfg = load_scenario(args.config)
            if args.command == "gcc":
                import copy
                cfg = copy.deepcopy(cfg)
                cfg.mode = "gcc"
            manifest = run_scenario(cfg, out, seed=args.seed)
            _print_manifest(manifest)
            return 0 if manifest.all_passed else 1

        # suite
        d = Path(args.dir)
        if not d.is_dir():
            raise ConfigError(f"{args.dir!r} is not a directory")
        configs = sorted(d.glob("*.ini"))
        if not configs:
            raise ConfigError(f"no *.ini files in {args.dir!r}")
        ok = True
        for f in configs:
            cfg = load_scenario(str(f))
            manifest = run_scenario(cfg, out, seed=args.seed)
            _print_manifest(manifest)
            ok = ok and manifest.all_passed
        return 0 if ok else 1
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except AttenuaError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
