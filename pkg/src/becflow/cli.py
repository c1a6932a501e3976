"""Command-line front end: check, run, eps-study, k-sweep, bisect, oracles."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import runners
from .config import ConfigError, parse_config
from .params import check_admissibility


def _load(path: str, check: bool = True):
    return parse_config(Path(path).read_text(), check=check)


def _cmd_check(args) -> int:
    cfg = _load(args.config, check=False)
    p = cfg.parameters
    failures = 0
    for mode in ("existence", "blowup"):
        report = check_admissibility(p, mode=mode)
        ok = report.existence_ok if mode == "existence" else report.blowup_ok
        print(f"{mode}: {'admissible' if ok else 'NOT admissible'}")
        for name, value in report.violated:
            print(f"  violated: {name} (got {value:g})")
        failures += 0 if ok else 1
    print(f"kappa_max = {report.kappa_max:.17g}")
    return 1 if failures else 0


def _cmd_run(args) -> int:
    cfg = _load(args.config)
    art = runners.run_single(cfg)
    status = art.events[0].trigger if art.events else "completed"
    print(f"run {art.run_dir.name}: {status}")
    print(f"artifacts: {art.run_dir}")
    return 0


def _parse_list(text: str, cast):
    return tuple(cast(v) for v in text.split(","))


def _cmd_eps_study(args) -> int:
    cfg = _load(args.config)
    eps = _parse_list(args.eps, float) if args.eps else None
    members, comparison = runners.run_eps_study(cfg, eps_list=eps, jobs=args.jobs)
    print(f"{len(members)} members completed")
    print(f"comparison table: {comparison}")
    return 0


def _cmd_k_sweep(args) -> int:
    cfg = _load(args.config)
    ks = _parse_list(args.k, int) if args.k else None
    members, table = runners.run_k_sweep(cfg, k_list=ks, jobs=args.jobs)
    print(f"{len(members)} members completed")
    print(f"sweep table: {table}")
    return 0


def _cmd_bisect(args) -> int:
    cfg = _load(args.config)
    report = runners.bisect_blowup_threshold(cfg, k_low=args.k_low, k_high=args.k_high)
    print(f"k* = {report['k_star']} (largest non-blowing k = {report['k_below']})")
    print(f"moment threshold estimate = {report['moment_threshold']:.17g}")
    print(f"B = {report['mass_B']:.17g}, D = {report['log_integral_D']:.17g}")
    print(f"table: {report['table']}")
    return 0


def _cmd_oracles(args) -> int:
    cfg = _load(args.config, check=False)
    out = args.out or str(Path(cfg.output_dir) / "oracles")
    paths = runners.write_oracle_reports(
        cfg.parameters, cfg.grid_cells, cfg.grading_exponent,
        count=args.count, seed=args.seed, out_dir=out,
    )
    for path in paths:
        print(f"report: {path}")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="becflow",
        description="Degenerate fourth-order condensation model: runs, sweeps, and inequality oracles",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    pc = sub.add_parser("check", help="print the admissibility report for a config")
    pc.add_argument("config")
    pc.set_defaults(fn=_cmd_check)

    pr = sub.add_parser("run", help="execute a single run")
    pr.add_argument("config")
    pr.set_defaults(fn=_cmd_run)

    pe = sub.add_parser("eps-study", help="sweep the regularization parameter")
    pe.add_argument("config")
    pe.add_argument("--eps", help="comma-separated epsilon values")
    pe.add_argument("--jobs", type=int, default=1, help="parallel member processes")
    pe.set_defaults(fn=_cmd_eps_study)

    pk = sub.add_parser("k-sweep", help="sweep the concentration index k")
    pk.add_argument("config")
    pk.add_argument("--k", help="comma-separated k values")
    pk.add_argument("--jobs", type=int, default=1, help="parallel member processes")
    pk.set_defaults(fn=_cmd_k_sweep)

    pb = sub.add_parser("bisect", help="bisect for the empirical blow-up threshold in k")
    pb.add_argument("config")
    pb.add_argument("--k-low", type=int, default=None)
    pb.add_argument("--k-high", type=int, default=None)
    pb.set_defaults(fn=_cmd_bisect)

    po = sub.add_parser("oracles", help="fuzz the interpolation inequalities")
    po.add_argument("config")
    po.add_argument("--count", type=int, default=1000)
    po.add_argument("--seed", type=int, default=0)
    po.add_argument("--out", default=None)
    po.set_defaults(fn=_cmd_oracles)

    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
