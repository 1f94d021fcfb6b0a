"""Command-line entry point: ``pseudoblow <command> ...``."""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from pathlib import Path

from . import verify as vf
from .blowup import estimate_t_star
from .config import ENV_CONFIG, ConfigError, RunConfig, load
from .solver import run
from .sweep import classify_map, run_sweep, write_map_csv
from .testfn import weak_residual, write_reports_csv, write_reports_json


class CliError(Exception):
    pass


def _config_path(arg: str | None) -> str:
    env = os.environ.get(ENV_CONFIG)
    path = env or arg
    if not path:
        raise CliError(f"no config file given (use -c FILE or set {ENV_CONFIG})")
    return path


def _load(arg: str | None, sweep: bool = False) -> RunConfig:
    cfg = load(_config_path(arg))
    cfg.validate(sweep=sweep)
    return cfg


def _out_dir(cfg: RunConfig) -> Path:
    d = Path(cfg.get("output", "directory"))
    try:
        d.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise CliError(f"cannot create output directory {d}: {exc.strerror}") from exc
    return d


def _out_path(cfg: RunConfig, suffix: str) -> Path:
    return _out_dir(cfg) / f"{cfg.get('output', 'prefix')}_{suffix}"


def _write_json(path: Path, payload: dict) -> None:
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


def cmd_simulate(args) -> int:
    cfg = _load(args.config)
    traj = run(cfg.problem(), cfg.grid(), cfg.control())
    header = cfg.header_lines()
    tpath = _out_path(cfg, "trajectory.csv")
    rpath = _out_path(cfg, "report.json")
    traj.write_csv(tpath, header)
    report = traj.report.to_dict()
    report.update(steps=traj.steps, rejected_steps=traj.rejected,
                  max_boundary_value=max(traj.boundary_value))
    _write_json(rpath, {"_header": cfg.header_dict(), "report": report})
    print(f"outcome={traj.report.outcome} t_star={traj.report.t_star_estimate!r} "
          f"steps={traj.steps} -> {tpath}, {rpath}")
    return 0


def cmd_sweep(args) -> int:
    cfg = _load(args.config, sweep=True)
    results = run_sweep(cfg.sweep(), workers=args.jobs)
    mpath = _out_path(cfg, "map.csv")
    write_map_csv(results, mpath, cfg.header_lines())
    print(classify_map(results).render())
    print(f"-> {mpath}")
    return 0


def cmd_verify(args) -> int:
    reports = []
    if args.what == "fracint":
        checks = vf.verify_fracint()
    elif args.what == "scaling":
        p = 2.0 if args.p is None else args.p
        gamma = 0.5 if args.gamma is None else args.gamma
        if not p > 1:
            raise CliError("p must exceed 1")
        if not 0.0 < gamma < 1.0:
            raise CliError("gamma must lie in (0, 1)")
        checks, reports = vf.verify_scaling(p, gamma, args.ndim)
    else:
        if args.p is not None:
            raise CliError("verify critical fixes p = N/(N-2); drop --p")
        if args.ndim < 3:
            raise CliError("verify critical needs --ndim >= 3")
        checks, reports = vf.verify_critical(args.ndim)
    print(vf.format_table(checks))
    ok = all(c.passed for c in checks)
    if args.out:
        header = {"command": f"verify {args.what}", "p": args.p, "gamma": args.gamma, "ndim": args.ndim}
        _write_json(Path(args.out), {"_header": header, "passed": ok,
                                     "checks": [c.to_dict() for c in checks],
                                     "reports": [r.to_dict() for r in reports]})
        if reports:
            base = Path(args.out).with_suffix("")
            lines = [f"{k} = {v!r}" for k, v in header.items()]
            write_reports_json(reports, f"{base}_scaling.json", header)
            write_reports_csv(reports, f"{base}_scaling.csv", lines)
    return 0 if ok else 1


def cmd_residual(args) -> int:
    cfg = _load(args.config)
    traj = run(cfg.problem(), cfg.grid(), cfg.control(store_profiles=True))
    value = weak_residual(traj, args.testfn)
    path = _out_path(cfg, f"residual_{args.testfn}.json")
    _write_json(path, {"_header": cfg.header_dict(), "testfn": args.testfn, "residual": value,
                       "outcome": traj.report.outcome})
    print(f"residual={value!r} -> {path}")
    return 0


def _read_series(path: str):
    try:
        with open(path, newline="") as fh:
            rows = list(csv.DictReader(line for line in fh if not line.startswith("#")))
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror}") from exc
    if not rows or "t" not in rows[0] or "sup_norm" not in rows[0]:
        raise CliError(f"{path}: expected columns t and sup_norm")
    return [(float(r["t"]), float(r["sup_norm"])) for r in rows]


def cmd_tstar(args) -> int:
    if not args.p > 1:
        raise CliError("p must exceed 1")
    series = _read_series(args.input)
    try:
        t_star, diag = estimate_t_star(series, args.p, args.threshold)
    except ValueError as exc:
        raise CliError(f"{args.input}: {exc}") from exc
    print(json.dumps({"t_star": t_star, **diag}))
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="pseudoblow", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", help="run one simulation")
    s.add_argument("-c", "--config")
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("sweep", help="run a parameter sweep")
    s.add_argument("-c", "--config")
    s.add_argument("-j", "--jobs", type=int, default=None, help="worker processes")
    s.set_defaults(func=cmd_sweep)

    s = sub.add_parser("verify", help="closed-form and scaling self-checks")
    s.add_argument("what", choices=["fracint", "scaling", "critical"])
    s.add_argument("--p", type=float)
    s.add_argument("--gamma", type=float)
    s.add_argument("--ndim", type=int, default=3)
    s.add_argument("--out", help="write the report JSON here")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("residual", help="weak-formulation residual of a run")
    s.add_argument("-c", "--config")
    s.add_argument("--testfn", choices=["subcritical", "critical"], default="subcritical")
    s.set_defaults(func=cmd_residual)

    s = sub.add_parser("tstar", help="blow-up time from a trajectory CSV")
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--p", type=float, required=True)
    s.add_argument("--threshold", type=float, default=None)
    s.set_defaults(func=cmd_tstar)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, CliError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
