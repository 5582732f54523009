"""Command-line front end.

    elastic-sim run     --config cfg.json --scheduler elastic --seed 0 --out out/
    elastic-sim compare --config cfg.json --seed 0 --out out/
    elastic-sim sweep   --config cfg.json --sweep submission-gap --values 0,60,120 \
                        --repeats 100 --seed 0 --out out/

Exit codes: 0 success, 2 validation error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .engine import trace_to_csv, trace_to_json
from .experiments import SweepSpec, compare, run_one, sweep, sweep_to_csv, workload_for
from .metrics import (compute_metrics, metrics_table_csv, metrics_to_dict, metrics_to_json,
                      profile_to_csv, utilization_profile)
from .model import ConfigError, Policy
from .workload import Config, load_config, parse_gap, save_workload

EXIT_OK, EXIT_VALIDATION, EXIT_IO = 0, 2, 3


def _load(args) -> Config:
    return load_config(args.config) if args.config else Config()


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_run(args) -> int:
    config = _load(args)
    policy = Policy.parse(args.scheduler) if args.scheduler else config.scheduler.policy
    workload = workload_for(config, args.seed)
    trace = run_one(config, policy, workload)
    report = compute_metrics(trace, config.cluster)
    out = _out_dir(args)
    (out / "trace.csv").write_text(trace_to_csv(trace))
    (out / "trace.json").write_text(trace_to_json(trace))
    (out / "metrics.json").write_text(metrics_to_json(report, policy.value))
    (out / "metrics.csv").write_text(metrics_table_csv([(policy.value, report)]))
    (out / "profile.csv").write_text(profile_to_csv(utilization_profile(trace, config.cluster)))
    save_workload(workload, out / "workload.json")
    print(metrics_table_csv([(policy.value, report)]), end="")
    return EXIT_OK


def cmd_compare(args) -> int:
    config = _load(args)
    rows = compare(config, args.seed)
    out = _out_dir(args)
    table = metrics_table_csv([(p.value, rep) for p, _, rep in rows])
    (out / "compare.csv").write_text(table)
    (out / "compare.json").write_text(json.dumps(
        [metrics_to_dict(rep, p.value) for p, _, rep in rows], indent=2) + "\n")
    for p, trace, _ in rows:
        (out / f"trace_{p.value}.csv").write_text(trace_to_csv(trace))
        (out / f"profile_{p.value}.csv").write_text(
            profile_to_csv(utilization_profile(trace, config.cluster)))
    save_workload(workload_for(config, args.seed), out / "workload.json")
    print(table, end="")
    return EXIT_OK


def cmd_sweep(args) -> int:
    config = _load(args)
    variable = args.sweep.replace("-", "_")
    try:
        values = tuple(parse_gap(_number(v), "values") for v in args.values.split(",") if v.strip())
    except ValueError:
        raise ConfigError(f"cannot parse {args.values!r}", "values") from None
    spec = SweepSpec(variable, values)
    repeats = args.repeats if args.repeats is not None else config.generator.n_repeats
    result = sweep(config, spec, repeats, base_seed=args.seed)
    text = sweep_to_csv(spec, result)
    out = _out_dir(args)
    (out / f"sweep_{variable}.csv").write_text(text)
    print(text, end="")
    return EXIT_OK


def _number(text: str):
    text = text.strip()
    return text if text.lower() in ("inf", "infinity") else float(text)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="elastic-sim",
                                     description="Elastic HPC job scheduling simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="JSON config file (defaults apply when omitted)")
        p.add_argument("--seed", type=int, default=0, help="workload seed (base seed for sweeps)")
        p.add_argument("--out", default="out", help="output directory")

    p = sub.add_parser("run", help="simulate one scheduler")
    common(p)
    p.add_argument("--scheduler", choices=["min", "max", "moldable", "elastic"])
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("compare", help="simulate all four schedulers on one workload")
    common(p)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("sweep", help="mean metrics over a parameter sweep")
    common(p)
    p.add_argument("--sweep", required=True, choices=["submission-gap", "rescale-gap"])
    p.add_argument("--values", required=True, help="comma-separated seconds; 'inf' allowed")
    p.add_argument("--repeats", type=int)
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
