"""Four-way scheduler comparisons and parameter sweeps.

Repetition ``k`` of a sweep uses workload seed ``base_seed + k`` for every
scheduler and every sweep point, so all comparisons are paired.
"""

from __future__ import annotations

import concurrent.futures
import csv
import dataclasses
import io
import math
import os
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from .engine import Trace, simulate
from .metrics import METRIC_NAMES, MetricsReport, compute_metrics
from .model import POLICY_ORDER, ConfigError, Policy, SchedulerConfig
from .workload import Config, Workload, generate

SWEEP_VARIABLES = ("submission_gap", "rescale_gap")


@dataclass(frozen=True)
class SweepSpec:
    variable: str
    values: Tuple[float, ...]
    fixed: Optional[float] = None  # value of the other parameter; None keeps the config's

    def __post_init__(self):
        if self.variable not in SWEEP_VARIABLES:
            raise ConfigError(f"must be one of {SWEEP_VARIABLES}", "sweep.variable")
        if not self.values:
            raise ConfigError("must be nonempty", "sweep.values")
        if any(math.isnan(v) or v < 0 for v in self.values):
            raise ConfigError("must be nonnegative", "sweep.values")
        if self.variable == "submission_gap" and any(math.isinf(v) for v in self.values):
            raise ConfigError("submission gap must be finite", "sweep.values")


def workload_for(config: Config, seed: int) -> Workload:
    if config.workload is not None:
        return config.workload
    return generate(config.generator, seed, config.calibration)


def run_one(config: Config, policy: Policy, workload: Workload) -> Trace:
    scfg = dataclasses.replace(config.scheduler, policy=policy)
    return simulate(config.cluster, scfg, workload, config.calibration)


def compare(config: Config, seed: int) -> List[Tuple[Policy, Trace, MetricsReport]]:
    """Run the four schedulers on one identical workload."""
    workload = workload_for(config, seed)
    rows = []
    for policy in POLICY_ORDER:
        trace = run_one(config, policy, workload)
        rows.append((policy, trace, compute_metrics(trace, config.cluster)))
    return rows


def _point_config(config: Config, spec: SweepSpec, value: float) -> Config:
    gen, sched = config.generator, config.scheduler
    if spec.variable == "submission_gap":
        gen = dataclasses.replace(gen, submission_gap=value)
        if spec.fixed is not None:
            sched = dataclasses.replace(sched, rescale_gap=spec.fixed)
    else:
        sched = dataclasses.replace(sched, rescale_gap=value)
        if spec.fixed is not None:
            gen = dataclasses.replace(gen, submission_gap=spec.fixed)
    return dataclasses.replace(config, generator=gen, scheduler=sched)


def _sweep_task(args) -> List[Dict[str, float]]:
    config, spec, value, seed = args
    cfg = _point_config(config, spec, value)
    return [compute_metrics(trace, cfg.cluster).summary() for _, trace, _ in compare(cfg, seed)]


def max_workers() -> int:
    env = os.environ.get("ELASTIC_SIM_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ConfigError("must be a positive integer", "ELASTIC_SIM_THREADS") from None
    return os.cpu_count() or 1


def sweep(config: Config, spec: SweepSpec, n_repeats: int, base_seed: int = 0,
          workers: Optional[int] = None) -> Dict[Tuple[float, Policy], Dict[str, float]]:
    """Mean metrics per (sweep value, scheduler) over ``n_repeats`` paired seeds."""
    if n_repeats < 1:
        raise ConfigError("must be >= 1", "repeats")
    tasks = [(config, spec, v, base_seed + k) for v in spec.values for k in range(n_repeats)]
    workers = max_workers() if workers is None else workers
    if workers > 1 and len(tasks) > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_sweep_task, tasks, chunksize=max(1, len(tasks) // (4 * workers))))
    else:
        results = [_sweep_task(t) for t in tasks]

    out = {}
    for i, v in enumerate(spec.values):
        chunk = results[i * n_repeats:(i + 1) * n_repeats]
        for p_idx, policy in enumerate(POLICY_ORDER):
            out[(v, policy)] = {m: math.fsum(r[p_idx][m] for r in chunk) / n_repeats
                                for m in METRIC_NAMES}
    return out


def _fmt_value(v: float) -> str:
    return "inf" if math.isinf(v) else repr(float(v))


def sweep_to_csv(spec: SweepSpec, result) -> str:
    """Long-form CSV, rows ordered by sweep value, then scheduler, then metric."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow((spec.variable, "scheduler", "metric", "mean"))
    for v in sorted(spec.values):
        for policy in POLICY_ORDER:
            means = result[(v, policy)]
            for m in METRIC_NAMES:
                w.writerow((_fmt_value(v), policy.value, m, repr(means[m])))
    return buf.getvalue()


def means_by_policy(result, values: Sequence[float], metric: str) -> Dict[Policy, List[float]]:
    return {p: [result[(v, p)][metric] for v in values] for p in POLICY_ORDER}
