"""Seeded synthetic workloads, plus the JSON config and workload file formats.

Random numbers come from Philox4x64-10 with key ``(seed, 0)``, read as raw
64-bit words; the first block is generated at counter ``(1, 0, 0, 0)``.  Each job consumes two words in
order: the first picks the class, the second the priority.  A word ``x``
maps to ``u = (x >> 11) * 2**-53`` in [0, 1).  The class is the first one
whose cumulative weight exceeds ``u``; the priority is
``lo + floor(u * (hi - lo + 1))``.  Any language with a Philox4x64-10
implementation reproduces the same workloads.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import numpy as np

from .calibration import (Calibration, calibration_from_dict, default_calibration,
                          load_calibration)
from .model import ClusterConfig, ConfigError, JobSpec, Policy, SchedulerConfig

RNG_ALGORITHM = "philox4x64-10"
CONFIG_SCHEMA_VERSION = 1
WORKLOAD_SCHEMA_VERSION = 1


@dataclass(frozen=True)
class GeneratorParams:
    n_jobs: int = 16
    class_weights: Optional[Tuple[Tuple[str, float], ...]] = None  # None: uniform
    priority_range: Tuple[int, int] = (1, 5)
    submission_gap: float = 90.0
    n_repeats: int = 100

    def __post_init__(self):
        if not isinstance(self.n_jobs, int) or self.n_jobs < 1:
            raise ConfigError("must be a positive integer", "generator.n_jobs")
        lo, hi = self.priority_range
        if not (isinstance(lo, int) and isinstance(hi, int)) or lo > hi:
            raise ConfigError("must be [lo, hi] integers with lo <= hi", "generator.priority_range")
        if not math.isfinite(self.submission_gap) or self.submission_gap < 0:
            raise ConfigError("must be >= 0", "generator.submission_gap")
        if not isinstance(self.n_repeats, int) or self.n_repeats < 1:
            raise ConfigError("must be a positive integer", "generator.n_repeats")
        if self.class_weights is not None:
            weights = [w for _, w in self.class_weights]
            if any(w < 0 for w in weights) or not math.isclose(sum(weights), 1.0, abs_tol=1e-9):
                raise ConfigError("weights must be nonnegative and sum to 1",
                                  "generator.class_weights")


@dataclass
class Workload:
    jobs: List[JobSpec]
    seed: Optional[int] = None
    params: Optional[GeneratorParams] = None
    rng: str = RNG_ALGORITHM
    label: str = ""

    def __post_init__(self):
        ids = [j.id for j in self.jobs]
        if len(set(ids)) != len(ids):
            raise ConfigError("job ids must be unique", "jobs")
        times = [j.submit_time for j in self.jobs]
        if any(b < a for a, b in zip(times, times[1:])):
            raise ConfigError("jobs must be sorted by submit_time", "jobs")
        if not self.label and self.seed is not None:
            self.label = f"seed={self.seed}"


def _uniforms(seed: int, count: int) -> np.ndarray:
    raw = np.random.Philox(key=seed).random_raw(count)
    return (raw >> np.uint64(11)).astype(np.float64) * 2.0 ** -53


def generate(params: GeneratorParams, seed: int, classes: Calibration) -> Workload:
    if not classes:
        raise ConfigError("class table is empty", "classes")
    if params.class_weights is None:
        names = list(classes)
        weights = [1.0 / len(names)] * len(names)
    else:
        names = [n for n, _ in params.class_weights]
        weights = [w for _, w in params.class_weights]
        for n in names:
            if n not in classes:
                raise ConfigError(f"unknown class {n!r}", "generator.class_weights")
    cumulative = np.cumsum(weights)
    lo, hi = params.priority_range
    u = _uniforms(seed, 2 * params.n_jobs)
    jobs = []
    for k in range(params.n_jobs):
        idx = min(int(np.searchsorted(cumulative, u[2 * k], side="right")), len(names) - 1)
        cls = classes[names[idx]]
        priority = lo + min(int(u[2 * k + 1] * (hi - lo + 1)), hi - lo)
        jobs.append(JobSpec(id=f"j{k:03d}", class_id=cls.name,
                            min_replicas=cls.min_replicas, max_replicas=cls.max_replicas,
                            priority=priority, submit_time=k * params.submission_gap))
    return Workload(jobs=jobs, seed=seed, params=params)


# -- workload files -------------------------------------------------------------

_JOB_KEYS = {"id", "class_id", "min_replicas", "max_replicas", "priority", "submit_time"}


def _reject_unknown(d, allowed, where):
    if not isinstance(d, dict):
        raise ConfigError("expected an object", where)
    unknown = sorted(set(d) - set(allowed))
    if unknown:
        raise ConfigError(f"unknown field(s) {unknown}", where)


def _params_to_dict(p: GeneratorParams) -> dict:
    return {"n_jobs": p.n_jobs,
            "class_weights": None if p.class_weights is None else dict(p.class_weights),
            "priority_range": list(p.priority_range),
            "submission_gap": p.submission_gap,
            "n_repeats": p.n_repeats}


def workload_to_dict(w: Workload) -> dict:
    return {
        "schema_version": WORKLOAD_SCHEMA_VERSION,
        "seed": w.seed,
        "rng": w.rng,
        "label": w.label,
        "generator": None if w.params is None else _params_to_dict(w.params),
        "jobs": [{"id": j.id, "class_id": j.class_id, "min_replicas": j.min_replicas,
                  "max_replicas": j.max_replicas, "priority": j.priority,
                  "submit_time": j.submit_time} for j in w.jobs],
    }


def _job_from_dict(d: dict, where: str, priority_range=None) -> JobSpec:
    _reject_unknown(d, _JOB_KEYS, where)
    for key in ("id", "class_id", "min_replicas", "max_replicas", "priority"):
        if key not in d:
            raise ConfigError("missing", f"{where}.{key}")
    try:
        spec = JobSpec(id=str(d["id"]), class_id=str(d["class_id"]),
                       min_replicas=d["min_replicas"], max_replicas=d["max_replicas"],
                       priority=int(d["priority"]), submit_time=float(d.get("submit_time", 0.0)))
    except ConfigError as exc:
        raise ConfigError(str(exc), where) from None
    if priority_range is not None and not priority_range[0] <= spec.priority <= priority_range[1]:
        raise ConfigError(f"priority {spec.priority} outside {list(priority_range)}",
                          f"{where}.priority")
    return spec


def workload_from_dict(doc: dict, priority_range=None) -> Workload:
    _reject_unknown(doc, {"schema_version", "seed", "rng", "label", "generator", "jobs"}, "workload")
    if doc.get("schema_version", WORKLOAD_SCHEMA_VERSION) != WORKLOAD_SCHEMA_VERSION:
        raise ConfigError("unsupported version", "workload.schema_version")
    jobs = doc.get("jobs")
    if not isinstance(jobs, list):
        raise ConfigError("must be a list", "workload.jobs")
    specs = [_job_from_dict(j, f"workload.jobs[{i}]", priority_range) for i, j in enumerate(jobs)]
    gen = doc.get("generator")
    return Workload(jobs=specs, seed=doc.get("seed"),
                    params=None if gen is None else _params_from_dict(gen),
                    rng=doc.get("rng", RNG_ALGORITHM), label=doc.get("label", ""))


def save_workload(w: Workload, path) -> None:
    Path(path).write_text(json.dumps(workload_to_dict(w), indent=2) + "\n")


def load_workload(path) -> Workload:
    with open(path) as fh:
        return workload_from_dict(json.load(fh))


# -- config files ---------------------------------------------------------------

def parse_gap(value, where: str) -> float:
    if isinstance(value, str) and value.strip().lower() in ("inf", "infinity", "∞"):
        return math.inf
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError("must be a number or \"inf\"", where)
    return float(value)


def _params_from_dict(d: dict) -> GeneratorParams:
    _reject_unknown(d, {"n_jobs", "class_weights", "priority_range", "submission_gap",
                        "n_repeats"}, "generator")
    weights = d.get("class_weights")
    if weights is not None:
        if not isinstance(weights, dict):
            raise ConfigError("must be an object of class -> weight", "generator.class_weights")
        weights = tuple((str(k), float(v)) for k, v in weights.items())
    pr = d.get("priority_range", [1, 5])
    if not isinstance(pr, (list, tuple)) or len(pr) != 2:
        raise ConfigError("must be [lo, hi]", "generator.priority_range")
    return GeneratorParams(
        n_jobs=d.get("n_jobs", 16),
        class_weights=weights,
        priority_range=(pr[0], pr[1]),
        submission_gap=float(d.get("submission_gap", 90.0)),
        n_repeats=d.get("n_repeats", 100),
    )


@dataclass
class Config:
    cluster: ClusterConfig = field(default_factory=ClusterConfig)
    scheduler: SchedulerConfig = field(default_factory=SchedulerConfig)
    generator: GeneratorParams = field(default_factory=GeneratorParams)
    calibration: Calibration = field(default_factory=default_calibration)
    workload: Optional[Workload] = None  # fixed workload; None means generate per seed

    def __iter__(self):
        return iter((self.cluster, self.scheduler, self.generator, self.calibration))


# Defaults applied when a config omits a field.
CONFIG_DEFAULTS = {
    "cluster.total_slots": 64,
    "cluster.launcher_slots": 1,
    "cluster.count_launcher_in_utilization": False,
    "scheduler.policy": "elastic",
    "scheduler.rescale_gap": 180.0,
    "generator.n_jobs": 16,
    "generator.class_weights": None,
    "generator.priority_range": [1, 5],
    "generator.submission_gap": 90.0,
    "generator.n_repeats": 100,
    "calibration": None,
    "workload": None,
}


def _resolve(value, base: Path):
    p = Path(value)
    return p if p.is_absolute() else base / p


def config_from_dict(doc: dict, base_dir=".") -> Config:
    base = Path(base_dir)
    _reject_unknown(doc, {"schema_version", "cluster", "scheduler", "generator", "calibration",
                          "workload"}, "config")
    if doc.get("schema_version", CONFIG_SCHEMA_VERSION) != CONFIG_SCHEMA_VERSION:
        raise ConfigError("unsupported version", "schema_version")

    c = doc.get("cluster", {})
    _reject_unknown(c, {"total_slots", "launcher_slots", "count_launcher_in_utilization"}, "cluster")
    cluster = ClusterConfig(
        total_slots=c.get("total_slots", CONFIG_DEFAULTS["cluster.total_slots"]),
        launcher_slots=c.get("launcher_slots", CONFIG_DEFAULTS["cluster.launcher_slots"]),
        count_launcher_in_utilization=bool(c.get(
            "count_launcher_in_utilization",
            CONFIG_DEFAULTS["cluster.count_launcher_in_utilization"])),
    )

    s = doc.get("scheduler", {})
    _reject_unknown(s, {"policy", "rescale_gap"}, "scheduler")
    scheduler = SchedulerConfig(
        policy=Policy.parse(s.get("policy", CONFIG_DEFAULTS["scheduler.policy"])),
        rescale_gap=parse_gap(s.get("rescale_gap", CONFIG_DEFAULTS["scheduler.rescale_gap"]),
                              "scheduler.rescale_gap"),
    )

    generator = _params_from_dict(doc.get("generator", {}))

    cal = doc.get("calibration")
    if cal is None:
        calibration = default_calibration()
    elif isinstance(cal, str):
        calibration = load_calibration(_resolve(cal, base))
    else:
        calibration = calibration_from_dict(cal)

    if generator.class_weights is not None:
        for name, _ in generator.class_weights:
            if name not in calibration:
                raise ConfigError(f"unknown class {name!r}", "generator.class_weights")

    wl = doc.get("workload")
    workload = None
    if wl is not None:
        if isinstance(wl, str):
            with open(_resolve(wl, base)) as fh:
                wl = json.load(fh)
        workload = workload_from_dict(wl, generator.priority_range)
        for spec in workload.jobs:
            if spec.class_id not in calibration:
                raise ConfigError(f"unknown class {spec.class_id!r} for job {spec.id}",
                                  "workload.jobs.class_id")
    return Config(cluster, scheduler, generator, calibration, workload)


def load_config(path) -> Config:
    """Read a JSON config; relative file references resolve against its folder."""
    path = Path(path)
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON ({exc})", str(path)) from None
    return config_from_dict(doc, base_dir=path.parent)
