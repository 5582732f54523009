"""Evaluation metrics and occupancy profiles computed from a trace.

Occupancy of a job changes at Created (+replicas, +launcher), ExpandStart
(to the new count), ShrinkDone (to the new count) and Completed (to zero).
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass
from typing import Callable, Dict, List, Optional, Tuple

from .engine import (COMPLETED, CREATED, EXPAND_START, SHRINK_DONE, SUBMITTED, Record, Trace)
from .model import ClusterConfig

METRIC_NAMES = ("total_time", "utilization", "weighted_mean_response", "weighted_mean_completion")


class IncompleteTraceError(ValueError):
    def __init__(self, job_ids):
        self.job_ids = sorted(job_ids)
        super().__init__(f"jobs never completed: {self.job_ids}")


@dataclass(frozen=True)
class JobMetrics:
    id: str
    response: float
    completion: float
    priority: int


@dataclass(frozen=True)
class MetricsReport:
    total_time: float
    utilization: float
    weighted_mean_response: float
    weighted_mean_completion: float
    per_job: Tuple[JobMetrics, ...] = ()

    def summary(self) -> Dict[str, float]:
        return {name: getattr(self, name) for name in METRIC_NAMES}


def _launcher_weight(cluster: ClusterConfig) -> int:
    return cluster.launcher_slots if cluster.count_launcher_in_utilization else 0


def _occupancy_changes(records: List[Record], launcher: int):
    """Yield ``(time, job_id, slots)`` whenever a job's footprint changes."""
    for r in records:
        if r.event == CREATED:
            yield r.time, r.job_id, r.replicas_to + launcher
        elif r.event in (EXPAND_START, SHRINK_DONE):
            yield r.time, r.job_id, r.replicas_to + launcher
        elif r.event == COMPLETED:
            yield r.time, r.job_id, 0


def compute_metrics(trace: Trace, cluster: Optional[ClusterConfig] = None,
                    weight: Callable[[int], float] = float) -> MetricsReport:
    """Total time, utilization, and priority-weighted mean response/completion.

    ``weight`` maps a job priority to its averaging weight.
    """
    cluster = cluster or trace.cluster
    submit: Dict[str, float] = {}
    priority: Dict[str, int] = {}
    created: Dict[str, float] = {}
    completed: Dict[str, float] = {}
    for r in trace.records:
        if r.event == SUBMITTED:
            submit[r.job_id] = r.time
            priority[r.job_id] = r.priority
        elif r.event == CREATED:
            created.setdefault(r.job_id, r.time)
        elif r.event == COMPLETED:
            completed[r.job_id] = r.time
    missing = set(submit) - set(completed)
    if missing:
        raise IncompleteTraceError(missing)
    if not submit:
        return MetricsReport(0.0, 0.0, 0.0, 0.0)

    start = min(created.values())
    end = max(completed.values())
    total_time = end - start

    # per-job rectangles
    launcher = _launcher_weight(cluster)
    area = 0.0
    level: Dict[str, Tuple[float, int]] = {}
    for t, job, slots in _occupancy_changes(trace.records, launcher):
        if job in level:
            t0, s0 = level[job]
            area += s0 * (t - t0)
        level[job] = (t, slots)
    utilization = area / (cluster.total_slots * total_time) if total_time > 0 else 0.0

    per_job = []
    for job in submit:
        per_job.append(JobMetrics(job, created[job] - submit[job], completed[job] - submit[job],
                                  priority[job]))
    weights = [weight(j.priority) for j in per_job]
    wsum = sum(weights)
    wmrt = sum(w * j.response for w, j in zip(weights, per_job)) / wsum
    wmct = sum(w * j.completion for w, j in zip(weights, per_job)) / wsum
    return MetricsReport(total_time, utilization, wmrt, wmct, tuple(per_job))


@dataclass(frozen=True)
class ProfileStep:
    """Occupancy from ``time`` until the next step."""

    time: float
    occupied: int
    by_job: Tuple[Tuple[str, int], ...]


def utilization_profile(trace: Trace, cluster: Optional[ClusterConfig] = None) -> List[ProfileStep]:
    cluster = cluster or trace.cluster
    launcher = _launcher_weight(cluster)
    current: Dict[str, int] = {}
    steps: List[ProfileStep] = []
    changes = list(_occupancy_changes(trace.records, launcher))
    for i, (t, job, slots) in enumerate(changes):
        if slots:
            current[job] = slots
        else:
            current.pop(job, None)
        if i + 1 < len(changes) and changes[i + 1][0] == t:
            continue
        by_job = tuple(sorted(current.items()))
        step = ProfileStep(t, sum(s for _, s in by_job), by_job)
        if steps and steps[-1].time == t:
            steps[-1] = step
        else:
            steps.append(step)
    return steps


def profile_integral(profile: List[ProfileStep]) -> float:
    return sum(a.occupied * (b.time - a.time) for a, b in zip(profile, profile[1:]))


# -- export ---------------------------------------------------------------------

def metrics_to_dict(report: MetricsReport, scheduler: str = "") -> dict:
    d = {"scheduler": scheduler} if scheduler else {}
    d.update(report.summary())
    d["per_job"] = [asdict(j) for j in report.per_job]
    return d


def metrics_to_json(report: MetricsReport, scheduler: str = "") -> str:
    return json.dumps(metrics_to_dict(report, scheduler), indent=2) + "\n"


def metrics_table_csv(rows: List[Tuple[str, MetricsReport]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("scheduler", "total_time", "utilization", "wmrt", "wmct"))
    for name, rep in rows:
        w.writerow((name, repr(rep.total_time), repr(rep.utilization),
                    repr(rep.weighted_mean_response), repr(rep.weighted_mean_completion)))
    return buf.getvalue()


def profile_to_csv(profile: List[ProfileStep]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("time", "job_id", "slots"))
    for step in profile:
        if not step.by_job:
            w.writerow((repr(step.time), "", 0))
        for job, slots in step.by_job:
            w.writerow((repr(step.time), job, slots))
    return buf.getvalue()
