"""Invariant checks that only look at a finished trace.

Each check returns a list of human-readable violations (empty when the
trace is fine), so tests and demos can report all problems at
once instead of stopping at the first.
"""

from __future__ import annotations

import math
from typing import Dict, List, Optional

from .calibration import Calibration
from .engine import (COMPLETED, CREATED, EXPAND_DONE, EXPAND_START, SHRINK_DONE, SHRINK_START,
                     Trace)
from .model import Policy
from .perf import step_time

DECISION_EVENTS = (CREATED, SHRINK_START, EXPAND_START)


def effective_gap(trace: Trace) -> float:
    if trace.scheduler.policy is Policy.MOLDABLE:
        return math.inf
    return trace.scheduler.rescale_gap


def check_clock(trace: Trace) -> List[str]:
    out = []
    for a, b in zip(trace.records, trace.records[1:]):
        if b.time < a.time:
            out.append(f"clock went back from {a.time} to {b.time}")
    return out


def check_replica_bounds(trace: Trace) -> List[str]:
    out = []
    for r in trace.records:
        if r.replicas_to is None or r.event == COMPLETED:
            continue
        spec = trace.jobs[r.job_id]
        if not spec.min_replicas <= r.replicas_to <= spec.max_replicas:
            out.append(f"{r.job_id} {r.event} to {r.replicas_to} outside "
                       f"[{spec.min_replicas}, {spec.max_replicas}] at t={r.time}")
    return out


def check_gap_separation(trace: Trace) -> List[str]:
    gap = effective_gap(trace)
    last: Dict[str, float] = {}
    out = []
    for r in trace.records:
        if r.event not in DECISION_EVENTS:
            continue
        prev = last.get(r.job_id)
        if prev is not None and r.time - prev < gap:
            out.append(f"{r.job_id} {r.event} at t={r.time} only {r.time - prev}s after "
                       f"its previous action (gap {gap})")
        last[r.job_id] = r.time
    return out


def check_capacity(trace: Trace) -> List[str]:
    """Occupied slots (launchers included) never exceed the cluster."""
    launcher = trace.cluster.launcher_slots
    level: Dict[str, int] = {}
    out = []
    records = trace.records
    for i, r in enumerate(records):
        if r.event in (CREATED, EXPAND_START, SHRINK_DONE):
            level[r.job_id] = r.replicas_to + launcher
        elif r.event == COMPLETED:
            level.pop(r.job_id, None)
        last_at_time = i + 1 == len(records) or records[i + 1].time != r.time
        if last_at_time and sum(level.values()) > trace.cluster.total_slots:
            out.append(f"{sum(level.values())} slots occupied at t={r.time}")
    return out


def replay_work(trace: Trace, calib: Calibration) -> Dict[str, float]:
    """Integrate 1/step_time over each job's running segments.

    Rescale windows (start to done) contribute nothing.
    """
    work: Dict[str, float] = {}
    since: Dict[str, Optional[float]] = {}
    replicas: Dict[str, int] = {}
    for r in trace.records:
        j = r.job_id
        if r.event == CREATED:
            work[j] = 0.0
            since[j] = r.time
            replicas[j] = r.replicas_to
            continue
        if r.event in (SHRINK_START, EXPAND_START, COMPLETED):
            t0 = since.get(j)
            if t0 is None:
                continue
            perf = calib[trace.jobs[j].class_id].perf
            work[j] += (r.time - t0) / step_time(perf, replicas[j])
            since[j] = None
        elif r.event in (SHRINK_DONE, EXPAND_DONE):
            since[j] = r.time
            replicas[j] = r.replicas_to
    return work


def check_work_conservation(trace: Trace, calib: Calibration, rel_tol: float = 1e-6) -> List[str]:
    out = []
    for job, done in replay_work(trace, calib).items():
        target = calib[trace.jobs[job].class_id].work_units
        err = abs(done - target) / target
        if err > rel_tol:
            out.append(f"{job} did {done} of {target} work units (rel err {err:.3g})")
    return out


def check_no_progress_windows(trace: Trace) -> List[str]:
    """Nothing but submissions, other jobs' events, or the window end may
    happen to a job between its rescale start and done."""
    open_window: Dict[str, str] = {}
    out = []
    for r in trace.records:
        if r.event in (SHRINK_START, EXPAND_START):
            open_window[r.job_id] = r.event
        elif r.event in (SHRINK_DONE, EXPAND_DONE):
            if r.job_id not in open_window:
                out.append(f"{r.job_id} {r.event} without a start at t={r.time}")
            open_window.pop(r.job_id, None)
        elif r.event == COMPLETED and r.job_id in open_window:
            out.append(f"{r.job_id} completed during a rescale window at t={r.time}")
    return out


def check_trace(trace: Trace, calib: Calibration) -> List[str]:
    return (check_clock(trace) + check_replica_bounds(trace) + check_gap_separation(trace)
            + check_capacity(trace) + check_no_progress_windows(trace)
            + check_work_conservation(trace, calib))
