"""Deterministic discrete-event simulation of the cluster.

Events are processed in ``(time, kind, sequence)`` order where, at equal
times, completions come before submissions and submissions before the end
of rescale windows.  A job makes no progress during a rescale window.  A
shrinking job keeps its old replica count until the shrink is done; an
expanding job holds its new count from the moment the expand starts.
"""

from __future__ import annotations

import csv
import heapq
import io
import json
import math
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional

from .calibration import Calibration
from .model import ClusterConfig, ConfigError, JobSpec, JobState, Phase, SchedulerConfig
from .perf import OverheadBreakdown, rescale_overhead, step_time
from .policy import (Action, ActionKind, SchedulerState, apply_policy_variant, on_slots_freed,
                     on_submit)

SUBMITTED = "submitted"
CREATED = "created"
SHRINK_START = "shrink_start"
SHRINK_DONE = "shrink_done"
EXPAND_START = "expand_start"
EXPAND_DONE = "expand_done"
ENQUEUED = "enqueued"
COMPLETED = "completed"

_COMPLETE, _SUBMIT, _RESCALE_DONE = 0, 1, 2

WORK_TOLERANCE = 1e-6


class SimulationError(RuntimeError):
    """An internal invariant broke during simulation."""


class DeadlockError(SimulationError):
    """The event queue ran dry while some jobs were unfinished."""


@dataclass(frozen=True)
class Record:
    time: float
    event: str
    job_id: str
    replicas_from: Optional[int] = None
    replicas_to: Optional[int] = None
    overhead: Optional[OverheadBreakdown] = None
    priority: Optional[int] = None


@dataclass
class Trace:
    """Replayable event history of one simulation run.

    ``jobs`` echoes the job specs as the scheduler saw them, i.e. after the
    policy variant and the cluster-size cap were applied.
    """

    records: List[Record]
    cluster: ClusterConfig
    scheduler: SchedulerConfig
    workload_id: str = ""
    jobs: Dict[str, JobSpec] = field(default_factory=dict)

    def events(self, kind: str) -> List[Record]:
        return [r for r in self.records if r.event == kind]

    def rescale_count(self) -> int:
        return sum(r.event in (SHRINK_START, EXPAND_START) for r in self.records)


def fit_to_cluster(spec: JobSpec, cluster: ClusterConfig) -> JobSpec:
    """Cap ``max_replicas`` at what the cluster can host next to a launcher."""
    cap = cluster.total_slots - cluster.launcher_slots
    if spec.min_replicas > cap:
        raise ConfigError(f"job {spec.id} needs {spec.min_replicas} replicas but the cluster "
                          f"hosts at most {cap}", "min_replicas")
    if spec.max_replicas > cap:
        spec = replace(spec, max_replicas=cap)
    return spec


class _Simulation:
    def __init__(self, cluster: ClusterConfig, scfg: SchedulerConfig, workload,
                 calib: Calibration):
        self.cluster = cluster
        self.scfg = scfg
        self.calib = calib
        self.launcher = cluster.launcher_slots
        self.state = SchedulerState.empty(cluster)
        self.jobs: Dict[str, JobState] = {}
        self.specs: Dict[str, JobSpec] = {}
        self.effective_scfg = scfg
        self.beneficiary_of: Dict[str, str] = {}
        self.outstanding: Dict[str, int] = {}
        self.epoch: Dict[str, int] = {}
        self.work_residual: Dict[str, float] = {}
        self.records: List[Record] = []
        self._heap: list = []
        self._seq = 0
        self.now = 0.0
        self.workload_id = getattr(workload, "label", "") or ""

        seen = set()
        for spec in workload.jobs:
            if spec.id in seen:
                raise ConfigError(f"duplicate job id {spec.id!r}", "jobs")
            seen.add(spec.id)
            if spec.class_id not in calib:
                raise ConfigError(f"unknown class {spec.class_id!r} for job {spec.id}", "class_id")
            spec, self.effective_scfg = apply_policy_variant(fit_to_cluster(spec, cluster), scfg)
            self.specs[spec.id] = spec
            self._push(spec.submit_time, _SUBMIT, spec.id)

    # -- event queue -------------------------------------------------------

    def _push(self, time: float, kind: int, job_id: str, epoch: int = 0) -> None:
        heapq.heappush(self._heap, (time, kind, self._seq, job_id, epoch))
        self._seq += 1

    def _log(self, event: str, job_id: str, **kw) -> None:
        self.records.append(Record(self.now, event, job_id, **kw))

    # -- job progress -------------------------------------------------------

    def _perf(self, j: JobState):
        return self.calib[j.spec.class_id].perf

    def _advance(self, j: JobState) -> None:
        if j.phase is Phase.RUNNING:
            dt = self.now - j.progress_time
            if dt > 0:
                j.work_done += dt / step_time(self._perf(j), j.replicas)
            j.progress_time = self.now

    def _schedule_completion(self, j: JobState) -> None:
        work = self.calib[j.spec.class_id].work_units
        remaining = max(work - j.work_done, 0.0)
        ep = self.epoch.get(j.id, 0) + 1
        self.epoch[j.id] = ep
        self._push(self.now + remaining * step_time(self._perf(j), j.replicas), _COMPLETE, j.id, ep)

    # -- applying decisions ---------------------------------------------------

    def _apply(self, actions: List[Action]) -> None:
        shrinks = [a for a in actions if a.kind is ActionKind.SHRINK]
        if shrinks:
            b = shrinks[0].beneficiary
            self.state.held[b] = self.state.free_slots
            self.state.free_slots = 0
            self.outstanding[b] = len(shrinks)
        for a in actions:
            j = self.jobs[a.job_id]
            if a.kind is ActionKind.CREATE:
                self._create(j, a.replicas)
            elif a.kind is ActionKind.ENQUEUE:
                self.state.queue.append(j)
                self._log(ENQUEUED, j.id)
            elif a.kind is ActionKind.SHRINK:
                self._start_rescale(j, a.replicas)
                self.beneficiary_of[j.id] = a.beneficiary
            elif a.kind is ActionKind.EXPAND:
                self.state.free_slots -= a.replicas - j.replicas
                self._start_rescale(j, a.replicas)
        self.state.resort()

    def _create(self, j: JobState, replicas: int) -> None:
        self.state.queue = [q for q in self.state.queue if q is not j]
        self.state.free_slots -= replicas + self.launcher
        j.phase = Phase.RUNNING
        j.replicas = replicas
        j.start_time = self.now
        j.last_action = self.now
        j.progress_time = self.now
        self.state.running.append(j)
        self._log(CREATED, j.id, replicas_to=replicas)
        self._schedule_completion(j)

    def _start_rescale(self, j: JobState, target: int) -> None:
        self._advance(j)
        old = j.replicas
        overhead = rescale_overhead(self.calib[j.spec.class_id], old, target)
        j.phase = Phase.RESCALING
        j.pending_target = target
        j.last_action = self.now
        j.rescale_deadline = self.now + overhead.total
        if target > old:
            j.replicas = target
        self.epoch[j.id] = self.epoch.get(j.id, 0) + 1  # cancels the pending completion
        self._log(EXPAND_START if target > old else SHRINK_START, j.id,
                  replicas_from=old, replicas_to=target, overhead=overhead)
        self._push(j.rescale_deadline, _RESCALE_DONE, j.id)

    # -- event handlers -------------------------------------------------------

    def _on_submit(self, job_id: str) -> None:
        spec = self.specs[job_id]
        j = JobState(spec)
        self.jobs[job_id] = j
        self._log(SUBMITTED, job_id, priority=spec.priority)
        self._apply(on_submit(self.state, spec, self.now, self.cluster, self.effective_scfg))

    def _on_complete(self, j: JobState) -> None:
        self._advance(j)
        work = self.calib[j.spec.class_id].work_units
        self.work_residual[j.id] = abs(j.work_done - work) / work
        j.work_done = float(work)
        j.phase = Phase.FINISHED
        j.end_time = self.now
        self.state.running.remove(j)
        freed = j.replicas + self.launcher
        self._log(COMPLETED, j.id, replicas_from=j.replicas)
        actions = on_slots_freed(self.state, self.now, freed, self.cluster, self.effective_scfg)
        self.state.free_slots += freed
        self._apply(actions)

    def _on_rescale_done(self, j: JobState) -> None:
        target = j.pending_target
        freed = 0
        if target < j.replicas:
            freed = j.replicas - target
            self._log(SHRINK_DONE, j.id, replicas_from=j.replicas, replicas_to=target)
            j.replicas = target
        else:
            self._log(EXPAND_DONE, j.id, replicas_to=target)
        j.phase = Phase.RUNNING
        j.pending_target = None
        j.rescale_deadline = None
        j.progress_time = self.now
        self._schedule_completion(j)

        b = self.beneficiary_of.pop(j.id, None)
        if b is None:
            return
        self.state.held[b] += freed
        self.outstanding[b] -= 1
        if self.outstanding[b] == 0:
            del self.outstanding[b]
            self.state.free_slots += self.state.held.pop(b)
            ben = self.jobs[b]
            replicas = min(self.state.free_slots - self.launcher, ben.max_replicas)
            if replicas < ben.min_replicas:
                raise SimulationError(f"beneficiary {b} admitted with {replicas} replicas")
            self._create(ben, replicas)
            self.state.resort()

    # -- main loop ------------------------------------------------------------

    def _check(self) -> None:
        st = self.state
        if st.free_slots < 0 or st.slots_accounted(self.launcher) != st.total_slots:
            raise SimulationError(
                f"slot conservation broken at t={self.now}: free={st.free_slots} "
                f"held={st.held} occupied={st.occupied(self.launcher)}")
        for j in st.running:
            if not j.min_replicas <= j.replicas <= j.max_replicas:
                raise SimulationError(f"job {j.id} at {j.replicas} replicas outside bounds")

    def run(self) -> "Trace":
        while self._heap:
            time, kind, _, job_id, ep = heapq.heappop(self._heap)
            if kind == _COMPLETE and ep != self.epoch.get(job_id):
                continue
            self.now = time
            if kind == _SUBMIT:
                self._on_submit(job_id)
            elif kind == _COMPLETE:
                self._on_complete(self.jobs[job_id])
            else:
                self._on_rescale_done(self.jobs[job_id])
            self._check()
        unfinished = sorted(i for i, j in self.jobs.items() if j.phase is not Phase.FINISHED)
        if unfinished:
            raise DeadlockError(f"no pending events but jobs unfinished: {unfinished}")
        return Trace(records=self.records, cluster=self.cluster, scheduler=self.scfg,
                     workload_id=self.workload_id,
                     jobs=dict(self.specs))


def simulate(cluster: ClusterConfig, scfg: SchedulerConfig, workload,
             calib: Calibration) -> Trace:
    """Run one workload under one scheduler and return its trace."""
    return _Simulation(cluster, scfg, workload, calib).run()


def simulate_with_stats(cluster, scfg, workload, calib):
    """Like :func:`simulate` but also return per-job relative work residuals."""
    sim = _Simulation(cluster, scfg, workload, calib)
    trace = sim.run()
    return trace, dict(sim.work_residual)


# -- export ---------------------------------------------------------------------

TRACE_CSV_COLUMNS = ("time", "event", "job_id", "replicas_from", "replicas_to", "overhead_total")


def _fmt(x) -> str:
    return "" if x is None else repr(x) if isinstance(x, float) else str(x)


def trace_to_csv(trace: Trace) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(TRACE_CSV_COLUMNS)
    for r in trace.records:
        w.writerow([repr(r.time), r.event, r.job_id, _fmt(r.replicas_from), _fmt(r.replicas_to),
                    _fmt(r.overhead.total if r.overhead else None)])
    return buf.getvalue()


def _gap_json(gap: float):
    return "inf" if math.isinf(gap) else gap


def trace_to_dict(trace: Trace) -> dict:
    records = []
    for r in trace.records:
        d = {"time": r.time, "event": r.event, "job_id": r.job_id}
        for key in ("replicas_from", "replicas_to", "priority"):
            if getattr(r, key) is not None:
                d[key] = getattr(r, key)
        if r.overhead is not None:
            d["overhead"] = r.overhead.as_dict()
        records.append(d)
    return {
        "cluster": {"total_slots": trace.cluster.total_slots,
                    "launcher_slots": trace.cluster.launcher_slots,
                    "count_launcher_in_utilization": trace.cluster.count_launcher_in_utilization},
        "scheduler": {"policy": trace.scheduler.policy.value,
                      "rescale_gap": _gap_json(trace.scheduler.rescale_gap)},
        "workload_id": trace.workload_id,
        "records": records,
    }


def trace_to_json(trace: Trace) -> str:
    return json.dumps(trace_to_dict(trace), indent=2) + "\n"
