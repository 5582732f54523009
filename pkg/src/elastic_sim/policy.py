"""Priority-based elastic scheduling decisions.

The functions here are pure: they read a :class:`SchedulerState` and return
a list of :class:`Action` objects.  The engine applies them.

Slot footprint of a job is ``replicas + launcher_slots``.  Creation charges
the whole footprint, expansion only the replica delta; completion frees the
whole footprint, a shrink only the replica delta.
"""

from __future__ import annotations

import dataclasses
import enum
import math
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Tuple

from .model import (ClusterConfig, JobSpec, JobState, Phase, Policy, SchedulerConfig,
                    priority_key)


class ActionKind(enum.Enum):
    CREATE = "create"
    EXPAND = "expand"
    SHRINK = "shrink"
    ENQUEUE = "enqueue"


@dataclass(frozen=True)
class Action:
    kind: ActionKind
    job_id: str
    replicas: Optional[int] = None
    beneficiary: Optional[str] = None
    issue_time: float = 0.0


@dataclass
class SchedulerState:
    """Cluster bookkeeping seen by the policy.

    ``running`` holds jobs in the Running or Rescaling phase and ``queue``
    holds enqueued jobs; both are kept in decreasing effective priority.
    ``held`` maps a beneficiary job id to the slots set aside for it while
    the shrinks that admit it are still in flight.
    """

    total_slots: int
    free_slots: int
    running: List[JobState] = field(default_factory=list)
    queue: List[JobState] = field(default_factory=list)
    held: Dict[str, int] = field(default_factory=dict)

    @classmethod
    def empty(cls, cluster: ClusterConfig) -> "SchedulerState":
        return cls(total_slots=cluster.total_slots, free_slots=cluster.total_slots)

    def resort(self) -> None:
        self.running.sort(key=lambda j: priority_key(j.spec))
        self.queue.sort(key=lambda j: priority_key(j.spec))

    def occupied(self, launcher_slots: int) -> int:
        return sum(j.replicas + launcher_slots for j in self.running)

    def slots_accounted(self, launcher_slots: int) -> int:
        return self.free_slots + sum(self.held.values()) + self.occupied(launcher_slots)


def rescale_eligible(j: JobState, now: float, gap: float) -> bool:
    return j.last_action is None or now - j.last_action >= gap


def _shrink_candidates(state: SchedulerState, job: JobSpec, now: float,
                       gap: float) -> Iterator[JobState]:
    # lowest effective priority first
    for j in reversed(state.running):
        if j.phase is not Phase.RUNNING:
            continue
        if not rescale_eligible(j, now, gap):
            continue
        if j.priority > job.priority:
            break
        yield j


def on_submit(state: SchedulerState, job: JobSpec, now: float, cluster: ClusterConfig,
              scfg: SchedulerConfig) -> List[Action]:
    """Decide what to do with a newly submitted job.

    Starts the job directly if the free slots allow at least its minimum,
    otherwise shrinks lower-priority jobs towards making room for its
    maximum, or enqueues it when even the minimum cannot be freed.  The
    job's own Create after a shrink is issued by the engine once all of its
    shrinks have completed.
    """
    launcher = cluster.launcher_slots
    free = state.free_slots
    replicas = min(free - launcher, job.max_replicas)
    if replicas >= job.min_replicas:
        return [Action(ActionKind.CREATE, job.id, replicas, issue_time=now)]

    candidates = list(_shrink_candidates(state, job, now, scfg.rescale_gap))

    num_to_free = job.min_replicas + launcher - free
    for j in candidates:
        if num_to_free <= 0:
            break
        num_to_free -= min(j.replicas - j.min_replicas, num_to_free)
    if num_to_free > 0:
        return [Action(ActionKind.ENQUEUE, job.id, issue_time=now)]

    actions = []
    max_to_free = job.max_replicas + launcher - free
    for j in candidates:
        if max_to_free <= 0:
            break
        if j.replicas > j.min_replicas:
            new = max(j.min_replicas, j.replicas - max_to_free)
            actions.append(Action(ActionKind.SHRINK, j.id, new, beneficiary=job.id,
                                  issue_time=now))
            max_to_free -= j.replicas - new
    return actions


def on_slots_freed(state: SchedulerState, now: float, freed: int, cluster: ClusterConfig,
                   scfg: SchedulerConfig) -> List[Action]:
    """Hand out slots after ``freed`` slots were released.

    Walks running and queued jobs together in decreasing effective priority,
    expanding running jobs and creating queued ones from the free pool
    (``state.free_slots`` plus ``freed``).  Whatever is left stays free.
    """
    launcher = cluster.launcher_slots
    available = state.free_slots + freed
    actions = []
    everyone = sorted(state.running + state.queue, key=lambda j: priority_key(j.spec))
    for j in everyone:
        if available <= 0:
            break
        if j.phase is Phase.RESCALING or not rescale_eligible(j, now, scfg.rescale_gap):
            continue
        if j.phase is Phase.QUEUED:
            add = min(available - launcher, j.max_replicas)
            if add >= j.min_replicas:
                actions.append(Action(ActionKind.CREATE, j.id, add, issue_time=now))
                available -= add + launcher
        elif j.replicas < j.max_replicas:
            add = min(available, j.max_replicas - j.replicas)
            actions.append(Action(ActionKind.EXPAND, j.id, j.replicas + add, issue_time=now))
            available -= add
    return actions


def apply_policy_variant(spec: JobSpec, scfg: SchedulerConfig) -> Tuple[JobSpec, SchedulerConfig]:
    """Express a baseline scheduler as a transformation of the elastic one.

    Rigid schedulers pin ``min_replicas == max_replicas``; the moldable
    scheduler keeps the job but never allows a rescale after creation.
    """
    if scfg.policy is Policy.RIGID_MIN:
        spec = dataclasses.replace(spec, max_replicas=spec.min_replicas)
    elif scfg.policy is Policy.RIGID_MAX:
        spec = dataclasses.replace(spec, min_replicas=spec.max_replicas)
    elif scfg.policy is Policy.MOLDABLE:
        scfg = dataclasses.replace(scfg, rescale_gap=math.inf)
    return spec, scfg
