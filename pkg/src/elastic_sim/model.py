"""Domain types shared across the simulator, and the job priority ordering."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Optional

if TYPE_CHECKING:
    from .perf import ClassPerf


class ConfigError(ValueError):
    """Invalid configuration, calibration or workload input.

    ``field`` names the offending entry when one is known.
    """

    def __init__(self, message: str, field: Optional[str] = None):
        self.field = field
        super().__init__(f"{field}: {message}" if field else message)


class Phase(enum.Enum):
    QUEUED = "queued"
    RUNNING = "running"
    RESCALING = "rescaling"
    FINISHED = "finished"


class Policy(enum.Enum):
    ELASTIC = "elastic"
    MOLDABLE = "moldable"
    RIGID_MIN = "min_replicas"
    RIGID_MAX = "max_replicas"

    @classmethod
    def parse(cls, name: str) -> "Policy":
        key = str(name).strip().lower().replace("-", "_")
        aliases = {"min": cls.RIGID_MIN, "max": cls.RIGID_MAX, "rigid_min": cls.RIGID_MIN,
                   "rigid_max": cls.RIGID_MAX}
        if key in aliases:
            return aliases[key]
        for p in cls:
            if p.value == key or p.name.lower() == key:
                return p
        raise ConfigError(f"unknown policy {name!r}", "scheduler.policy")


# Row order used by comparison tables and sweep output.
POLICY_ORDER = (Policy.RIGID_MIN, Policy.RIGID_MAX, Policy.MOLDABLE, Policy.ELASTIC)


@dataclass(frozen=True)
class JobSpec:
    id: str
    class_id: str
    min_replicas: int
    max_replicas: int
    priority: int
    submit_time: float

    def __post_init__(self):
        if not isinstance(self.min_replicas, int) or self.min_replicas < 1:
            raise ConfigError("must be a positive integer", "min_replicas")
        if not isinstance(self.max_replicas, int) or self.max_replicas < self.min_replicas:
            raise ConfigError(
                f"min_replicas ({self.min_replicas}) exceeds max_replicas ({self.max_replicas})",
                "min_replicas")
        if not math.isfinite(self.submit_time) or self.submit_time < 0:
            raise ConfigError("must be a finite nonnegative time", "submit_time")


@dataclass(frozen=True)
class JobClass:
    name: str
    work_units: int
    data_bytes: int
    perf: "ClassPerf"
    min_replicas: int = 1
    max_replicas: int = 1

    def __post_init__(self):
        if not isinstance(self.work_units, int) or self.work_units <= 0:
            raise ConfigError("must be a positive integer", f"{self.name}.work_units")
        if self.data_bytes < 0:
            raise ConfigError("must be nonnegative", f"{self.name}.data_bytes")
        if not 1 <= self.min_replicas <= self.max_replicas:
            raise ConfigError("need 1 <= min_replicas <= max_replicas", f"{self.name}.min_replicas")


@dataclass
class JobState:
    spec: JobSpec
    phase: Phase = Phase.QUEUED
    replicas: int = 0
    work_done: float = 0.0
    last_action: Optional[float] = None  # None means the job never had a scheduling event
    rescale_deadline: Optional[float] = None
    pending_target: Optional[int] = None
    start_time: Optional[float] = None
    end_time: Optional[float] = None
    # time up to which work_done has been integrated
    progress_time: Optional[float] = None

    @property
    def id(self) -> str:
        return self.spec.id

    @property
    def priority(self) -> int:
        return self.spec.priority

    @property
    def min_replicas(self) -> int:
        return self.spec.min_replicas

    @property
    def max_replicas(self) -> int:
        return self.spec.max_replicas


@dataclass(frozen=True)
class ClusterConfig:
    total_slots: int = 64
    launcher_slots: int = 1
    count_launcher_in_utilization: bool = False

    def __post_init__(self):
        if not isinstance(self.total_slots, int) or self.total_slots < 1:
            raise ConfigError("must be a positive integer", "cluster.total_slots")
        if not isinstance(self.launcher_slots, int) or self.launcher_slots < 0:
            raise ConfigError("must be a nonnegative integer", "cluster.launcher_slots")
        if self.total_slots < self.launcher_slots + 1:
            raise ConfigError("must be at least launcher_slots + 1", "cluster.total_slots")


@dataclass(frozen=True)
class SchedulerConfig:
    policy: Policy = Policy.ELASTIC
    rescale_gap: float = 180.0

    def __post_init__(self):
        if math.isnan(self.rescale_gap) or self.rescale_gap < 0:
            raise ConfigError("must be >= 0", "scheduler.rescale_gap")


def priority_key(spec: JobSpec) -> tuple:
    """Sort key; ascending order is decreasing effective priority."""
    return (-spec.priority, spec.submit_time, spec.id)


def effective_priority_cmp(a: JobSpec, b: JobSpec) -> int:
    """Return -1 if ``a`` precedes ``b``, 1 if ``b`` precedes ``a``, 0 if equal.

    Larger priority values come first; equal priorities are ordered by earlier
    submission, then by id.
    """
    ka, kb = priority_key(a), priority_key(b)
    return (ka > kb) - (ka < kb)

