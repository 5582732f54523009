"""Piecewise-linear step-time and rescaling-overhead models.

Each job class carries knot lists ``[(replicas, seconds), ...]``.  Values
between knots are linearly interpolated; outside the knot range the nearest
endpoint value is used, so 1/n-shaped curves never extrapolate below zero.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence, Tuple

import numpy as np

from .model import ConfigError, JobClass

Knots = Tuple[Tuple[int, float], ...]

OVERHEAD_COMPONENTS = ("checkpoint", "restart", "restore", "load_balance")


def _as_knots(knots, name: str, positive: bool = False) -> Knots:
    out = tuple((int(n), float(t)) for n, t in knots)
    if not out:
        raise ConfigError("knot list is empty", name)
    for (n0, _), (n1, _) in zip(out, out[1:]):
        if n1 <= n0:
            raise ConfigError("knot replica values must be strictly increasing", name)
    for n, t in out:
        if n < 1:
            raise ConfigError("knot replicas must be positive", name)
        if positive and not t > 0:
            raise ConfigError("step times must be > 0", name)
        if t < 0:
            raise ConfigError("times must be >= 0", name)
    return out


@dataclass(frozen=True)
class ClassPerf:
    step_time_knots: Knots
    overhead_knots: Mapping[str, Knots]

    def __post_init__(self):
        object.__setattr__(self, "step_time_knots",
                           _as_knots(self.step_time_knots, "step_time_knots", positive=True))
        missing = set(OVERHEAD_COMPONENTS) - set(self.overhead_knots)
        extra = set(self.overhead_knots) - set(OVERHEAD_COMPONENTS)
        if missing or extra:
            raise ConfigError(f"expected components {OVERHEAD_COMPONENTS}", "overhead_knots")
        object.__setattr__(self, "overhead_knots", {
            c: _as_knots(self.overhead_knots[c], f"overhead_knots.{c}")
            for c in OVERHEAD_COMPONENTS})

    def __hash__(self):
        return hash((self.step_time_knots,
                     tuple(self.overhead_knots[c] for c in OVERHEAD_COMPONENTS)))


@dataclass(frozen=True)
class OverheadBreakdown:
    checkpoint: float
    restart: float
    restore: float
    load_balance: float

    @property
    def total(self) -> float:
        return self.checkpoint + self.restart + self.restore + self.load_balance

    def as_dict(self) -> dict:
        return {"checkpoint": self.checkpoint, "restart": self.restart,
                "restore": self.restore, "load_balance": self.load_balance,
                "total": self.total}


def interp(knots: Sequence[Tuple[int, float]], n: float) -> float:
    if not knots:
        raise ConfigError("knot list is empty", "knots")
    xs = [k[0] for k in knots]
    ys = [k[1] for k in knots]
    return float(np.interp(n, xs, ys))


def step_time(perf: ClassPerf, n: int) -> float:
    """Seconds per timestep when running on ``n`` replicas."""
    if n < 1:
        raise ValueError(f"replica count must be >= 1, got {n}")
    return interp(perf.step_time_knots, n)


def job_runtime(cls: JobClass, n: int) -> float:
    return cls.work_units * step_time(cls.perf, n)


def rescale_overhead(cls: JobClass, n_old: int, n_new: int) -> OverheadBreakdown:
    """Cost of moving a job from ``n_old`` to ``n_new`` replicas.

    Checkpoint and restore are charged at the old layout, which owns the
    state being saved.  Restart and load balancing are charged at the larger
    of the two layouts.
    """
    if n_old == n_new:
        raise ValueError(f"rescale from {n_old} to the same replica count")
    if n_old < 1 or n_new < 1:
        raise ValueError("replica counts must be >= 1")
    k = cls.perf.overhead_knots
    wide = max(n_old, n_new)
    return OverheadBreakdown(
        checkpoint=interp(k["checkpoint"], n_old),
        restart=interp(k["restart"], wide),
        restore=interp(k["restore"], n_old),
        load_balance=interp(k["load_balance"], wide),
    )
