"""Calibration tables: the shipped synthetic defaults and the JSON file format.

The synthetic calibration is NOT measured data.  It is a smooth stand-in with
the qualitative shape of a 2D Jacobi stencil on a cloud cluster:

* seconds per step ``t(n) = sync + cell_cost * cells / n``, sampled at
  power-of-two replica counts 1..64;
* checkpoint and restore ``64 / n`` seconds, restart ``0.1 + 0.05 n``,
  load balance ``0.5`` seconds, identical for every class.

``data_bytes`` is carried along as metadata only; a user calibration that
wants size-dependent overheads encodes that in its own overhead knots.

Calibration file (JSON)::

    {
      "schema_version": 1,
      "classes": {
        "<name>": {
          "work_units": 40000,
          "data_bytes": 1073741824,
          "min_replicas": 8,            # optional, default 1
          "max_replicas": 32,           # optional, default min_replicas
          "step_time_knots": [[8, 0.02], [16, 0.011], [32, 0.006]],
          "overhead_knots": {
            "checkpoint": [[8, 8.0], [32, 2.0]],
            "restart": [[8, 0.5], [32, 1.7]],
            "restore": [[8, 8.0], [32, 2.0]],
            "load_balance": [[8, 0.5]]
          }
        }
      }
    }

Unknown keys are rejected.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Dict

from .model import ConfigError, JobClass
from .perf import OVERHEAD_COMPONENTS, ClassPerf

CALIBRATION_SCHEMA_VERSION = 1

Calibration = Dict[str, JobClass]

_CELL_COST = 1e-8  # seconds per grid cell update on one replica
_SYNC_PER_EDGE = 8e-7  # per-step halo/sync seconds per grid edge cell
_SYNC_BASE = 1e-5
_KNOT_REPLICAS = (1, 2, 4, 8, 16, 32, 64)

# name, grid edge, timesteps, min_replicas, max_replicas
JACOBI_CLASSES = (
    ("small", 512, 40_000, 2, 8),
    ("medium", 2048, 40_000, 4, 16),
    ("large", 8192, 40_000, 8, 32),
    ("xlarge", 16384, 10_000, 16, 64),
)


def synthetic_overhead_knots(replicas=_KNOT_REPLICAS) -> dict:
    return {
        "checkpoint": [(n, 64.0 / n) for n in replicas],
        "restart": [(n, 0.1 + 0.05 * n) for n in replicas],
        "restore": [(n, 64.0 / n) for n in replicas],
        "load_balance": [(replicas[0], 0.5)],
    }


def synthetic_class(name: str, edge: int, steps: int, min_replicas: int,
                    max_replicas: int) -> JobClass:
    cells = edge * edge
    sync = _SYNC_BASE + _SYNC_PER_EDGE * edge
    data_bytes = cells * 16  # two double-precision grids
    perf = ClassPerf(
        step_time_knots=[(n, sync + _CELL_COST * cells / n) for n in _KNOT_REPLICAS],
        overhead_knots=synthetic_overhead_knots(),
    )
    return JobClass(name=name, work_units=steps, data_bytes=data_bytes, perf=perf,
                    min_replicas=min_replicas, max_replicas=max_replicas)


def default_calibration() -> Calibration:
    """The four Jacobi problem sizes with synthetic performance curves."""
    return {row[0]: synthetic_class(*row) for row in JACOBI_CLASSES}


_CLASS_KEYS = {"work_units", "data_bytes", "min_replicas", "max_replicas",
               "step_time_knots", "overhead_knots"}


def _reject_unknown(d: dict, allowed: set, where: str):
    if not isinstance(d, dict):
        raise ConfigError("expected an object", where)
    unknown = sorted(set(d) - allowed)
    if unknown:
        raise ConfigError(f"unknown field(s) {unknown}", where)


def calibration_from_dict(doc: dict) -> Calibration:
    _reject_unknown(doc, {"schema_version", "classes"}, "calibration")
    version = doc.get("schema_version", CALIBRATION_SCHEMA_VERSION)
    if version != CALIBRATION_SCHEMA_VERSION:
        raise ConfigError(f"unsupported version {version}", "calibration.schema_version")
    classes = doc.get("classes")
    if not isinstance(classes, dict) or not classes:
        raise ConfigError("must be a nonempty object", "calibration.classes")
    out = {}
    for name, entry in classes.items():
        where = f"calibration.classes.{name}"
        _reject_unknown(entry, _CLASS_KEYS, where)
        for key in ("work_units", "step_time_knots", "overhead_knots"):
            if key not in entry:
                raise ConfigError("missing", f"{where}.{key}")
        _reject_unknown(entry["overhead_knots"], set(OVERHEAD_COMPONENTS), f"{where}.overhead_knots")
        try:
            perf = ClassPerf(step_time_knots=entry["step_time_knots"],
                             overhead_knots=entry["overhead_knots"])
            lo = entry.get("min_replicas", 1)
            out[name] = JobClass(name=name, work_units=entry["work_units"],
                                 data_bytes=entry.get("data_bytes", 0), perf=perf,
                                 min_replicas=lo, max_replicas=entry.get("max_replicas", lo))
        except ConfigError as exc:
            raise ConfigError(str(exc), where) from None
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"malformed entry ({exc})", where) from None
    return out


def calibration_to_dict(calib: Calibration) -> dict:
    classes = {}
    for name, c in calib.items():
        classes[name] = {
            "work_units": c.work_units,
            "data_bytes": c.data_bytes,
            "min_replicas": c.min_replicas,
            "max_replicas": c.max_replicas,
            "step_time_knots": [list(k) for k in c.perf.step_time_knots],
            "overhead_knots": {comp: [list(k) for k in c.perf.overhead_knots[comp]]
                               for comp in OVERHEAD_COMPONENTS},
        }
    return {"schema_version": CALIBRATION_SCHEMA_VERSION, "classes": classes}


def load_calibration(path) -> Calibration:
    with open(path) as fh:
        return calibration_from_dict(json.load(fh))


def save_calibration(calib: Calibration, path) -> None:
    Path(path).write_text(json.dumps(calibration_to_dict(calib), indent=2) + "\n")
