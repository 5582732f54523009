"""Discrete-event simulator for priority-based elastic HPC job scheduling."""

from .calibration import default_calibration, load_calibration
from .engine import DeadlockError, SimulationError, Trace, simulate
from .experiments import SweepSpec, compare, sweep
from .metrics import MetricsReport, compute_metrics, utilization_profile
from .model import (ClusterConfig, ConfigError, JobClass, JobSpec, JobState, Phase, Policy,
                    SchedulerConfig, effective_priority_cmp)
from .perf import ClassPerf, OverheadBreakdown, job_runtime, rescale_overhead, step_time
from .policy import (Action, ActionKind, SchedulerState, apply_policy_variant, on_slots_freed,
                     on_submit, rescale_eligible)
from .workload import (Config, GeneratorParams, Workload, generate, load_config, load_workload,
                       save_workload)

__version__ = "0.1.0"
