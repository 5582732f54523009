"""
Two jobs, one shrink, one expand
================================

A minimal scenario small enough to check by hand: an 8-slot cluster with no
launcher slots and free rescaling.  Job A starts alone on all 8 slots.  When
B arrives at t=50 with the same priority, A is shrunk to its minimum so B can
start with the 6 slots that freed up.  When B finishes, A grows back.
"""

from elastic_sim import ClusterConfig, JobClass, JobSpec, Policy, SchedulerConfig, simulate
from elastic_sim.metrics import compute_metrics, utilization_profile
from elastic_sim.perf import OVERHEAD_COMPONENTS, ClassPerf
from elastic_sim.workload import Workload

# step time 8/n seconds, 100 steps of work, rescaling costs nothing
perf = ClassPerf(step_time_knots=[(n, 8.0 / n) for n in (2, 4, 6, 8)],
                 overhead_knots={c: [(1, 0.0)] for c in OVERHEAD_COMPONENTS})
calib = {"jac": JobClass("jac", 100, 0, perf, 2, 8)}

jobs = [JobSpec("A", "jac", 2, 8, 1, 0.0),
        JobSpec("B", "jac", 2, 8, 1, 50.0)]

trace = simulate(ClusterConfig(8, 0), SchedulerConfig(Policy.ELASTIC, 0.0), Workload(jobs), calib)

for r in trace.records:
    print(f"{r.time:8.2f}  {r.event:13s} {r.job_id}  {r.replicas_from or '':>2} -> {r.replicas_to or ''}")

# Who holds which slots over time
for step in utilization_profile(trace):
    print(f"from t={step.time:7.2f}: {dict(step.by_job)}")

m = compute_metrics(trace)
print(m.summary())
# A did 50 steps on 8 replicas, 133.3 s on 2 (33.3 steps), then 16.7 steps on 8:
# total 200 s, cluster never idle.
