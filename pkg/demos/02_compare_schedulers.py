"""
Four schedulers on one workload
===============================

Sixteen jobs drawn from the four Jacobi problem sizes arrive 90 s apart on
a 64-slot cluster.  The same workload is run under the two rigid baselines,
the moldable scheduler and the elastic scheduler.
"""

import sys

from elastic_sim import Config, compare

seed = int(sys.argv[1]) if len(sys.argv) > 1 else 0
config = Config()

print(f"{'scheduler':14s}{'total [s]':>11s}{'util':>8s}{'WMRT [s]':>10s}{'WMCT [s]':>10s}{'rescales':>10s}")
for policy, trace, m in compare(config, seed):
    print(f"{policy.value:14s}{m.total_time:11.1f}{m.utilization:8.3f}"
          f"{m.weighted_mean_response:10.1f}{m.weighted_mean_completion:10.1f}"
          f"{trace.rescale_count():10d}")

# which job went where, under the elastic scheduler
trace = compare(config, seed)[-1][1]
for spec in trace.jobs.values():
    sizes = [r.replicas_to for r in trace.records
             if r.job_id == spec.id and r.replicas_to is not None]
    print(f"{spec.id} {spec.class_id:7s} prio {spec.priority}  submitted {spec.submit_time:6.0f}  "
          f"replicas {sizes}")
