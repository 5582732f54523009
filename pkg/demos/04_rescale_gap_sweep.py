"""
Throttling rescales
===================

The rescale gap is the minimum time between two scheduling actions on the
same job.  At zero the elastic scheduler reshapes jobs freely; as it grows
the scheduler loses flexibility, and at infinity it is the moldable scheduler.
"""

import math

from elastic_sim import Config, SweepSpec, sweep
from elastic_sim.model import Policy

gaps = (0, 120, 300, 600, 1200, math.inf)
result = sweep(Config(), SweepSpec("rescale_gap", gaps, 180.0), n_repeats=100)

print(f"{'gap':>8s}{'util':>8s}{'total':>9s}{'WMRT':>8s}{'WMCT':>8s}")
for g in gaps:
    m = result[(g, Policy.ELASTIC)]
    print(f"{g:8g}{m['utilization']:8.3f}{m['total_time']:9.1f}"
          f"{m['weighted_mean_response']:8.1f}{m['weighted_mean_completion']:8.1f}")
print("moldable", result[(math.inf, Policy.MOLDABLE)])
