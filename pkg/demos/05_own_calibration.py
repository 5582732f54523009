"""
Plugging in measured numbers
============================

The shipped performance curves are synthetic.  With real strong-scaling and
checkpoint measurements, write them as knots in a calibration file and point
a config at it.  Here a measured-looking table is faked for the "large" size
with a communication-bound knee past 16 replicas.
"""

import json
import tempfile
from pathlib import Path

from elastic_sim import compare, load_config
from elastic_sim.calibration import calibration_to_dict, default_calibration

calib = calibration_to_dict(default_calibration())
calib["classes"]["large"]["step_time_knots"] = [[8, 0.095], [16, 0.052], [24, 0.045], [32, 0.043]]
calib["classes"]["large"]["overhead_knots"]["checkpoint"] = [[8, 14.0], [32, 4.5]]

tmp = Path(tempfile.mkdtemp())
(tmp / "calibration.json").write_text(json.dumps(calib, indent=2))
(tmp / "config.json").write_text(json.dumps({
    "calibration": "calibration.json",
    "generator": {"submission_gap": 60},
    "scheduler": {"rescale_gap": 180},
}))

config = load_config(tmp / "config.json")
for policy, trace, m in compare(config, seed=5):
    print(f"{policy.value:14s} total {m.total_time:8.1f}  util {m.utilization:.3f}")
print("files in", tmp)

# Scheduler rankings depend on the curves: with this flatter scaling past 16
# replicas, rescaling "large" jobs buys little and the elastic scheduler can
# lose to moldable on total time for a given workload.
