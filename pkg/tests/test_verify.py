import dataclasses

import pytest

from elastic_sim.calibration import default_calibration
from elastic_sim.engine import simulate
from elastic_sim.model import ClusterConfig, Policy, SchedulerConfig
from elastic_sim.verify import (check_gap_separation, check_replica_bounds, check_trace,
                                check_work_conservation, replay_work)
from elastic_sim.workload import GeneratorParams, generate

CALIB = default_calibration()


def test_golden_replay(golden):
    trace = simulate(*golden)
    assert check_trace(trace, golden[3]) == []
    assert replay_work(trace, golden[3]) == {"A": pytest.approx(100.0, rel=1e-9),
                                             "B": pytest.approx(100.0, rel=1e-9)}


def test_checks_catch_tampering():
    w = generate(GeneratorParams(submission_gap=30.0), 0, CALIB)
    trace = simulate(ClusterConfig(), SchedulerConfig(Policy.ELASTIC, 180.0), w, CALIB)
    assert check_trace(trace, CALIB) == []

    bad = dataclasses.replace(trace, records=list(trace.records))
    i = next(k for k, r in enumerate(bad.records) if r.event == "created")
    bad.records[i] = dataclasses.replace(bad.records[i], replicas_to=1000)
    assert check_replica_bounds(bad)
    assert check_work_conservation(bad, CALIB)

    tight = dataclasses.replace(trace, scheduler=SchedulerConfig(Policy.ELASTIC, 1e9))
    assert bool(check_gap_separation(tight)) == (trace.rescale_count() > 0)
