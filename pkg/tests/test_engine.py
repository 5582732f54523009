import dataclasses
import math

import pytest

from elastic_sim.calibration import default_calibration
from elastic_sim.engine import (COMPLETED, CREATED, EXPAND_DONE, EXPAND_START, SHRINK_DONE,
                                SHRINK_START, SUBMITTED, fit_to_cluster, simulate,
                                simulate_with_stats, trace_to_csv, trace_to_dict)
from elastic_sim.model import ClusterConfig, ConfigError, JobSpec, Policy, SchedulerConfig
from elastic_sim.perf import job_runtime
from elastic_sim.workload import GeneratorParams, Workload, generate

CALIB = default_calibration()


def decisions(trace):
    keep = (CREATED, SHRINK_START, SHRINK_DONE, EXPAND_START, EXPAND_DONE, COMPLETED)
    return [(r.time, r.event, r.job_id, r.replicas_from, r.replicas_to)
            for r in trace.records if r.event in keep]


def test_golden_trace(golden):
    trace = simulate(*golden)
    got = decisions(trace)
    want = [
        (0.0, CREATED, "A", None, 8),
        (50.0, SHRINK_START, "A", 8, 2),
        (50.0, SHRINK_DONE, "A", 8, 2),
        (50.0, CREATED, "B", None, 6),
        (50.0 + 400.0 / 3, COMPLETED, "B", 6, None),
        (50.0 + 400.0 / 3, EXPAND_START, "A", 2, 8),
        (50.0 + 400.0 / 3, EXPAND_DONE, "A", None, 8),
        (200.0, COMPLETED, "A", 8, None),
    ]
    assert [g[1:] for g in got] == [w[1:] for w in want]
    for g, w in zip(got, want):
        assert g[0] == pytest.approx(w[0], rel=1e-9)


def test_golden_work_residual(golden):
    _, residuals = simulate_with_stats(*golden)
    assert max(residuals.values()) < 1e-9


def test_empty_workload():
    trace = simulate(ClusterConfig(), SchedulerConfig(), Workload([]), CALIB)
    assert trace.records == []


def test_single_job_runs_at_max():
    spec = JobSpec("j", "medium", 4, 16, 3, 0.0)
    trace = simulate(ClusterConfig(), SchedulerConfig(), Workload([spec]), CALIB)
    assert [r.event for r in trace.records] == [SUBMITTED, CREATED, COMPLETED]
    assert trace.records[1].replicas_to == 16
    assert trace.records[2].time == pytest.approx(job_runtime(CALIB["medium"], 16), rel=1e-12)


def test_unknown_class_rejected():
    with pytest.raises(ConfigError):
        simulate(ClusterConfig(), SchedulerConfig(), Workload([JobSpec("j", "huge", 1, 2, 1, 0.0)]),
                 CALIB)


def test_max_replicas_capped_to_cluster():
    spec = JobSpec("x", "xlarge", 16, 64, 1, 0.0)
    assert fit_to_cluster(spec, ClusterConfig(64, 1)).max_replicas == 63
    with pytest.raises(ConfigError):
        fit_to_cluster(JobSpec("x", "xlarge", 64, 64, 1, 0.0), ClusterConfig(64, 1))


@pytest.mark.parametrize("seed", range(5))
def test_moldable_equals_elastic_with_infinite_gap(seed):
    w = generate(GeneratorParams(), seed, CALIB)
    mold = simulate(ClusterConfig(), SchedulerConfig(Policy.MOLDABLE, 180.0), w, CALIB)
    inf = simulate(ClusterConfig(), SchedulerConfig(Policy.ELASTIC, math.inf), w, CALIB)
    assert mold.records == inf.records


@pytest.mark.parametrize("policy", [Policy.RIGID_MIN, Policy.RIGID_MAX])
def test_rigid_never_rescales(policy):
    for seed in range(5):
        trace = simulate(ClusterConfig(), SchedulerConfig(policy, 0.0),
                         generate(GeneratorParams(), seed, CALIB), CALIB)
        assert trace.rescale_count() == 0


def test_deterministic():
    w = generate(GeneratorParams(submission_gap=30.0), 7, CALIB)
    runs = [simulate(ClusterConfig(), SchedulerConfig(Policy.ELASTIC, 0.0), w, CALIB)
            for _ in range(2)]
    assert runs[0].records == runs[1].records
    assert trace_to_csv(runs[0]) == trace_to_csv(runs[1])


def test_elastic_actually_rescales():
    w = generate(GeneratorParams(submission_gap=60.0), 0, CALIB)
    trace = simulate(ClusterConfig(), SchedulerConfig(Policy.ELASTIC, 0.0), w, CALIB)
    assert trace.events(SHRINK_START) and trace.events(EXPAND_START)


def test_phase_machine_per_job():
    w = generate(GeneratorParams(submission_gap=60.0), 3, CALIB)
    trace = simulate(ClusterConfig(), SchedulerConfig(Policy.ELASTIC, 120.0), w, CALIB)
    for spec in w.jobs:
        seq = [r.event for r in trace.records if r.job_id == spec.id]
        assert seq[0] == SUBMITTED and seq[-1] == COMPLETED
        body = [e for e in seq[1:-1] if e != "enqueued"]
        assert body[0] == CREATED
        pairs = body[1:]
        assert len(pairs) % 2 == 0
        for start, done in zip(pairs[::2], pairs[1::2]):
            assert (start, done) in ((SHRINK_START, SHRINK_DONE), (EXPAND_START, EXPAND_DONE))


def test_trace_dict_writes_infinite_gap_as_string():
    w = generate(GeneratorParams(n_jobs=2), 0, CALIB)
    trace = simulate(ClusterConfig(), SchedulerConfig(Policy.ELASTIC, math.inf), w, CALIB)
    assert trace_to_dict(trace)["scheduler"]["rescale_gap"] == "inf"


def test_launcher_zero_cluster():
    w = generate(GeneratorParams(submission_gap=0.0), 1, CALIB)
    trace = simulate(dataclasses.replace(ClusterConfig(), launcher_slots=0),
                     SchedulerConfig(Policy.ELASTIC, 0.0), w, CALIB)
    assert len(trace.events(COMPLETED)) == 16
