import math

import pytest

from elastic_sim.experiments import SweepSpec, max_workers, means_by_policy, sweep, sweep_to_csv
from elastic_sim.model import POLICY_ORDER, ConfigError, Policy
from elastic_sim.workload import Config


def test_sweep_spec_validation():
    with pytest.raises(ConfigError):
        SweepSpec("gap", (1.0,))
    with pytest.raises(ConfigError):
        SweepSpec("submission_gap", ())
    with pytest.raises(ConfigError):
        SweepSpec("submission_gap", (math.inf,))
    SweepSpec("rescale_gap", (0.0, math.inf))


def test_parallel_sweep_matches_serial():
    spec = SweepSpec("submission_gap", (0.0, 120.0), 180.0)
    assert sweep(Config(), spec, 3, workers=2) == sweep(Config(), spec, 3, workers=1)


def test_sweep_csv_layout():
    spec = SweepSpec("rescale_gap", (math.inf, 0.0))
    lines = sweep_to_csv(spec, sweep(Config(), spec, 1, workers=1)).splitlines()
    assert len(lines) == 1 + 2 * 4 * 4
    assert lines[1].startswith("0.0,min_replicas,total_time,")
    assert lines[-1].startswith("inf,elastic,weighted_mean_completion,")


def test_thread_env(monkeypatch):
    monkeypatch.setenv("ELASTIC_SIM_THREADS", "3")
    assert max_workers() == 3
    monkeypatch.setenv("ELASTIC_SIM_THREADS", "many")
    with pytest.raises(ConfigError):
        max_workers()


def test_elastic_has_highest_utilization_everywhere():
    gaps = (0.0, 60.0, 120.0, 180.0, 240.0, 300.0)
    u = means_by_policy(sweep(Config(), SweepSpec("submission_gap", gaps, 180.0), 100),
                        gaps, "utilization")
    for i in range(len(gaps)):
        assert u[Policy.ELASTIC][i] == max(u[p][i] for p in POLICY_ORDER)


def test_largest_rescale_gap_approaches_moldable():
    result = sweep(Config(), SweepSpec("rescale_gap", (1e6,), 180.0), 20)
    el, mol = result[(1e6, Policy.ELASTIC)], result[(1e6, Policy.MOLDABLE)]
    for m in el:
        assert el[m] == pytest.approx(mol[m], rel=0.01)
