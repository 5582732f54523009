import json
from collections import Counter

import pytest

from elastic_sim.calibration import default_calibration, load_calibration, save_calibration
from elastic_sim.model import ConfigError, Policy
from elastic_sim.workload import (CONFIG_DEFAULTS, GeneratorParams, _uniforms, config_from_dict,
                                  generate, load_config, load_workload, save_workload)

CALIB = default_calibration()
MASK = (1 << 64) - 1


def philox4x64_10(counter, key):
    """Reference Philox4x64-10 block function, straight from the published constants."""
    m0, m1 = 0xD2E7470EE14C6C93, 0xCA5A826395121157
    w0, w1 = 0x9E3779B97F4A7C15, 0xBB67AE8584CAA73B
    x, k = list(counter), list(key)
    for r in range(10):
        if r:
            k = [(k[0] + w0) & MASK, (k[1] + w1) & MASK]
        p0, p1 = m0 * x[0], m1 * x[2]
        x = [(p1 >> 64) ^ x[1] ^ k[0], p1 & MASK, (p0 >> 64) ^ x[3] ^ k[1], p0 & MASK]
    return x


def test_uniform_stream_matches_reference_philox():
    words = philox4x64_10([1, 0, 0, 0], [42, 0]) + philox4x64_10([2, 0, 0, 0], [42, 0])
    expected = [(w >> 11) * 2.0 ** -53 for w in words]
    assert list(_uniforms(42, 8)) == expected


def test_deterministic():
    assert generate(GeneratorParams(), 9, CALIB).jobs == generate(GeneratorParams(), 9, CALIB).jobs
    assert generate(GeneratorParams(), 9, CALIB).jobs != generate(GeneratorParams(), 10, CALIB).jobs


def test_submission_times():
    w = generate(GeneratorParams(n_jobs=16, submission_gap=90.0), 0, CALIB)
    assert [j.submit_time for j in w.jobs] == [90.0 * k for k in range(16)]
    assert w.jobs[-1].submit_time == 1350.0


def test_degenerate_priority_range():
    w = generate(GeneratorParams(priority_range=(3, 3)), 5, CALIB)
    assert {j.priority for j in w.jobs} == {3}


def test_class_defaults_copied():
    for j in generate(GeneratorParams(), 2, CALIB).jobs:
        cls = CALIB[j.class_id]
        assert (j.min_replicas, j.max_replicas) == (cls.min_replicas, cls.max_replicas)


def test_class_and_priority_frequencies():
    classes, prios = Counter(), Counter()
    for seed in range(500):
        for j in generate(GeneratorParams(), seed, CALIB).jobs:
            classes[j.class_id] += 1
            prios[j.priority] += 1
    for counts, k in ((classes, 4), (prios, 5)):
        n = sum(counts.values())
        chi2 = sum((c - n / k) ** 2 / (n / k) for c in counts.values())
        assert len(counts) == k
        assert chi2 < 20.0  # far beyond the 0.1% critical value for 3 or 4 dof


def test_weighted_classes():
    p = GeneratorParams(n_jobs=200, class_weights=(("small", 1.0), ("large", 0.0)))
    assert {j.class_id for j in generate(p, 0, CALIB).jobs} == {"small"}
    with pytest.raises(ConfigError):
        GeneratorParams(class_weights=(("small", 0.5),))


def test_workload_round_trip(tmp_path):
    w = generate(GeneratorParams(), 3, CALIB)
    save_workload(w, tmp_path / "w.json")
    back = load_workload(tmp_path / "w.json")
    assert back.jobs == w.jobs and back.seed == 3 and back.params == w.params


def test_calibration_round_trip(tmp_path):
    save_calibration(CALIB, tmp_path / "c.json")
    assert load_calibration(tmp_path / "c.json") == CALIB


def test_calibration_unknown_key_rejected():
    doc = {"classes": {"a": {"work_units": 1, "step_time_knots": [[1, 1.0]],
                             "overhead_knots": {}, "bandwidth": 3}}}
    with pytest.raises(ConfigError) as err:
        config_from_dict({"calibration": doc})
    assert "bandwidth" in str(err.value)


def test_config_min_above_max_names_field():
    doc = {"workload": {"jobs": [{"id": "a", "class_id": "small", "min_replicas": 8,
                                  "max_replicas": 2, "priority": 1}]}}
    with pytest.raises(ConfigError) as err:
        config_from_dict(doc)
    assert "min_replicas" in str(err.value)


def test_config_defaults():
    cfg = config_from_dict({"cluster": {"total_slots": 32}})
    assert cfg.cluster.launcher_slots == CONFIG_DEFAULTS["cluster.launcher_slots"] == 1
    assert cfg.scheduler.policy is Policy.ELASTIC
    assert cfg.scheduler.rescale_gap == 180.0
    assert cfg.generator.submission_gap == 90.0


def test_config_unknown_section_and_infinite_gap(tmp_path):
    with pytest.raises(ConfigError):
        config_from_dict({"clutser": {}})
    (tmp_path / "cfg.json").write_text(json.dumps({"scheduler": {"rescale_gap": "inf"}}))
    assert load_config(tmp_path / "cfg.json").scheduler.rescale_gap == float("inf")


def test_config_file_references(tmp_path):
    save_calibration(CALIB, tmp_path / "cal.json")
    save_workload(generate(GeneratorParams(n_jobs=3), 1, CALIB), tmp_path / "wl.json")
    (tmp_path / "cfg.json").write_text(json.dumps({"calibration": "cal.json",
                                                   "workload": "wl.json"}))
    cfg = load_config(tmp_path / "cfg.json")
    assert len(cfg.workload.jobs) == 3 and cfg.calibration == CALIB


def test_workload_unknown_class_rejected():
    doc = {"workload": {"jobs": [{"id": "a", "class_id": "tiny", "min_replicas": 1,
                                  "max_replicas": 2, "priority": 1}]}}
    with pytest.raises(ConfigError):
        config_from_dict(doc)
