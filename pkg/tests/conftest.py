import pytest

from elastic_sim.model import ClusterConfig, JobClass, JobSpec, Policy, SchedulerConfig
from elastic_sim.perf import OVERHEAD_COMPONENTS, ClassPerf
from elastic_sim.workload import Workload

ZERO_OVERHEAD = {c: [(1, 0.0)] for c in OVERHEAD_COMPONENTS}


def eight_over_n(knots=(2, 4, 6, 8), work=100, lo=2, hi=8, name="jac"):
    perf = ClassPerf(step_time_knots=[(n, 8.0 / n) for n in knots], overhead_knots=ZERO_OVERHEAD)
    return JobClass(name, work, 0, perf, lo, hi)


@pytest.fixture
def golden():
    """Two equal-priority jobs on 8 slots, no launcher, no overhead, gap 0."""
    calib = {"jac": eight_over_n()}
    jobs = [JobSpec("A", "jac", 2, 8, 1, 0.0), JobSpec("B", "jac", 2, 8, 1, 50.0)]
    return (ClusterConfig(8, 0, False), SchedulerConfig(Policy.ELASTIC, 0.0),
            Workload(jobs, label="golden"), calib)


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    if mod and mod.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in mod.RESULTS:
            terminalreporter.write_line(line)
