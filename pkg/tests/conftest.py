import numpy as np
import pytest

from kmustar import bench
from kmustar.datagen import gen_grid, gen_uniform_grid

# (criterion, passed, detail) lines printed at the end of the session
ACCEPTANCE = []
# (dataset, k, run, sse_kmpp, sse_kmu, sse_kms, most_jumps) for every benchmark cell executed
CELLS = []

_run_cell = bench.run_cell


def _recording_run_cell(data, k, run, plan):
    reports = _run_cell(data, k, run, plan)
    by_algo = {r.algorithm: r for r in reports}
    CELLS.append((data.name, k, run, by_algo["kmpp"].sse, by_algo["kmu"].sse, by_algo["kms"].sse,
                  max(by_algo["kmu"].jumps_attempted, by_algo["kms"].jumps_attempted)))
    return reports


bench.run_cell = _recording_run_cell


def dominance_violations():
    return [c for c in CELLS if not (c[5] <= c[4] <= c[3])]


def pytest_collection_modifyitems(items):
    # the acceptance gate goes last so the dominance check sees every cell
    items.sort(key=lambda item: item.path.name == "test_acceptance.py")


@pytest.fixture
def acceptance():
    def record(criterion, passed, detail=""):
        ACCEPTANCE.append((criterion, bool(passed), detail))
        return passed
    return record


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def grid_a():
    return gen_grid()


@pytest.fixture(scope="session")
def flat_b():
    return gen_uniform_grid(36)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for name, ok, detail in ACCEPTANCE:
            terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}  {detail}")
    if CELLS:
        bad = dominance_violations()
        terminalreporter.write_line(
            f"dominance kms <= kmu <= kmpp over {len(CELLS)} benchmark cells: "
            f"{len(bad)} violations"
        )


def pytest_sessionfinish(session, exitstatus):
    if dominance_violations():
        session.exitstatus = 1
