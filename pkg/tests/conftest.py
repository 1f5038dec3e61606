from pathlib import Path

import numpy as np
import pytest

from opinion_sim.scenario import load_scenario

SCENARIOS = Path(__file__).resolve().parents[1] / "scenarios"


@pytest.fixture
def bundled():
    def load(name, **kw):
        return load_scenario(SCENARIOS / f"{name}.json", **kw)
    return load


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("acceptance")
    if mark is None:
        return
    if rep.when == "call" or rep.failed:
        results = item.config.stash.setdefault(_RESULTS, {})
        num, title = mark.args
        if rep.when == "call" or num not in results:
            results[num] = (title, rep.outcome)


_RESULTS = pytest.StashKey[dict]()


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results = config.stash.get(_RESULTS, {})
    if not results:
        return
    terminalreporter.write_sep("=", "acceptance checks")
    for num in sorted(results):
        title, outcome = results[num]
        status = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"[{num:2d}] {status}  {title}")
