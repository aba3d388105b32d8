import numpy as np
import pytest

# Acceptance tests carry @pytest.mark.criterion(n, "label"); the hook below
# prints one pass/fail line per criterion at the end of the session.

_RESULTS = {}


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "criterion(num, label): acceptance-gate criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker and report.when == "call":
        num, label = marker.args
        prev = _RESULTS.get(num)
        ok = report.passed and (prev is None or prev[0])
        _RESULTS[num] = (ok, label)


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    tw = terminalreporter
    tw.section("acceptance criteria")
    for num in sorted(_RESULTS):
        ok, label = _RESULTS[num]
        tw.write_line(f"criterion {num:2d} ({label}): "
                      f"{'PASS' if ok else 'FAIL'}")


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
