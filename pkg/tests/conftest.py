import sys
from pathlib import Path

import pytest
from hypothesis import settings

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile("default", derandomize=True, print_blob=True)
settings.load_profile("default")


_ACCEPTANCE = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, title): numbered acceptance criterion")


def pytest_runtest_logreport(report):
    number = getattr(report, "acceptance", None)
    if number is None:
        return
    if report.when == "call" or report.outcome != "passed":
        _ACCEPTANCE[number] = report


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is not None:
        report.acceptance = marker.args[0]
        report.acceptance_title = marker.args[1]


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        rep = _ACCEPTANCE[number]
        if rep.passed:
            status = "PASS"
        elif hasattr(rep, "wasxfail"):
            status = "FAIL (expected: %s)" % rep.wasxfail
        else:
            status = "FAIL"
        terminalreporter.write_line(f"criterion {number:2d} {rep.acceptance_title}: {status}")
