"""Collects acceptance-criterion outcomes and prints one PASS/FAIL line each
at the end of the session."""

import pytest

_RESULTS = {}


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.failed):
        return
    info = dict(report.user_properties).get("acceptance")
    if info is None:
        return
    number, title = info
    detail = dict(report.user_properties).get("measured", "")
    _RESULTS[number] = (title, report.outcome, detail)


@pytest.fixture(autouse=True)
def _tag_acceptance(request, record_property):
    marker = request.node.get_closest_marker("acceptance")
    if marker is not None:
        record_property("acceptance", tuple(marker.args))


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_RESULTS):
        title, outcome, detail = _RESULTS[number]
        verdict = "PASS" if outcome == "passed" else "FAIL"
        line = f"{verdict}  #{number} {title}"
        terminalreporter.write_line(f"{line}  [{detail}]" if detail else line)
