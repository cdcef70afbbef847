import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

_criteria = {}
_outcomes = {}


def pytest_collection_modifyitems(items):
    for item in items:
        marker = item.get_closest_marker("criterion")
        if marker is not None:
            number, title = marker.args
            _criteria[item.nodeid] = (number, title)


def pytest_runtest_logreport(report):
    if report.nodeid not in _criteria:
        return
    failed = report.failed or (report.when == "call" and report.skipped)
    previous = _outcomes.get(report.nodeid, "PASS")
    if failed:
        _outcomes[report.nodeid] = "FAIL"
    elif report.when == "call":
        _outcomes[report.nodeid] = previous


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    by_number = {}
    for nodeid, (number, title) in _criteria.items():
        if nodeid not in _outcomes:
            continue
        status = by_number.get(number, (title, "PASS"))[1]
        if _outcomes[nodeid] == "FAIL":
            status = "FAIL"
        by_number[number] = (title, status)
    terminalreporter.section("acceptance criteria")
    for number in sorted(by_number):
        title, status = by_number[number]
        terminalreporter.write_line(f"criterion {number}: {status}  {title}")
