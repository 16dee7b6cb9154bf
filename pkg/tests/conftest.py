"""Collects acceptance-criterion outcomes and prints one line per criterion."""

import pytest

_CRITERIA: dict = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion checked by the test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or not (rep.when == "call" or rep.failed):
        return
    number, title = marker.args
    notes = [v for k, v in item.user_properties if k == "note"]
    prev_ok, prev_notes = _CRITERIA.get(number, ("", True, []))[1:]
    _CRITERIA[number] = (title, prev_ok and rep.passed, prev_notes + notes)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        title, ok, notes = _CRITERIA[number]
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {title}"
        for note in notes:
            line += f"  [note: {note}]"
        terminalreporter.write_line(line)
