"""Per-criterion pass/fail report for the acceptance suite."""

import pytest

_OUTCOMES: dict[int, tuple[str, bool, list[str]]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion covered by the test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or report.when != "call":
        return
    number, title = marker.args
    notes = [v for k, v in item.user_properties if k == "note"]
    _, ok, prev = _OUTCOMES.get(number, (title, True, []))
    _OUTCOMES[number] = (title, ok and report.passed, prev + notes)


def pytest_terminal_summary(terminalreporter):
    if not _OUTCOMES:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_OUTCOMES):
        title, ok, notes = _OUTCOMES[number]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  criterion {number:>2}: {title}")
        for note in notes:
            terminalreporter.write_line(f"        {note}")
