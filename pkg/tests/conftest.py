"""Collects one pass/fail line per acceptance criterion and prints them at the end of the run."""

import pytest

_RESULTS: dict[int, tuple[bool, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number n")


@pytest.fixture
def record(request):
    marker = request.node.get_closest_marker("criterion")
    number = marker.args[0]

    def _record(ok: bool, detail: str):
        _RESULTS[number] = (bool(ok), detail)
        return ok

    return _record


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or rep.when != "call":
        return
    number = marker.args[0]
    if rep.failed and number not in _RESULTS:
        _RESULTS[number] = (False, f"error: {call.excinfo.typename}: {call.excinfo.value}")
    elif rep.failed:
        _RESULTS[number] = (False, _RESULTS[number][1])


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_RESULTS):
        ok, detail = _RESULTS[number]
        terminalreporter.write_line(f"[{number:2d}] {'PASS' if ok else 'FAIL'}  {detail}")
