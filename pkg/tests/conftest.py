import pytest

from driftscope.log_ingest import EventLog

_criteria = {}


@pytest.fixture
def worked_log():
    """L = {baabc^4, bcc^1, bcba^2}."""
    return EventLog.from_variants([("baabc", 4), ("bcc", 1), ("bcba", 2)])


@pytest.fixture
def criterion(request):
    """Record one acceptance criterion outcome for the terminal summary."""
    name = request.node.get_closest_marker("criterion").args[0]
    yield name
    rep = getattr(request.node, "rep_call", None)
    _criteria[name] = "PASS" if rep is not None and rep.passed else "FAIL"


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        item.rep_call = rep


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(name): acceptance criterion")


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_criteria, key=lambda s: int(s.split()[0].lstrip("AC"))):
        terminalreporter.write_line(f"{_criteria[name]}  {name}")
