import pytest

_ACCEPTANCE: dict[str, tuple[str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(label): acceptance criterion this test decides")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    label = marker.args[0]
    if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
        status = {"passed": "PASS", "failed": "FAIL", "skipped": "SKIP"}[rep.outcome]
        detail = getattr(item, "acceptance_detail", "")
        if rep.outcome == "skipped" and isinstance(rep.longrepr, tuple):
            detail = rep.longrepr[2]
        _ACCEPTANCE[item.nodeid] = (f"{status}  {label}", detail)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for line, detail in _ACCEPTANCE.values():
        terminalreporter.write_line(f"{line}" + (f"  ({detail})" if detail else ""))


@pytest.fixture
def detail(request):
    """Attach a one-line measurement to the acceptance summary."""

    def record(text: str) -> None:
        request.node.acceptance_detail = text

    return record
