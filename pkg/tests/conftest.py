import pytest

_LINES = []


@pytest.fixture
def criterion():
    """Record one acceptance line: criterion(label, ok, summary)."""
    def record(label, ok, summary):
        line = f"{'PASS' if ok else 'FAIL'}  {label}: {summary}"
        _LINES.append(line)
        print(line)
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for line in _LINES:
            terminalreporter.write_line(line)
