import pytest

_LINES = []


class CriterionLog:
    """Collects one PASS/FAIL line per acceptance criterion."""

    def record(self, number, name, ok, detail=""):
        line = f"{'PASS' if ok else 'FAIL'} criterion {number} {name}: {detail}"
        _LINES.append(line)
        print(line)
        return ok


@pytest.fixture(scope="session")
def criteria():
    return CriterionLog()


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for line in _LINES:
            terminalreporter.write_line(line)
