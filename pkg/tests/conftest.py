import pytest

from vism.numeric import PrecisionContext

_CRITERIA: list[str] = []


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long-running high-precision checks")


@pytest.fixture
def ctx():
    return PrecisionContext(30)


@pytest.fixture
def verdict():
    """Record one PASS/FAIL line for the acceptance summary, then assert."""

    def record(label: str, ok: bool, detail: str):
        line = f"{'PASS' if ok else 'FAIL'}  {label}: {detail}"
        _CRITERIA.append(line)
        print(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for line in _CRITERIA:
            terminalreporter.write_line(line)
