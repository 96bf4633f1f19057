import pytest

from fdpnc.core import SystemParams

_CRITERIA = []


@pytest.fixture
def criterion():
    """Record one acceptance-criterion verdict for the end-of-run summary."""

    def record(number, name, ok, detail=""):
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {name}" + (f" ({detail})" if detail else "")
        _CRITERIA.append((number, line))
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(_CRITERIA):
            terminalreporter.write_line(line)


@pytest.fixture
def unit_params():
    return SystemParams.symmetric(sigma2=0.1, kappa=0.0)
