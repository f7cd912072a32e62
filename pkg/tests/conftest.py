import pytest

from zeromodes.modes import family_historical, family_step


@pytest.fixture(scope="session")
def historical():
    return family_historical()


@pytest.fixture(scope="session")
def step282():
    return family_step(2.82)


@pytest.fixture(scope="session")
def step282_raw():
    """Step mode with unit amplitude (not normalized)."""
    return family_step(2.82, normalize_mode=False)


ACCEPTANCE_LOG = pytest.StashKey[list]()


@pytest.fixture
def verdict(request):
    """Record one PASS/FAIL line for an acceptance criterion."""
    log = request.config.stash.setdefault(ACCEPTANCE_LOG, [])

    def record(criterion: str, passed: bool, detail: str) -> bool:
        line = f"[{'PASS' if passed else 'FAIL'}] criterion {criterion}: {detail}"
        print(line)
        log.append(line)
        return passed

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    log = config.stash.get(ACCEPTANCE_LOG, [])
    if log:
        terminalreporter.section("acceptance criteria")
        for line in log:
            terminalreporter.write_line(line)
