import pytest
from hypothesis import HealthCheck, settings

# numba compiles on first call, so wall-clock deadlines are meaningless here
settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

_LINES = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_LINES] = []


@pytest.fixture
def verdict(request, capsys):
    """Record and show one PASS/FAIL line for an acceptance criterion, then assert it."""
    def emit(n: int, title: str, ok: bool, detail: str) -> None:
        line = f"[{'PASS' if ok else 'FAIL'}] C{n:02d} {title}: {detail}"
        request.config.stash[_LINES].append(line)
        with capsys.disabled():
            print("\n" + line)
        assert ok, line
    return emit


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_LINES, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
