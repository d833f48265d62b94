import math

import pytest

from cppds_smcs.topology import build_civanlar


class StubStream:
    """Replays fixed uniforms; ``uniform_open_closed`` and ``uniform`` share one queue."""

    def __init__(self, *values):
        self.values = list(values)
        self.calls = 0

    def _next(self):
        self.calls += 1
        return self.values.pop(0)

    def uniform_open_closed(self, size=None):
        assert size is None
        return self._next()

    def uniform(self, size=None):
        assert size is None
        return self._next()


@pytest.fixture
def stub():
    return StubStream


@pytest.fixture(scope="session")
def civanlar():
    return build_civanlar()


E_HALF = math.exp(-0.5)


_CRITERIA = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_CRITERIA] = []


@pytest.fixture
def criterion(request):
    """``criterion(label, ok, detail)`` records a PASS/FAIL line, prints it and asserts."""

    def report(label, ok, detail):
        line = f"{'PASS' if ok else 'FAIL'}  criterion {label}: {detail}"
        request.config.stash[_CRITERIA].append(line)
        print(line)
        assert ok, line

    return report


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_CRITERIA, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: s.split("criterion ")[1]):
            terminalreporter.write_line(line)
