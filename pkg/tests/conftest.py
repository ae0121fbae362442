import math

import pytest

from gfcsync.core import GfcParams, NetworkParams

_ACCEPTANCE_LINES = []


@pytest.fixture
def net():
    return NetworkParams()


@pytest.fixture
def params():
    return GfcParams()


@pytest.fixture
def lossless():
    """Default converter with the virtual resistance removed."""
    return GfcParams(r_v=0.0)


@pytest.fixture
def criterion():
    def report(name, ok, detail=""):
        line = f"[{'PASS' if ok else 'FAIL'}] {name}" + (f"  ({detail})" if detail else "")
        _ACCEPTANCE_LINES.append(line)
        print(line)
        return ok

    return report


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


DEG = math.pi / 180.0
