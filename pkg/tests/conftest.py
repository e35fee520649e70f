import sys
from pathlib import Path

import pytest

from hypabc import bundled_space

HERE = Path(__file__).parent
ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def rf_space():
    return bundled_space("rf")


@pytest.fixture
def sphere3():
    return bundled_space("sphere3")


@pytest.fixture
def acceptance_report():
    def report(name, ok, detail=""):
        line = f"[{'PASS' if ok else 'FAIL'}] {name}" + (f": {detail}" if detail else "")
        ACCEPTANCE_LINES.append(line)
        assert ok, line

    return report


@pytest.fixture
def sphere_script():
    """Command prefix for the standalone mixed-sphere reimplementation."""
    return f"{sys.executable} {HERE / 'helpers' / 'sphere_cmd.py'}"


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
