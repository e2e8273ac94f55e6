import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

_CRITERIA = []


@pytest.fixture
def criterion():
    """Record (number, label, passed, seconds) for the acceptance summary."""

    def record(number, label, passed, seconds):
        line = "criterion %2d %s  %-58s %7.2fs" % (number, "PASS" if passed else "FAIL", label, seconds)
        _CRITERIA.append((number, line))
        print(line)

    return record


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(_CRITERIA):
            terminalreporter.write_line(line)
