from __future__ import annotations

import pytest

from caspr import inflation

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def patch4():
    return inflation.generate_patch("Gamma", 4)


@pytest.fixture(scope="session")
def patch6():
    return inflation.generate_patch("Gamma", 6)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split("criterion")[1].split(":")[0])):
            terminalreporter.write_line(line)
