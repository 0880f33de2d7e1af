import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from hcflow.catalog import catalog  # noqa: E402

ACCEPTANCE_LINES = []

IN_CLASS_NONABELIAN = ("example6", "complex_heisenberg", "kodaira_thurston")


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture(scope="session")
def ex6():
    return catalog("example6")


@pytest.fixture(scope="session")
def heis():
    return catalog("complex_heisenberg")


@pytest.fixture(scope="session")
def kt():
    return catalog("kodaira_thurston")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
