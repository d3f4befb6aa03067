import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from hcgibbs import ActivitySpec  # noqa: E402

# criterion id -> (passed, detail); filled by test_acceptance.py
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE, key=lambda s: int(s[2:])):
        ok, detail = ACCEPTANCE[key]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} {key}: {detail}")


@pytest.fixture
def ex1():
    return ActivitySpec.telescoping(0.25)


@pytest.fixture
def ex2():
    return ActivitySpec.poisson(2.4, 8.0)


@pytest.fixture
def ex3():
    return ActivitySpec.geometric(0.4, 0.475)


@pytest.fixture
def ex4():
    return ActivitySpec.telescoping(1.0)


@pytest.fixture
def ex5():
    return ActivitySpec.geometric(1 / 3, 1 / 3, 4.0)
