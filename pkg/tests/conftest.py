import random

import pytest
import sympy

from projcalc.algebra import chart_variables


def to_sympy(p):
    """Independent oracle: hand a polynomial's printed form to sympy."""
    return sympy.sympify(str(p).replace("^", "**"))


@pytest.fixture
def rng():
    return random.Random(20240601)


@pytest.fixture
def v3():
    return chart_variables(3)


ACCEPTANCE = []


def record(criterion, passed, detail=""):
    ACCEPTANCE.append((criterion, passed, detail))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for criterion, passed, detail in sorted(ACCEPTANCE):
        line = f"criterion {criterion}: {'PASS' if passed else 'FAIL'}"
        terminalreporter.write_line(f"{line}  {detail}" if detail else line)
