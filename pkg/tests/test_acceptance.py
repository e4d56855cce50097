"""Acceptance criteria 1-12, each at its stated tolerance and time budget.

Every criterion prints one ``[PASS]``/``[FAIL]`` line; the lines are also
collected and repeated in the terminal summary (see ``conftest.py``).
"""
import pytest

from apxnum import checks

from .conftest import ACCEPTANCE_LINES

CRITERIA = list(enumerate(checks.ALL_CHECKS, start=1))


@pytest.mark.parametrize("number, check", CRITERIA, ids=[f"criterion_{i:02d}" for i, _ in CRITERIA])
def test_criterion(number, check):
    result = check()
    line = result.line()
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert result.number == number
    assert result.seconds < result.limit, f"{line}: over the time budget"
    assert result.ok, f"{line}: {result.detail}"
