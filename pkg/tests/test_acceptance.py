"""Acceptance criteria at their stated tolerances; one PASS/FAIL line each in the summary."""
import pytest

from acceptance import CRITERIA

RESULTS = {}


@pytest.mark.parametrize("criterion", CRITERIA, ids=[f"criterion_{c.number}" for c in CRITERIA])
def test_criterion(criterion):
    result = criterion()
    RESULTS[result.number] = result
    print(result.line())
    assert result.passed, result.detail
