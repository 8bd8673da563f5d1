"""Acceptance suite: every criterion at its stated tolerance.

Each criterion prints one pass/fail line; the assertions repeat the verdicts
so a failure names the criterion and its details.
"""

import pytest

from omegadec.acceptance import ALL_CRITERIA, CriterionResult


@pytest.fixture(scope="module")
def results() -> dict[int, CriterionResult]:
    out = {}
    for fn in ALL_CRITERIA:
        res = fn()
        print(res.line())
        out[res.number] = res
    return out


@pytest.mark.parametrize("number", range(1, 11))
def test_criterion(results, number):
    res = results[number]
    print(res.line())
    assert res.passed, res.details
