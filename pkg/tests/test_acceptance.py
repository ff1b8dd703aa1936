"""Acceptance gate: the eight criteria, one line of verdict each.

Every criterion is exact (tolerance zero); the runtime budgets are part
of the contract and asserted, not advisory.  Run with -s to see the
lines; a red test prints its line in the failure body either way.
"""

import pytest

from valim.suites import SUITES, run_suite

BUDGETS = {1: 30, 2: 30, 3: 60, 4: 60, 5: 30, 6: 60, 7: 30, 8: 10}


def test_the_gate_has_eight_criteria():
    assert len(SUITES) == 8


@pytest.mark.parametrize("number", sorted(BUDGETS))
def test_criterion(number):
    r = run_suite(number)
    print(r.line())
    assert r.number == number
    assert r.budget == BUDGETS[number]
    assert r.passed, r.line()
    assert r.within_budget, r.line()
