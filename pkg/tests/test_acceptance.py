"""The eleven acceptance criteria, each at its stated time limit.

Every check prints one [PASS]/[FAIL] line; the lines are repeated in the
terminal summary so they survive output capture.
"""

import pytest

from netforge.acceptance import CRITERIA

RESULTS = []

@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number):
    res = CRITERIA[number]()
    RESULTS.append(res.line())
    print(res.line())
    assert res.ok, res.detail
    assert res.within_time, f"took {res.seconds:.1f}s, limit {res.limit:.0f}s"
