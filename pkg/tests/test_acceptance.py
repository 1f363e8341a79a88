"""The fourteen acceptance criteria at full size, one test each.

Every test prints its one-line verdict; the lines are repeated together in
the terminal summary.  Criteria 5 and 7 fail for the rule tables as printed
and are marked as expected failures; the detail line reports the corrected
tables next to them.
"""

import pytest

from conftest import ACCEPTANCE_LINES
from netcon.acceptance import CRITERIA, run_one

KNOWN_RED = {
    5: "the Square2 table as printed quiesces on non-square shapes (exhaustive search agrees)",
    7: "the no-leader table as printed lets parent ends bond to foreign rows, releasing rows longer than the seed",
}


def _params():
    out = []
    for k in sorted(CRITERIA):
        marks = [pytest.mark.xfail(reason=KNOWN_RED[k], strict=True)] if k in KNOWN_RED else []
        out.append(pytest.param(k, id=f"criterion_{k:02d}", marks=marks))
    return out


@pytest.mark.parametrize("number", _params())
def test_criterion(number):
    res = run_one(number)
    line = res.line()
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert res.passed, line
