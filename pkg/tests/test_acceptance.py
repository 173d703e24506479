"""One pass/fail line per acceptance criterion.

The limits live in ``solvdiff.acceptance``; this file only runs each suite,
prints its report line and fails on any check over its limit. Run with ``-s``
or look at the terminal output: lines are printed with capture disabled.
"""

import pytest

from solvdiff import acceptance as ac


@pytest.mark.slow
@pytest.mark.parametrize("number", sorted(ac.CRITERIA))
def test_criterion(number, capsys):
    c = ac.run_one(number)
    with capsys.disabled():
        print("\n" + c.line())
    bad = [f"{ch.name}: {ch.value:.4g} > {ch.limit:.4g}" for ch in c.checks if not ch.ok]
    assert c.checks, "criterion produced no checks"
    assert c.passed, "; ".join(bad)
