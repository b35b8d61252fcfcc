"""The acceptance criteria, one test each.

Each test prints a single ``criterion N: PASS/FAIL`` line followed by the
individual checks and the tolerances they were held to.
"""

from __future__ import annotations

import pytest

from csbubble.acceptance import CRITERIA, Suite, format_table, run_acceptance


@pytest.fixture(scope="module")
def suite():
    return Suite()


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number, suite, capsys):
    checks = run_acceptance([number], suite)
    ok = all(c.passed for c in checks)
    with capsys.disabled():
        print(f"\ncriterion {number}: {'PASS' if ok else 'FAIL'} ({CRITERIA[number][0]})")
        for line in format_table(checks).splitlines()[1:]:
            print(line)
    assert checks
    assert ok, format_table(checks)
