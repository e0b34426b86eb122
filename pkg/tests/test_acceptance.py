"""Acceptance gate: every headline criterion at its pinned tolerance.

One test per criterion; each prints its PASS/FAIL line so `pytest -v -s
tests/test_acceptance.py` (or `privdel --check`) reads as the acceptance
report. The key-length criterion is expected to stay red: its 8% gate on
the n*log2(m) shorthand is arithmetically out of reach at the pinned
operating point (the check's detail string carries the numbers), and the
gate is deliberately not loosened to match.
"""

import pytest

from privdel import acceptance


@pytest.mark.parametrize(
    "check",
    acceptance.ALL_CHECKS,
    ids=lambda check: check.__name__.removeprefix("check_"),
)
def test_criterion(check):
    result = check()
    print(f"{'PASS' if result.passed else 'FAIL'} {result.name}: {result.detail}")
    assert result.passed, f"{result.name}: {result.detail}"
