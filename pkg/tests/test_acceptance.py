"""Acceptance criteria AC-1 .. AC-8 at their stated tolerances.

Each test prints one PASS/FAIL line; the lines are repeated in the pytest
terminal summary.
"""

import pytest

from conftest import ACCEPTANCE_LINES
from stefanlv import outputs, verify

RUNTIME_LIMITS = {"AC-1": 10.0, "AC-2": 60.0}

@pytest.mark.parametrize("name", list(verify.CRITERIA))
def test_acceptance(name):
    if name == "AC-2":
        verify.spreading_run.cache_clear()  # time the full run, not a cached one
    result = verify.CRITERIA[name]()
    limit = RUNTIME_LIMITS.get(name)
    within = limit is None or result.elapsed < limit
    line = result.line() + ("" if within else f"  [runtime above {limit:g}s]")
    if not within:
        line = line.replace("PASS", "FAIL", 1)
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert result.passed, outputs.dumps(result.details)
    assert within, f"{name} took {result.elapsed:.1f}s (limit {limit}s)"
