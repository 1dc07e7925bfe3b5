"""The acceptance criteria at their stated tolerances and budgets.

Each criterion prints one PASS/FAIL line (visible with ``pytest -s`` and in
the captured output of failures).
"""
import pytest

from nilseq.acceptance import CRITERIA, SuiteConfig, run_criterion, warm_up

CFG = SuiteConfig(seed=0, quick=False, workers=1)


@pytest.fixture(scope="module", autouse=True)
def _compiled():
    warm_up()


@pytest.mark.parametrize("criterion", CRITERIA, ids=lambda c: f"c{c.id:02d}_{c.name.replace(' ', '_')}")
def test_criterion(criterion):
    result = run_criterion(criterion, CFG)
    print(result.line())
    assert not result.detail, result.detail
    assert result.within_budget, f"took {result.elapsed:.2f}s, budget {result.budget}s"
    assert result.passed, result.metrics
