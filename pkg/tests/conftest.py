"""Shared fixtures: the contract and market bases solved on a coarse grid."""

import pytest

from thiele.contract import RateCurve, g82_female
from thiele.reserves import surrender_value
from thiele.runner import ScenarioRun
from thiele.scenarios import BUILTIN_SCENARIOS, PlanSpec

# Monthly / 10: coarse enough for O(N^2) oracles, fine enough for the properties
TEST_STEP = 1.0 / 120.0

B_A = 2_000_000.0


@pytest.fixture(scope="session")
def plan():
    return PlanSpec().build()


@pytest.fixture(scope="session")
def technical_rate():
    return RateCurve.flat(0.05, 30.0)


@pytest.fixture(scope="session")
def mortality():
    return g82_female()


@pytest.fixture(scope="session")
def surrender(plan, technical_rate, mortality):
    return surrender_value(plan, technical_rate, mortality, TEST_STEP)


@pytest.fixture(scope="session")
def runs():
    """The four builtin examples at the test step, solved lazily and shared."""
    return {
        name: ScenarioRun(spec.with_overrides(step=TEST_STEP))
        for name, spec in BUILTIN_SCENARIOS.items()
    }


@pytest.fixture(scope="session")
def rates(runs):
    return {name: run.basis.market_rate for name, run in runs.items()}
