import numpy as np
import pytest

from snsmart_pp.numerics import RngStream
from snsmart_pp.simulator import builtin_scenario, simulate_trial
from snsmart_pp.trial_data import SubgroupCounts

ACCEPTANCE_RESULTS = {}


def record_acceptance(criterion, passed, detail):
    """Store the outcome of one acceptance criterion for the end-of-run summary."""
    ACCEPTANCE_RESULTS[criterion] = (passed, detail)
    print(f"{'PASS' if passed else 'FAIL'} {criterion}: {detail}")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for criterion in sorted(ACCEPTANCE_RESULTS):
        passed, detail = ACCEPTANCE_RESULTS[criterion]
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'} {criterion}: {detail}")


def fixture_counts(i):
    """Small reproducible datasets drawn from the builtin scenarios."""
    scenario = builtin_scenario(1 + i % 7)
    n = (30, 45, 60, 90)[i % 4]
    return simulate_trial(scenario, n, RngStream(9000 + i))


@pytest.fixture
def scenario1_counts():
    return simulate_trial(builtin_scenario(1), 90, RngStream(11))


def empty_subgroups():
    return SubgroupCounts(np.zeros((3, 2)), np.zeros((3, 2)))
