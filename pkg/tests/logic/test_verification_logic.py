# tests/logic/test_verification_logic.py

import pytest

from tclflex.errors import ScenarioError
from tclflex.logic import scenario_logic, verification_logic
from tclflex.models import MessageScheme, Policy, QuoteScheme


def _run(document, config):
    return verification_logic.simulate_scenario(
        scenario_logic.parse_scenario(document), config=config
    )


def test_simulate_scenario_indiv(make_scenario, sim_config):
    run = _run(make_scenario(), sim_config)

    assert run.n == 1400
    assert run.message.scheme == MessageScheme.INDIV
    assert run.policy == Policy.NORMAL
    assert run.quote_scheme == QuoteScheme.INDIV
    # two cycles past the request window
    assert run.result.trace.horizon == pytest.approx(7.35)
    assert run.baseline.horizon == run.result.trace.horizon
    assert run.report.avg_reduction_watts == pytest.approx(510.0, abs=2.0)


verify_testdata = [
    # scenario overrides, expected analytic watts
    ({}, 510.0),
    ({"scheme": "indiv", "kind": "increase"}, 204.0),
    ({"scheme": "upper", "duration": 1.0, "amplitude": 100}, 500.0),
    ({"broadcast": False}, 0.0),
]


@pytest.mark.parametrize("overrides, expected_analytic", verify_testdata)
def test_verify_run_passes(make_scenario, sim_config, overrides, expected_analytic):
    run = _run(make_scenario(**overrides), sim_config)

    outcome = verification_logic.verify_run(run, tolerance=5.0)

    assert outcome.passed, outcome.failures
    assert outcome.analytic_watts == pytest.approx(expected_analytic, abs=1e-3)
    assert outcome.simulated_watts == pytest.approx(expected_analytic, abs=5.0)


def test_upper_scheme_runs_min_energy_policy(make_scenario, sim_config):
    run = _run(make_scenario(scheme="upper", duration=1.0), sim_config)

    assert run.message is None
    assert run.policy == Policy.MIN_ENERGY
    assert run.quote_scheme == QuoteScheme.MIN_ENERGY_POLICY


def test_verify_run_flags_over_delivery(make_scenario, sim_config):
    run = _run(make_scenario(scheme="coord", duration=1.0), sim_config)

    outcome = verification_logic.verify_run(run, tolerance=5.0)

    assert not outcome.passed
    assert any(failure.startswith("over_delivery") for failure in outcome.failures)
    assert "differs from the analytic 416.667 W" in outcome.failures[0]
    assert outcome.analytic_watts == pytest.approx(416.667, abs=1e-3)


def test_verify_run_without_constancy(make_scenario, sim_config):
    run = _run(make_scenario(scheme="coord", duration=1.0), sim_config)

    outcome = verification_logic.verify_run(
        run, tolerance=20.0, check_constancy=False
    )

    # the average still lands within 20 W of the quote
    assert outcome.passed


def test_verify_run_needs_request(make_scenario, sim_config):
    document = make_scenario()
    del document["request"]
    run = _run(document, sim_config)

    assert run.report is None
    with pytest.raises(ScenarioError, match="needs a request"):
        verification_logic.verify_run(run, tolerance=5.0)


def test_simulate_scenario_single_fleet_only(make_scenario, sim_config):
    document = make_scenario()
    document["fleets"].append({"class": "fridge", "n": 10})

    with pytest.raises(ScenarioError, match="exactly one fleet"):
        _run(document, sim_config)
