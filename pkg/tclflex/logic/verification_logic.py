# logic/verification_logic.py

"""Scenario runs and their comparison with the closed-form predictions."""

import dataclasses
import logging
from dataclasses import dataclass
from typing import Optional

from tclflex.config import FlexConfig
from tclflex.errors import ScenarioError
from tclflex.log import format_number
from tclflex.logic import fleet_sim_logic, protocol_logic
from tclflex.logic.scenario_logic import (
    Scenario,
    effective_horizon,
    single_fleet,
)
from tclflex.models import (
    ApplianceParams,
    BroadcastMessage,
    Policy,
    PowerTrace,
    QuoteScheme,
    ReductionRequest,
    RequestKind,
    SchemePreference,
    SimReport,
    SimulationResult,
)

LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True)
class ScenarioRun:
    params: ApplianceParams
    n: int
    request: Optional[ReductionRequest]
    message: Optional[BroadcastMessage]
    policy: Policy
    quote_scheme: Optional[QuoteScheme]
    result: SimulationResult
    baseline: PowerTrace
    report: Optional[SimReport]


@dataclass(frozen=True)
class VerificationOutcome:
    analytic_watts: float
    simulated_watts: float
    failures: list[str]

    @property
    def passed(self) -> bool:
        return not self.failures


def simulate_scenario(
    scenario: Scenario, config: Optional[FlexConfig] = None
) -> ScenarioRun:
    """Plan (unless broadcasting is off), simulate the single fleet and its baseline."""
    params, fleet_spec = single_fleet(scenario)
    fleet = fleet_sim_logic.build_fleet(fleet_spec)
    request = scenario.request
    horizon = effective_horizon(scenario, params)
    kind = request.kind if request is not None else RequestKind.REDUCE

    message: Optional[BroadcastMessage] = None
    policy = Policy.NORMAL
    quote_scheme: Optional[QuoteScheme] = None
    report_request = request
    if request is not None and scenario.broadcast:
        if scenario.scheme == SchemePreference.UPPER:
            policy = Policy.MIN_ENERGY
            quote_scheme = QuoteScheme.MIN_ENERGY_POLICY
            # the policy always delivers its full average, whatever was asked
            report_request = dataclasses.replace(request, amplitude=None)
        else:
            message = protocol_logic.plan(
                request, params, fleet_spec.n, scenario.mode, scenario.scheme
            )
            quote_scheme = QuoteScheme(message.scheme.value)

    result = fleet_sim_logic.run_simulation(
        fleet,
        params,
        horizon,
        message=message,
        policy=policy,
        seed=scenario.seed,
        kind=kind,
        config=config,
    )
    baseline = fleet_sim_logic.run_simulation(
        fleet, params, horizon, kind=kind, config=config
    ).trace

    report = None
    if report_request is not None:
        report = fleet_sim_logic.report(
            result.trace,
            baseline,
            report_request,
            params,
            fleet_spec.n,
            scheme=quote_scheme,
            diagnostics=result.diagnostics,
        )
    return ScenarioRun(
        params=params,
        n=fleet_spec.n,
        request=request,
        message=message,
        policy=policy,
        quote_scheme=quote_scheme,
        result=result,
        baseline=baseline,
        report=report,
    )


def verify_run(
    run: ScenarioRun, tolerance: float, check_constancy: bool = True
) -> VerificationOutcome:
    """Check a run against its analytic promise. Constancy is only checked for
    broadcast schemes; the min-energy policy is not constant by construction."""
    if run.request is None or run.report is None:
        raise ScenarioError("Error: Verification needs a request in the scenario.")
    report = run.report
    analytic = report.promised_watts if run.quote_scheme is not None else 0.0
    simulated = report.avg_reduction_watts

    failures = []
    if abs(simulated - analytic) > tolerance:
        failures.append(
            f"average {format_number(simulated)} W differs from the analytic "
            f"{format_number(analytic)} W by more than {format_number(tolerance)} W"
        )
    if report.temp_violations:
        failures.append(f"{report.temp_violations} temperature violations")

    if check_constancy and run.message is not None:
        if report.sup_deviation_watts > tolerance:
            failures.append(
                f"effect deviates from constant by "
                f"{format_number(report.sup_deviation_watts)} W"
            )
        if report.over_delivery:
            failures.append(
                f"over_delivery: effect reached {format_number(report.max_effect_watts)} W"
            )
        if report.under_delivery:
            failures.append(
                f"under_delivery: effect fell to {format_number(report.min_effect_watts)} W"
            )

    LOGGER.debug(f"Verification: analytic {analytic}, simulated {simulated}")
    return VerificationOutcome(
        analytic_watts=analytic, simulated_watts=simulated, failures=failures
    )
