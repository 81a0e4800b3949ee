# commands/simulation_commands.py

import dataclasses
import logging
from typing import Any, Optional

import click

from tclflex.commands.options import (
    appliance_options,
    fleet_request_options,
    kind_option,
    scenario_from_cli,
)
from tclflex.config import load_config
from tclflex.errors import VerificationMismatchError
from tclflex.log import (
    add_blankline_before,
    format_number,
    format_table_no_header,
    indented,
    join_lines,
)
from tclflex.logic import trace_logic, verification_logic
from tclflex.logic.verification_logic import ScenarioRun
from tclflex.utils import emit_record, handle_flex_exceptions

LOGGER = logging.getLogger(__name__)


def _log_run_summary(run: ScenarioRun) -> None:
    diagnostics = run.result.diagnostics
    scheme = run.message.scheme.value if run.message else run.policy.value
    rows = [
        ["Appliances", str(run.n)],
        ["Scheme", scheme],
        ["Acting appliances", str(diagnostics.acting_appliances)],
        ["Events", str(diagnostics.events)],
    ]
    if (report := run.report) is not None:
        rows += [
            ["Average effect", f"{format_number(report.avg_reduction_watts)} W"],
            ["Promised", f"{format_number(report.promised_watts)} W"],
            [
                "Deviation from constant",
                f"{format_number(report.sup_deviation_watts)} W",
            ],
            ["Rebound peak", f"{format_number(report.rebound_peak_watts)} W"],
            ["Rebound energy", f"{format_number(report.rebound_energy_watt_hours)} Wh"],
        ]
    LOGGER.info(format_table_no_header(rows))


@click.command(short_help="Simulate a fleet and report the delivered flexibility")
@click.argument("scenario", type=click.Path(dir_okay=False), required=False)
@appliance_options()
@kind_option
@fleet_request_options
@click.option(
    "--out",
    type=click.Path(dir_okay=False, writable=True),
    help="write the simulated power trace CSV here",
)
@click.option(
    "--baseline-out",
    "baseline_out",
    type=click.Path(dir_okay=False, writable=True),
    help="write the no-request baseline trace CSV here",
)
@handle_flex_exceptions
def simulate(
    scenario: Optional[str],
    out: Optional[str],
    baseline_out: Optional[str],
    **flags: Any,
) -> None:
    """Simulate SCENARIO (or the appliance and request flags) event by event.

    The report is printed as key=value lines; traces go to --out/--baseline-out."""
    effective = scenario_from_cli(scenario, **flags)
    run = verification_logic.simulate_scenario(effective)

    if out is not None:
        trace_logic.write_trace_csv(run.result.trace, out)
        LOGGER.info(f"Wrote trace to {out}")
    if baseline_out is not None:
        trace_logic.write_trace_csv(run.baseline, baseline_out)
        LOGGER.info(f"Wrote baseline to {baseline_out}")

    _log_run_summary(run)
    record: dict[str, Any] = {}
    if run.report is not None:
        record.update(dataclasses.asdict(run.report))
    record.update(
        acting_appliances=run.result.diagnostics.acting_appliances,
        events=run.result.diagnostics.events,
    )
    emit_record(record)


@click.command(short_help="Check a simulated run against its analytic quote")
@click.argument("scenario", type=click.Path(dir_okay=False), required=False)
@appliance_options()
@kind_option
@fleet_request_options
@click.option("--tolerance", type=float, help="allowed gap in watts")
@click.option(
    "--no-constancy",
    "no_constancy",
    is_flag=True,
    help="only compare averages, not the shape over the request window",
)
@handle_flex_exceptions
def verify(
    scenario: Optional[str],
    tolerance: Optional[float],
    no_constancy: bool,
    **flags: Any,
) -> None:
    """Simulate SCENARIO and compare it with the closed-form prediction.

    Exits 0 when they agree within --tolerance, 1 otherwise."""
    if tolerance is None:
        tolerance = load_config().default_tolerance_watts
    effective = scenario_from_cli(scenario, **flags)
    run = verification_logic.simulate_scenario(effective)
    outcome = verification_logic.verify_run(
        run, tolerance, check_constancy=not no_constancy
    )

    LOGGER.info(
        format_table_no_header(
            [
                ["Analytic", f"{format_number(outcome.analytic_watts)} W"],
                ["Simulated", f"{format_number(outcome.simulated_watts)} W"],
                ["Tolerance", f"{format_number(tolerance)} W"],
            ]
        )
    )
    emit_record(
        {
            "analytic_watts": outcome.analytic_watts,
            "simulated_watts": outcome.simulated_watts,
            "passed": outcome.passed,
        }
    )
    if not outcome.passed:
        raise VerificationMismatchError(
            join_lines([indented(failure) for failure in outcome.failures])
        )
    LOGGER.info(add_blankline_before("Simulation agrees with the analytic quote"))
