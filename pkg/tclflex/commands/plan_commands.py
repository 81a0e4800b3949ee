# commands/plan_commands.py

import logging
from typing import Any, Optional

import click

from tclflex.commands.options import (
    appliance_options,
    fleet_request_options,
    kind_option,
    scenario_from_cli,
)
from tclflex.log import format_number, format_table_no_header
from tclflex.logic import protocol_logic, scenario_logic
from tclflex.utils import emit_record, handle_flex_exceptions

LOGGER = logging.getLogger(__name__)


@click.command(short_help="Choose the broadcast message for a request")
@click.argument("scenario", type=click.Path(dir_okay=False), required=False)
@appliance_options()
@kind_option
@fleet_request_options
@handle_flex_exceptions
def plan(scenario: Optional[str], **flags: Any) -> None:
    """Choose the single broadcast message that delivers the request of SCENARIO
    (or of the appliance and request flags) and print it as key=value lines."""
    effective = scenario_from_cli(scenario, **flags)
    params, fleet_spec = scenario_logic.single_fleet(effective)
    request = scenario_logic.require_request(effective)

    message = protocol_logic.plan(
        request, params, fleet_spec.n, effective.mode, effective.scheme
    )

    summary_rows = [
        ["Scheme", message.scheme.value],
        ["Threshold", f"{format_number(message.threshold)} h"],
        ["Participation", format_number(message.participation)],
    ]
    if (schedule := message.schedule) is not None:
        first_batch = f"{format_number(schedule.y1)} to {format_number(schedule.y2)} h"
        summary_rows += [
            ["First batch phases", first_batch],
            ["Second batch from", f"{format_number(schedule.t_tilde)} h"],
        ]
    LOGGER.info(format_table_no_header(summary_rows))
    emit_record(protocol_logic.message_to_record(message))
