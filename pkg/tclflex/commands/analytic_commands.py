# commands/analytic_commands.py

import logging
from typing import Optional

import click

from tclflex.commands.options import KIND_CHOICE, appliance_options, kind_option
from tclflex.config import load_config
from tclflex.constants import SWEEP_CSV_HEADER
from tclflex.log import (
    add_blankline_before,
    format_number,
    format_optional_number,
    format_table,
    format_table_no_header,
)
from tclflex.logic import analytics_logic, scenario_logic
from tclflex.models import ApplianceParams, QuoteScheme, RequestKind
from tclflex.utils import emit_record, handle_flex_exceptions, write_csv_rows

LOGGER = logging.getLogger(__name__)

QUOTE_SCHEME_CHOICE = click.Choice(
    [
        QuoteScheme.UPPER_BOUND.value,
        QuoteScheme.INDIV.value,
        QuoteScheme.COORD.value,
    ]
)


@click.command(short_help="Quote the flexibility of a fleet")
@appliance_options(required=True)
@click.option(
    "--t", type=float, required=True, help="request duration, hours"
)
@click.option(
    "--scheme",
    type=QUOTE_SCHEME_CHOICE,
    default=QuoteScheme.INDIV.value,
    show_default=True,
)
@kind_option
@handle_flex_exceptions
def analytic(
    delta: float,
    v: float,
    w: float,
    p: float,
    n: int,
    t: float,
    scheme: str,
    kind: str,
) -> None:
    """Quote the constant reduction (or increase) a fleet offers for a duration"""
    params = ApplianceParams.from_delta(delta, v, w, p)
    quote = analytics_logic.quote(params, n, t, QuoteScheme(scheme), RequestKind(kind))
    LOGGER.info(
        f"fraction {format_number(quote.fraction)}, {format_number(quote.watts)} W"
    )

    if quote.scheme == QuoteScheme.COORD:
        target = analytics_logic.effective_params(params, quote.kind)
        schedule = analytics_logic.coord_schedule(target, t)
        LOGGER.info(
            add_blankline_before(
                format_table_no_header(
                    [
                        ["t_tilde", f"{format_number(schedule.t_tilde)} h"],
                        ["y1", f"{format_number(schedule.y1)} h"],
                        ["y2", f"{format_number(schedule.y2)} h"],
                        ["hat_t", f"{format_number(schedule.hat_t)} h"],
                        [
                            "max duration",
                            f"{format_number(analytics_logic.coord_max_duration(target))} h",
                        ],
                    ]
                )
            )
        )


@click.command(short_help="Tabulate the flexibility curves over durations")
@click.option(
    "--delta", type=float, required=True, help="thermostat band width, degrees"
)
@click.option(
    "--v", type=float, required=True, help="drive rate while ON, degrees/hour"
)
@click.option(
    "--w", type=float, required=True, help="drift rate while OFF, degrees/hour"
)
@click.option("--t", type=float, help="last duration of the grid, hours")
@click.option("--step", type=float, help="grid step, hours")
@kind_option
@click.option(
    "--out",
    type=click.Path(dir_okay=False, writable=True),
    help="CSV destination, stdout when omitted",
)
@handle_flex_exceptions
def sweep(
    delta: float,
    v: float,
    w: float,
    t: Optional[float],
    step: Optional[float],
    kind: str,
    out: Optional[str],
) -> None:
    """Write t_hours,upper,indiv,coord rows; coord is empty past its maximum duration"""
    # fractions do not depend on the ON power
    params = ApplianceParams.from_delta(delta, v, w, power=1.0)
    target = analytics_logic.effective_params(params, RequestKind(kind))
    t_max = t if t is not None else 2.0 * max(analytics_logic.curve_knots(target))
    step = step if step is not None else load_config().sweep_step_hours

    grid = analytics_logic.sweep_grid(target, t_max, step)
    rows = analytics_logic.sweep(params, grid, RequestKind(kind))
    LOGGER.debug(f"Sweeping {len(rows)} durations up to {t_max} h")
    write_csv_rows(SWEEP_CSV_HEADER, rows, out)


@click.command(short_help="Quote a portfolio of appliance classes")
@click.argument("scenario", type=click.Path(dir_okay=False))
@click.option(
    "--t", type=float, help="request duration, hours (default: the scenario's)"
)
@click.option(
    "--scheme",
    type=QUOTE_SCHEME_CHOICE,
    default=QuoteScheme.COORD.value,
    show_default=True,
)
@click.option("--kind", type=KIND_CHOICE, default=None, help="default: the scenario's")
@handle_flex_exceptions
def portfolio(
    scenario: str, t: Optional[float], scheme: str, kind: Optional[str]
) -> None:
    """Quote every fleet of SCENARIO and their sum"""
    loaded = scenario_logic.load_scenario(scenario)
    request = loaded.request
    if t is None:
        t = scenario_logic.require_request(loaded).duration
    request_kind = RequestKind(
        kind or (request.kind if request is not None else RequestKind.REDUCE)
    )

    fleets = scenario_logic.to_portfolio(loaded)
    quotes = analytics_logic.portfolio_quotes(
        fleets, t, QuoteScheme(scheme), request_kind
    )
    total = sum(quote.watts for quote in quotes if quote is not None)

    quote_rows = [["Class", "Appliances", "Fraction", "Watts"]]
    for appliance_class, quote in zip(fleets.classes, quotes):
        quote_rows.append(
            [
                appliance_class.name,
                str(appliance_class.count),
                format_optional_number(quote.fraction if quote else None),
                format_optional_number(quote.watts if quote else None),
            ]
        )
    quote_rows.append(["Total", "", "", format_number(total)])
    LOGGER.info(format_table(quote_rows))
    emit_record(
        {
            "scheme": scheme,
            "kind": request_kind,
            "duration_hours": t,
            "total_watts": total,
        }
    )
