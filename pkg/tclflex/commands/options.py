# commands/options.py

"""Click options shared by several commands, and turning them into a Scenario."""

import dataclasses
from typing import Any, Callable, Optional

import click

from tclflex.constants import MAX_AMPLITUDE_KEY
from tclflex.errors import InvalidParametersError, ScenarioError
from tclflex.logic import scenario_logic
from tclflex.logic.scenario_logic import Scenario
from tclflex.models import (
    PlanMode,
    RequestKind,
    Sampling,
    SchemePreference,
)

KIND_CHOICE = click.Choice([kind.value for kind in RequestKind])
SCHEME_PREFERENCE_CHOICE = click.Choice([scheme.value for scheme in SchemePreference])
MODE_CHOICE = click.Choice([mode.value for mode in PlanMode])
SAMPLING_CHOICE = click.Choice([sampling.value for sampling in Sampling])

APPLIANCE_FLAGS = ("delta", "v", "w", "p", "n")


def _stack(*decorators: Callable[[Any], Any]) -> Callable[[Any], Any]:
    def apply(func: Any) -> Any:
        for decorator in reversed(decorators):
            func = decorator(func)
        return func

    return apply


def appliance_options(required: bool = False) -> Callable[[Any], Any]:
    return _stack(
        click.option(
            "--delta",
            type=float,
            required=required,
            help="thermostat band width, degrees",
        ),
        click.option(
            "--v",
            type=float,
            required=required,
            help="drive rate while ON, degrees/hour",
        ),
        click.option(
            "--w",
            type=float,
            required=required,
            help="drift rate while OFF, degrees/hour",
        ),
        click.option("--p", type=float, required=required, help="ON power, watts"),
        click.option("--n", type=int, required=required, help="number of appliances"),
    )


kind_option = click.option(
    "--kind",
    type=KIND_CHOICE,
    default=RequestKind.REDUCE.value,
    show_default=True,
    help="reduce or increase consumption",
)

fleet_request_options = _stack(
    click.option("--t", type=float, help="request duration, hours"),
    click.option(
        "--amplitude",
        type=str,
        default=None,
        help=f"request amplitude in watts, or '{MAX_AMPLITUDE_KEY}' (default)",
    ),
    click.option("--scheme", type=SCHEME_PREFERENCE_CHOICE, default=None),
    click.option("--mode", type=MODE_CHOICE, default=None),
    click.option("--sampling", type=SAMPLING_CHOICE, default=None),
    click.option("--seed", type=int, default=None, help="seed for sampling and draws"),
    click.option(
        "--horizon", type=float, default=None, help="simulation horizon, hours"
    ),
    click.option(
        "--emit-scenario",
        "emit_scenario",
        type=click.Path(dir_okay=False, writable=True),
        default=None,
        help="write the effective scenario to this JSON file",
    ),
)


def parse_amplitude(raw: Optional[str]) -> Optional[float]:
    """None stands for the maximum the scheme can offer."""
    if raw is None or raw.strip().lower() == MAX_AMPLITUDE_KEY:
        return None
    try:
        return float(raw)
    except ValueError:
        raise InvalidParametersError(
            f"--amplitude must be a number of watts or '{MAX_AMPLITUDE_KEY}', got '{raw}'."
        )


def scenario_from_cli(scenario_path: Optional[str], **flags: Any) -> Scenario:
    """Load SCENARIO, or build a single-fleet scenario from the appliance flags.

    Appliance and request flags cannot be combined with a scenario file; --scheme,
    --mode, --seed and --horizon override the file.
    """
    emit_path = flags.pop("emit_scenario", None)
    if scenario_path is not None:
        given = sorted(
            f"--{name}"
            for name in (*APPLIANCE_FLAGS, "t", "amplitude", "kind", "sampling")
            if flags.get(name) not in (None, RequestKind.REDUCE.value)
        )
        if given:
            raise ScenarioError(
                f"Error: {', '.join(given)} cannot be combined with a scenario file."
            )
        scenario = _with_overrides(scenario_logic.load_scenario(scenario_path), flags)
    else:
        missing = [f"--{name}" for name in APPLIANCE_FLAGS if flags.get(name) is None]
        if missing:
            raise InvalidParametersError(
                f"Missing {', '.join(missing)}; pass them or a SCENARIO file."
            )
        scenario = scenario_logic.scenario_from_flags(
            delta=flags["delta"],
            drive_rate=flags["v"],
            drift_rate=flags["w"],
            power=flags["p"],
            n=flags["n"],
            t=flags.get("t"),
            kind=RequestKind(flags.get("kind") or RequestKind.REDUCE.value),
            amplitude=parse_amplitude(flags.get("amplitude")),
            scheme=SchemePreference(flags.get("scheme") or SchemePreference.AUTO.value),
            mode=PlanMode(flags.get("mode") or PlanMode.LONGEST.value),
            sampling=Sampling(flags.get("sampling") or Sampling.STRATIFIED.value),
            seed=flags.get("seed") or 0,
            horizon=flags.get("horizon"),
        )

    if emit_path is not None:
        scenario_logic.write_scenario(scenario, emit_path)
    return scenario


def _with_overrides(scenario: Scenario, flags: dict[str, Any]) -> Scenario:
    overrides: dict[str, Any] = {}
    if flags.get("scheme") is not None:
        overrides["scheme"] = SchemePreference(flags["scheme"])
    if flags.get("mode") is not None:
        overrides["mode"] = PlanMode(flags["mode"])
    if flags.get("seed") is not None:
        overrides["seed"] = flags["seed"]
    if flags.get("horizon") is not None:
        overrides["horizon"] = flags["horizon"]
    return dataclasses.replace(scenario, **overrides)
