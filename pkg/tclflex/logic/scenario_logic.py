# logic/scenario_logic.py

"""Scenario files: the JSON description of appliance classes, fleets and a request."""

import json
import logging
import math
from dataclasses import dataclass
from typing import Any, Optional

from tclflex.constants import MAX_AMPLITUDE_KEY
from tclflex.errors import InvalidParametersError, ScenarioError
from tclflex.log import join_lines
from tclflex.logic import thermo_logic
from tclflex.models import (
    ApplianceClass,
    ApplianceKind,
    ApplianceParams,
    FleetSpec,
    PlanMode,
    Portfolio,
    ReductionRequest,
    RequestKind,
    Sampling,
    SchemePreference,
)

LOGGER = logging.getLogger(__name__)

DEFAULT_CLASS_NAME = "appliance"

SCENARIO_KEYS = {
    "classes",
    "fleets",
    "request",
    "scheme",
    "mode",
    "broadcast",
    "horizon_hours",
    "seed",
}
CLASS_KEYS = {"temp_min", "temp_max", "drive_rate", "drift_rate", "power", "kind"}
FLEET_KEYS = {"class", "n", "sampling", "seed"}
REQUEST_KEYS = {"kind", "duration_hours", "amplitude_watts"}


@dataclass(frozen=True)
class ScenarioFleet:
    class_name: str
    n: int
    sampling: Sampling = Sampling.STRATIFIED
    seed: int = 0


@dataclass(frozen=True)
class Scenario:
    classes: dict[str, ApplianceParams]
    fleets: tuple[ScenarioFleet, ...]
    request: Optional[ReductionRequest] = None
    scheme: SchemePreference = SchemePreference.AUTO
    mode: PlanMode = PlanMode.LONGEST
    broadcast: bool = True
    horizon: Optional[float] = None
    seed: int = 0


## parsing helpers; each appends to `errors` and returns None on failure


def _unexpected_keys(
    section: dict[str, Any], allowed: set[str], where: str, errors: list[str]
) -> None:
    errors.extend(
        f"Error: Unexpected field '{key}' in {where}."
        for key in sorted(set(section) - allowed)
    )


def _number(value: Any, where: str, errors: list[str]) -> Optional[float]:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        errors.append(f"Error: {where} must be a number, got {value!r}.")
        return None
    if not math.isfinite(value):
        errors.append(f"Error: {where} must be finite.")
        return None
    return float(value)


def _integer(value: Any, where: str, errors: list[str]) -> Optional[int]:
    if isinstance(value, bool) or not isinstance(value, int):
        errors.append(f"Error: {where} must be an integer, got {value!r}.")
        return None
    return value


def _choice(value: Any, enum_type: Any, where: str, errors: list[str]) -> Any:
    try:
        return enum_type(value)
    except ValueError:
        allowed = ", ".join(member.value for member in enum_type)
        errors.append(f"Error: {where} must be one of {allowed}; got {value!r}.")
        return None


def _section(value: Any, where: str, errors: list[str]) -> Optional[dict[str, Any]]:
    if not isinstance(value, dict):
        errors.append(f"Error: {where} must be an object.")
        return None
    return value


## sections


def _parse_class(
    name: str, raw: Any, errors: list[str]
) -> Optional[ApplianceParams]:
    where = f"class '{name}'"
    if (section := _section(raw, where, errors)) is None:
        return None
    _unexpected_keys(section, CLASS_KEYS, where, errors)
    missing = sorted(CLASS_KEYS - {"kind"} - set(section))
    errors.extend(f"Error: Missing field '{key}' in {where}." for key in missing)
    if missing:
        return None

    values = {
        key: _number(section[key], f"{where} {key}", errors)
        for key in sorted(CLASS_KEYS - {"kind"})
    }
    kind = _choice(
        section.get("kind", ApplianceKind.COOLING.value),
        ApplianceKind,
        f"{where} kind",
        errors,
    )
    if kind is None or any(value is None for value in values.values()):
        return None
    try:
        return ApplianceParams(kind=kind, **values)  # type: ignore[arg-type]
    except InvalidParametersError as e:
        errors.append(f"Error: Invalid {where}: {e}")
        return None


def _parse_fleet(
    index: int, raw: Any, class_names: set[str], errors: list[str]
) -> Optional[ScenarioFleet]:
    where = f"fleet #{index}"
    if (section := _section(raw, where, errors)) is None:
        return None
    _unexpected_keys(section, FLEET_KEYS, where, errors)

    class_name = section.get("class")
    known_class = isinstance(class_name, str) and class_name in class_names
    if not known_class:
        errors.append(f"Error: {where} refers to unknown class {class_name!r}.")
    n = _integer(section.get("n"), f"{where} n", errors)
    if n is not None and n < 1:
        errors.append(f"Error: {where} n must be at least 1.")
        n = None
    sampling = _choice(
        section.get("sampling", Sampling.STRATIFIED.value),
        Sampling,
        f"{where} sampling",
        errors,
    )
    seed = _integer(section.get("seed", 0), f"{where} seed", errors)

    if not known_class or n is None or sampling is None or seed is None:
        return None
    return ScenarioFleet(class_name=class_name, n=n, sampling=sampling, seed=seed)


def _parse_request(raw: Any, errors: list[str]) -> Optional[ReductionRequest]:
    if (section := _section(raw, "request", errors)) is None:
        return None
    _unexpected_keys(section, REQUEST_KEYS, "request", errors)

    kind = _choice(
        section.get("kind", RequestKind.REDUCE.value),
        RequestKind,
        "request kind",
        errors,
    )
    if "duration_hours" not in section:
        errors.append("Error: Missing field 'duration_hours' in request.")
        duration = None
    else:
        duration = _number(section["duration_hours"], "request duration_hours", errors)

    raw_amplitude = section.get("amplitude_watts", MAX_AMPLITUDE_KEY)
    amplitude: Optional[float] = None
    amplitude_ok = True
    if raw_amplitude != MAX_AMPLITUDE_KEY:
        amplitude = _number(raw_amplitude, "request amplitude_watts", errors)
        amplitude_ok = amplitude is not None

    if kind is None or duration is None or not amplitude_ok:
        return None
    try:
        return ReductionRequest(kind=kind, duration=duration, amplitude=amplitude)
    except InvalidParametersError as e:
        errors.append(f"Error: Invalid request: {e}")
        return None


def parse_scenario(data: Any) -> Scenario:
    """Validate a decoded scenario document, reporting every problem at once."""
    errors: list[str] = []
    if (document := _section(data, "scenario", errors)) is None:
        raise ScenarioError(join_lines(errors))
    _unexpected_keys(document, SCENARIO_KEYS, "scenario", errors)

    classes: dict[str, ApplianceParams] = {}
    raw_classes = _section(document.get("classes"), "classes", errors) or {}
    for name, raw in raw_classes.items():
        if (params := _parse_class(name, raw, errors)) is not None:
            classes[name] = params

    fleets: list[ScenarioFleet] = []
    raw_fleets = document.get("fleets")
    if not isinstance(raw_fleets, list) or not raw_fleets:
        errors.append("Error: fleets must be a non-empty list.")
    else:
        for index, raw in enumerate(raw_fleets):
            fleet = _parse_fleet(index, raw, set(raw_classes), errors)
            if fleet is not None:
                fleets.append(fleet)

    request = None
    if "request" in document:
        request = _parse_request(document["request"], errors)

    scheme = _choice(
        document.get("scheme", SchemePreference.AUTO.value),
        SchemePreference,
        "scheme",
        errors,
    )
    mode = _choice(
        document.get("mode", PlanMode.LONGEST.value), PlanMode, "mode", errors
    )
    broadcast = document.get("broadcast", True)
    if not isinstance(broadcast, bool):
        errors.append("Error: broadcast must be true or false.")

    horizon = None
    if document.get("horizon_hours") is not None:
        horizon = _number(document["horizon_hours"], "horizon_hours", errors)
        if horizon is not None and horizon <= 0:
            errors.append("Error: horizon_hours must be positive.")
    seed = _integer(document.get("seed", 0), "seed", errors)
    if horizon is not None and request is not None and horizon <= request.duration:
        errors.append("Error: horizon_hours must exceed the request duration.")

    if errors:
        raise ScenarioError(join_lines(errors))
    LOGGER.debug(f"Parsed scenario with classes {sorted(classes)}")
    return Scenario(
        classes=classes,
        fleets=tuple(fleets),
        request=request,
        scheme=scheme,
        mode=mode,
        broadcast=broadcast,
        horizon=horizon,
        seed=seed,  # type: ignore[arg-type]
    )


def load_scenario(path: str) -> Scenario:
    """Read and validate a scenario file. OSError is left to the caller."""
    with open(path) as in_file:
        try:
            data = json.load(in_file)
        except json.JSONDecodeError as e:
            raise ScenarioError(f"Error: '{path}' is not valid JSON: {e}") from e
    return parse_scenario(data)


## building and emitting


def scenario_from_flags(
    delta: float,
    drive_rate: float,
    drift_rate: float,
    power: float,
    n: int,
    t: Optional[float] = None,
    kind: RequestKind = RequestKind.REDUCE,
    amplitude: Optional[float] = None,
    scheme: SchemePreference = SchemePreference.AUTO,
    mode: PlanMode = PlanMode.LONGEST,
    sampling: Sampling = Sampling.STRATIFIED,
    seed: int = 0,
    horizon: Optional[float] = None,
    broadcast: bool = True,
) -> Scenario:
    """Single-class, single-fleet scenario built from command-line values."""
    params = ApplianceParams.from_delta(delta, drive_rate, drift_rate, power)
    request = (
        ReductionRequest(kind=kind, duration=t, amplitude=amplitude)
        if t is not None
        else None
    )
    return Scenario(
        classes={DEFAULT_CLASS_NAME: params},
        fleets=(
            ScenarioFleet(
                class_name=DEFAULT_CLASS_NAME,
                n=n,
                sampling=Sampling(sampling),
                seed=seed,
            ),
        ),
        request=request,
        scheme=SchemePreference(scheme),
        mode=PlanMode(mode),
        broadcast=broadcast,
        horizon=horizon,
        seed=seed,
    )


def scenario_to_dict(scenario: Scenario) -> dict[str, Any]:
    document: dict[str, Any] = {
        "classes": {
            name: {
                "temp_min": params.temp_min,
                "temp_max": params.temp_max,
                "drive_rate": params.drive_rate,
                "drift_rate": params.drift_rate,
                "power": params.power,
                "kind": params.kind.value,
            }
            for name, params in scenario.classes.items()
        },
        "fleets": [
            {
                "class": fleet.class_name,
                "n": fleet.n,
                "sampling": fleet.sampling.value,
                "seed": fleet.seed,
            }
            for fleet in scenario.fleets
        ],
        "scheme": scenario.scheme.value,
        "mode": scenario.mode.value,
        "broadcast": scenario.broadcast,
        "seed": scenario.seed,
    }
    if scenario.request is not None:
        document["request"] = {
            "kind": scenario.request.kind.value,
            "duration_hours": scenario.request.duration,
            "amplitude_watts": (
                MAX_AMPLITUDE_KEY
                if scenario.request.amplitude is None
                else scenario.request.amplitude
            ),
        }
    if scenario.horizon is not None:
        document["horizon_hours"] = scenario.horizon
    return document


def write_scenario(scenario: Scenario, path: str) -> None:
    with open(path, "w") as out_file:
        json.dump(scenario_to_dict(scenario), out_file, indent=2)
        out_file.write("\n")
    LOGGER.debug(f"Wrote scenario to {path}")


## views used by the commands


def single_fleet(scenario: Scenario) -> tuple[ApplianceParams, FleetSpec]:
    if len(scenario.fleets) != 1:
        raise ScenarioError(
            f"Error: This command needs exactly one fleet; the scenario has "
            f"{len(scenario.fleets)}. Use 'portfolio' for several classes."
        )
    fleet = scenario.fleets[0]
    params = scenario.classes[fleet.class_name]
    return params, FleetSpec(
        params=params, n=fleet.n, sampling=fleet.sampling, seed=fleet.seed
    )


def require_request(scenario: Scenario) -> ReductionRequest:
    if scenario.request is None:
        raise ScenarioError("Error: The scenario has no request.")
    return scenario.request


def to_portfolio(scenario: Scenario) -> Portfolio:
    return Portfolio(
        classes=tuple(
            ApplianceClass(
                params=scenario.classes[fleet.class_name],
                count=fleet.n,
                name=fleet.class_name,
            )
            for fleet in scenario.fleets
        )
    )


def effective_horizon(scenario: Scenario, params: ApplianceParams) -> float:
    """The scenario horizon, or two cycles past the request window."""
    if scenario.horizon is not None:
        return scenario.horizon
    duration = scenario.request.duration if scenario.request is not None else 0.0
    return duration + 2.0 * thermo_logic.cycle_length(params)
