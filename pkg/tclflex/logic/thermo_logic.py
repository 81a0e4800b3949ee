# logic/thermo_logic.py

"""Single-appliance thermostat model.

An appliance cycles between switching ON at its drift-side limit (phase y = 0),
driving the temperature across the band for delta/v hours, and drifting back for
delta/w hours. The ON interval is half-open: at y == delta/v the appliance is OFF.
"""

import dataclasses
import math

from tclflex.models import ApplianceKind, ApplianceParams, CyclePhase


def on_duration(params: ApplianceParams) -> float:
    return params.delta / params.drive_rate


def off_duration(params: ApplianceParams) -> float:
    return params.delta / params.drift_rate


def cycle_length(params: ApplianceParams) -> float:
    return on_duration(params) + off_duration(params)


def wrap_phase(params: ApplianceParams, phase: CyclePhase) -> CyclePhase:
    """Same position inside [0, cycle_length); phases count hours since an ON switch."""
    return CyclePhase(math.fmod(phase.y, cycle_length(params)))


def is_on(params: ApplianceParams, phase: CyclePhase) -> bool:
    return wrap_phase(params, phase).y < on_duration(params)


def natural_power(params: ApplianceParams, phase: CyclePhase) -> float:
    """Power drawn at this phase without any request."""
    return params.power if is_on(params, phase) else 0.0


def distance_to_limit(params: ApplianceParams, phase: CyclePhase) -> float:
    """Degrees between the current temperature and the drift-side limit."""
    y = wrap_phase(params, phase).y
    if y <= on_duration(params):
        distance = params.drive_rate * y
    else:
        distance = params.delta - params.drift_rate * (y - on_duration(params))
    return min(max(distance, 0.0), params.delta)


def temperature(params: ApplianceParams, phase: CyclePhase) -> float:
    distance = distance_to_limit(params, phase)
    if params.kind == ApplianceKind.COOLING:
        return params.temp_max - distance
    return params.temp_min + distance


def reduction_capacity(params: ApplianceParams, phase: CyclePhase) -> float:
    """Longest constant reduction the appliance offers by switching OFF now.

    It ends either when the temperature reaches the limit (after y*v/w) or when the
    nominal ON period would have ended anyway (after delta/v - y).
    """
    if not is_on(params, phase):
        return 0.0
    y = wrap_phase(params, phase).y
    return min(
        y * params.drive_rate / params.drift_rate,
        on_duration(params) - y,
    )


def max_reduction_capacity(params: ApplianceParams) -> float:
    return params.delta / (params.drive_rate + params.drift_rate)


def peak_capacity_phase(params: ApplianceParams) -> float:
    v, w = params.drive_rate, params.drift_rate
    return on_duration(params) * w / (v + w)


def mirror(params: ApplianceParams) -> ApplianceParams:
    """Exchange drive and drift rates so demand increases reuse the reduction formulas."""
    flipped_kind = (
        ApplianceKind.HEATING
        if params.kind == ApplianceKind.COOLING
        else ApplianceKind.COOLING
    )
    return dataclasses.replace(
        params,
        drive_rate=params.drift_rate,
        drift_rate=params.drive_rate,
        kind=flipped_kind,
    )


def mirror_phase(params: ApplianceParams, phase: CyclePhase) -> CyclePhase:
    """Phase of the same appliance in its mirrored cycle, i.e. hours since it last
    switched OFF."""
    return CyclePhase(math.fmod(phase.y + off_duration(params), cycle_length(params)))
