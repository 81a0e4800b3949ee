# logic/analytics_logic.py

"""Closed-form flexibility of a homogeneous fleet.

Fractions are relative to the steady-state consumption N*P*w/(v+w) for reductions
and to the steady-state non-consumption N*P*v/(v+w) for increases; increases are
answered by applying the reduction formulas to the mirrored appliance.
"""

import logging
from typing import Callable, Optional, Sequence

import numpy as np

from tclflex.constants import FEASIBILITY_RTOL
from tclflex.errors import InfeasibleDurationError, InvalidParametersError
from tclflex.logic import thermo_logic
from tclflex.models import (
    ApplianceParams,
    CoordSchedule,
    Portfolio,
    QuoteScheme,
    ReductionQuote,
    RequestKind,
)

LOGGER = logging.getLogger(__name__)


def _check_duration(t: float) -> None:
    if not t >= 0:
        raise InvalidParametersError(f"Duration must be non-negative, got {t}.")


def _clamp_fraction(value: float) -> float:
    return min(max(value, 0.0), 1.0)


def steady_state_power(params: ApplianceParams, n: int) -> float:
    if n < 1:
        raise InvalidParametersError("Fleet size must be at least 1.")
    v, w = params.drive_rate, params.drift_rate
    return n * params.power * w / (v + w)


def survival(params: ApplianceParams, t: float) -> float:
    """Share of a steady-state fleet able to reduce constantly for at least t."""
    v, w = params.drive_rate, params.drift_rate
    return w / (v + w) * indiv_fraction(params, t)


def indiv_fraction(params: ApplianceParams, t: float) -> float:
    _check_duration(t)
    v, w = params.drive_rate, params.drift_rate
    return _clamp_fraction(1.0 - t * (v + w) / params.delta)


def upper_bound_fraction(params: ApplianceParams, t: float) -> float:
    """Largest average reduction over t when constancy is not required.

    Piecewise: 1 - w*t/(2*delta) up to t = delta/w, delta/(2*w*t) beyond. The compact
    max(.,.) form found in the literature picks the wrong branch for w*t < delta.
    """
    _check_duration(t)
    if t == 0:
        return 1.0
    w, delta = params.drift_rate, params.delta
    if t <= delta / w:
        return _clamp_fraction(1.0 - w * t / (2.0 * delta))
    return _clamp_fraction(delta / (2.0 * w * t))


def min_energy_per_appliance(params: ApplianceParams, t: float) -> float:
    """Expected energy one appliance draws over t under the drift-then-pin policy."""
    _check_duration(t)
    v, w, delta, power = (
        params.drive_rate,
        params.drift_rate,
        params.delta,
        params.power,
    )
    if w * t <= delta:
        return power / (v + w) * (w * t) ** 2 / (2.0 * delta)
    return power * w / (v + w) * (t - delta / (2.0 * w))


def coord_max_duration(params: ApplianceParams) -> float:
    v, w = params.drive_rate, params.drift_rate
    return params.delta * (v + 2.0 * w) / (v + w) ** 2


def _check_coord_duration(params: ApplianceParams, t: float) -> None:
    _check_duration(t)
    t_max = coord_max_duration(params)
    if t > t_max * (1.0 + FEASIBILITY_RTOL):
        raise InfeasibleDurationError(
            f"Coordinated reduction cannot sustain {t:g} h; its maximum duration "
            f"is {t_max:g} h."
        )


def coord_schedule(params: ApplianceParams, t: float) -> CoordSchedule:
    """Optimal two-batch plan for a duration-t constant reduction."""
    _check_coord_duration(params, t)
    v, w = params.drive_rate, params.drift_rate
    on_time = thermo_logic.on_duration(params)
    t_tilde = w * t / (v + 2.0 * w)
    y1 = t_tilde * w / v
    y2 = on_time - t_tilde
    y3 = thermo_logic.cycle_length(params) + t_tilde * w / v - (1.0 + w / v) * (
        t - t_tilde
    )
    return CoordSchedule(
        duration=t,
        t_tilde=t_tilde,
        y1=y1,
        y2=y2,
        y3=y3,
        hat_t=min(on_time - y1, y2 * v / w),
        fraction=_clamp_fraction(1.0 - (v + w) * t_tilde / params.delta),
    )


def coord_constraint_slacks(
    params: ApplianceParams, schedule: CoordSchedule
) -> tuple[float, float, float, float]:
    """Slack of each feasibility constraint; all are >= 0 (up to rounding) when the
    schedule is valid: batches disjoint, second batch naturally ON until t (two sides),
    and every second-batch appliance able to stay OFF until t."""
    v, w = params.drive_rate, params.drift_rate
    t = schedule.duration
    return (
        schedule.y3 - schedule.y2,
        schedule.y3 - (thermo_logic.cycle_length(params) - t),
        (thermo_logic.on_duration(params) - t) - schedule.y1,
        v / w * (schedule.t_tilde + schedule.y1) - (t - schedule.t_tilde),
    )


def coord_fraction(params: ApplianceParams, t: float) -> float:
    _check_coord_duration(params, t)
    v, w = params.drive_rate, params.drift_rate
    return _clamp_fraction(1.0 - t * (v + w) / (v + 2.0 * w) * w / params.delta)


_FRACTIONS: dict[QuoteScheme, Callable[[ApplianceParams, float], float]] = {
    QuoteScheme.UPPER_BOUND: upper_bound_fraction,
    QuoteScheme.INDIV: indiv_fraction,
    QuoteScheme.COORD: coord_fraction,
    # the min-energy policy attains the bound exactly
    QuoteScheme.MIN_ENERGY_POLICY: upper_bound_fraction,
}


def effective_params(params: ApplianceParams, kind: RequestKind) -> ApplianceParams:
    """Parameters on which the reduction machinery answers a request of this kind."""
    if RequestKind(kind) == RequestKind.INCREASE:
        return thermo_logic.mirror(params)
    return params


def reference_power(params: ApplianceParams, n: int, kind: RequestKind) -> float:
    return steady_state_power(effective_params(params, kind), n)


def quote(
    params: ApplianceParams,
    n: int,
    t: float,
    scheme: QuoteScheme,
    kind: RequestKind = RequestKind.REDUCE,
) -> ReductionQuote:
    scheme, kind = QuoteScheme(scheme), RequestKind(kind)
    target = effective_params(params, kind)
    fraction = _FRACTIONS[scheme](target, t)
    watts = fraction * steady_state_power(target, n)
    LOGGER.debug(f"Quote {scheme.value}/{kind.value} t={t}: {fraction} -> {watts} W")
    return ReductionQuote(
        fraction=fraction, watts=watts, scheme=scheme, duration=t, kind=kind
    )


def max_amplitude(
    params: ApplianceParams,
    n: int,
    t: float,
    scheme: QuoteScheme,
    kind: RequestKind = RequestKind.REDUCE,
) -> float:
    """Largest constant amplitude a broadcast scheme can plan for duration t."""
    return quote(params, n, t, scheme, kind).watts


def portfolio_quotes(
    portfolio: Portfolio,
    t: float,
    scheme: QuoteScheme,
    kind: RequestKind = RequestKind.REDUCE,
) -> list[Optional[ReductionQuote]]:
    """Per-class quotes; None marks a class that cannot sustain t under the coord scheme."""
    quotes: list[Optional[ReductionQuote]] = []
    for appliance_class in portfolio.classes:
        try:
            quotes.append(
                quote(appliance_class.params, appliance_class.count, t, scheme, kind)
            )
        except InfeasibleDurationError as e:
            LOGGER.warning(
                f"Class '{appliance_class.name or '?'}' contributes nothing: {e}"
            )
            quotes.append(None)
    return quotes


def portfolio_quote(
    portfolio: Portfolio,
    t: float,
    scheme: QuoteScheme,
    kind: RequestKind = RequestKind.REDUCE,
) -> float:
    return sum(
        class_quote.watts
        for class_quote in portfolio_quotes(portfolio, t, scheme, kind)
        if class_quote is not None
    )


def curve_knots(params: ApplianceParams) -> list[float]:
    """Durations where a flexibility curve changes shape."""
    return [
        thermo_logic.max_reduction_capacity(params),
        params.delta / params.drift_rate,
        coord_max_duration(params),
    ]


def sweep_grid(params: ApplianceParams, t_max: float, step: float) -> np.ndarray:
    """Regular grid on [0, t_max] merged with the curve knots inside it."""
    if t_max <= 0 or step <= 0:
        raise InvalidParametersError("Sweep range and step must be positive.")
    n_steps = max(int(round(t_max / step)), 1)
    grid = np.linspace(0.0, t_max, n_steps + 1)
    knots = [knot for knot in curve_knots(params) if knot <= t_max]
    return np.union1d(grid, knots)


def sweep(
    params: ApplianceParams,
    t_grid: Sequence[float],
    kind: RequestKind = RequestKind.REDUCE,
) -> list[tuple[float, float, float, Optional[float]]]:
    """Rows (t, upper, indiv, coord) of the flexibility envelope; coord is None past
    its maximum duration."""
    target = effective_params(params, kind)
    t_coord_max = coord_max_duration(target)
    rows: list[tuple[float, float, float, Optional[float]]] = []
    for t in t_grid:
        t = float(t)
        coord = (
            coord_fraction(target, t)
            if t <= t_coord_max * (1.0 + FEASIBILITY_RTOL)
            else None
        )
        rows.append(
            (t, upper_bound_fraction(target, t), indiv_fraction(target, t), coord)
        )
    return rows
