# logic/protocol_logic.py

"""Aggregator-side planning of the broadcast message and appliance-side interpretation."""

import hashlib
import logging
import math
from typing import Any

from tclflex.constants import FEASIBILITY_RTOL, SCHEDULE_ATOL, SCHEDULE_RTOL
from tclflex.errors import (
    InfeasibleAmplitudeError,
    InfeasibleDurationError,
    InvalidParametersError,
    MessageError,
)
from tclflex.logic import analytics_logic, thermo_logic
from tclflex.models import (
    ApplianceAction,
    ApplianceParams,
    BroadcastMessage,
    CoordSchedule,
    CyclePhase,
    MessageScheme,
    OffAt,
    OffNow,
    PlanMode,
    QuoteScheme,
    ReductionRequest,
    RequestKind,
    SchemePreference,
)

LOGGER = logging.getLogger(__name__)


## planning


def _indiv_duration_feasible(params: ApplianceParams, t: float) -> bool:
    return t < thermo_logic.max_reduction_capacity(params)


def _coord_duration_feasible(params: ApplianceParams, t: float) -> bool:
    return t <= analytics_logic.coord_max_duration(params) * (1.0 + FEASIBILITY_RTOL)


def _pick_scheme(
    request: ReductionRequest,
    target: ApplianceParams,
    n: int,
    scheme_pref: SchemePreference,
) -> MessageScheme:
    t = request.duration
    indiv_ok = _indiv_duration_feasible(target, t)
    coord_ok = _coord_duration_feasible(target, t)

    if scheme_pref == SchemePreference.INDIV:
        if not indiv_ok:
            raise InfeasibleDurationError(
                f"Individual reduction cannot sustain {t:g} h; no appliance can "
                f"reduce for longer than {thermo_logic.max_reduction_capacity(target):g} h."
            )
        return MessageScheme.INDIV
    if scheme_pref == SchemePreference.COORD:
        if not coord_ok:
            raise InfeasibleDurationError(
                f"Coordinated reduction cannot sustain {t:g} h; its maximum duration is "
                f"{analytics_logic.coord_max_duration(target):g} h."
            )
        return MessageScheme.COORD
    if scheme_pref != SchemePreference.AUTO:
        raise InvalidParametersError(
            f"'{scheme_pref.value}' is not a broadcast scheme; it cannot be planned."
        )

    if not indiv_ok and not coord_ok:
        raise InfeasibleDurationError(
            f"No broadcast scheme can sustain {t:g} h (coordinated maximum "
            f"{analytics_logic.coord_max_duration(target):g} h)."
        )
    # coord dominates indiv, so the maximum goes to coord whenever it is feasible
    if request.is_max:
        return MessageScheme.COORD if coord_ok else MessageScheme.INDIV
    if indiv_ok:
        indiv_max = analytics_logic.max_amplitude(
            target, n, t, QuoteScheme.INDIV, RequestKind.REDUCE
        )
        assert request.amplitude is not None
        if request.amplitude <= indiv_max or not coord_ok:
            return MessageScheme.INDIV
    return MessageScheme.COORD


def plan(
    request: ReductionRequest,
    params: ApplianceParams,
    n: int,
    mode: PlanMode = PlanMode.LONGEST,
    scheme_pref: SchemePreference = SchemePreference.AUTO,
) -> BroadcastMessage:
    """Choose the broadcast message that delivers `request` with a fleet of n appliances."""
    mode, scheme_pref = PlanMode(mode), SchemePreference(scheme_pref)
    target = analytics_logic.effective_params(params, request.kind)
    t = request.duration

    scheme = _pick_scheme(request, target, n, scheme_pref)
    quote_scheme = QuoteScheme(scheme.value)
    maximum = analytics_logic.max_amplitude(
        target, n, t, quote_scheme, RequestKind.REDUCE
    )
    if request.amplitude is not None and request.amplitude > maximum * (
        1.0 + FEASIBILITY_RTOL
    ):
        raise InfeasibleAmplitudeError(
            f"Requested {request.amplitude:g} W but {scheme.value} offers at most "
            f"{maximum:g} W over {t:g} h."
        )
    if maximum <= 0:
        raise InfeasibleAmplitudeError(
            f"{scheme.value} offers no {request.kind.value} over {t:g} h."
        )

    LOGGER.debug(f"Planning {scheme.value} ({mode.value}); maximum {maximum} W")

    if scheme == MessageScheme.COORD:
        if mode == PlanMode.LONGEST and not request.is_max:
            LOGGER.warning(
                "Coordinated amplitudes can only be shrunk probabilistically; "
                "sharing the load across the schedule instead."
            )
        return BroadcastMessage(
            scheme=scheme,
            threshold=t,
            participation=_participation(request, maximum),
            schedule=analytics_logic.coord_schedule(target, t),
            kind=request.kind,
        )

    if mode == PlanMode.LONGEST and request.amplitude is not None:
        # stretch the duration so that exactly the requested amplitude volunteers
        v, w = target.drive_rate, target.drift_rate
        threshold = target.delta * (
            1.0 / (v + w) - request.amplitude / (n * target.power * w)
        )
        return BroadcastMessage(
            scheme=scheme,
            threshold=max(threshold, t),
            participation=1.0,
            kind=request.kind,
        )
    return BroadcastMessage(
        scheme=scheme,
        threshold=t,
        participation=_participation(request, maximum),
        kind=request.kind,
    )


def _participation(request: ReductionRequest, maximum: float) -> float:
    if request.amplitude is None:
        return 1.0
    return min(request.amplitude / maximum, 1.0)


## interpretation


def interpret(
    message: BroadcastMessage,
    params: ApplianceParams,
    phase: CyclePhase,
    draw: float,
) -> ApplianceAction:
    """What one appliance does on receiving `message` at cycle position `phase`.

    For increase messages the appliance reasons on its mirrored cycle, so OFF actions
    refer to the mirrored modifier.
    """
    if draw >= message.participation:
        return None
    if message.kind == RequestKind.INCREASE:
        phase = thermo_logic.mirror_phase(params, phase)
        params = thermo_logic.mirror(params)

    if message.scheme == MessageScheme.INDIV:
        if (
            thermo_logic.is_on(params, phase)
            and thermo_logic.reduction_capacity(params, phase) >= message.threshold
        ):
            return OffNow()
        return None

    schedule = analytics_logic.coord_schedule(params, message.threshold)
    if message.schedule is not None and not _schedules_agree(
        message.schedule.t_tilde, message.schedule.y1, message.schedule.y2, schedule
    ):
        LOGGER.warning(
            "Broadcast schedule disagrees with the locally computed one; "
            "using the local values."
        )

    y = thermo_logic.wrap_phase(params, phase).y
    if schedule.y1 <= y <= schedule.y2:
        return OffNow()
    entry_rate = 1.0 + params.drift_rate / params.drive_rate
    x = ((schedule.y1 - y) % thermo_logic.cycle_length(params)) / entry_rate
    if x <= message.threshold - schedule.t_tilde:
        return OffAt(schedule.t_tilde + x)
    return None


def participation_draw(seed: int, appliance_index: int) -> float:
    """Deterministic uniform sample in [0, 1) for one appliance.

    Derived from a BLAKE2b digest of (seed, index), so it is identical across runs,
    platforms and interpreter versions.
    """
    digest = hashlib.blake2b(
        f"{seed}:{appliance_index}".encode(), digest_size=8
    ).digest()
    return (int.from_bytes(digest, "big") >> 11) * 2.0**-53


def participation_draws(seed: int, n: int) -> list[float]:
    return [participation_draw(seed, index) for index in range(n)]


## serialization


def message_to_record(message: BroadcastMessage) -> dict[str, Any]:
    """Flat key-value form of a message; schedule fields are empty for indiv messages."""
    record: dict[str, Any] = {
        "kind": message.kind.value,
        "scheme": message.scheme.value,
        "threshold_hours": message.threshold,
        "participation": message.participation,
        "t_tilde": None,
        "y1": None,
        "y2": None,
    }
    if message.schedule is not None:
        record.update(
            t_tilde=message.schedule.t_tilde,
            y1=message.schedule.y1,
            y2=message.schedule.y2,
        )
    return record


def _schedules_agree(
    t_tilde: float, y1: float, y2: float, schedule: CoordSchedule
) -> bool:
    return all(
        math.isclose(sent, local, rel_tol=SCHEDULE_RTOL, abs_tol=SCHEDULE_ATOL)
        for sent, local in (
            (t_tilde, schedule.t_tilde),
            (y1, schedule.y1),
            (y2, schedule.y2),
        )
    )


def message_from_record(
    record: dict[str, Any], params: ApplianceParams
) -> BroadcastMessage:
    """Rebuild a message, recomputing its schedule from the appliance's own parameters."""
    try:
        kind = RequestKind(record.get("kind", RequestKind.REDUCE.value))
        scheme = MessageScheme(record["scheme"])
        threshold = float(record["threshold_hours"])
        participation = float(record.get("participation", 1.0))
    except (KeyError, TypeError, ValueError) as e:
        raise MessageError(f"Malformed message record: {e}") from e

    if scheme == MessageScheme.INDIV:
        return BroadcastMessage(
            scheme=scheme,
            threshold=threshold,
            participation=participation,
            kind=kind,
        )

    target = analytics_logic.effective_params(params, kind)
    schedule = analytics_logic.coord_schedule(target, threshold)
    # empty strings are the printed form of missing fields
    sent = [record.get(key) for key in ("t_tilde", "y1", "y2")]
    if all(value not in (None, "") for value in sent) and not _schedules_agree(
        *(float(value) for value in sent), schedule
    ):
        raise MessageError(
            f"Message schedule {sent} does not match the recomputed "
            f"({schedule.t_tilde:g}, {schedule.y1:g}, {schedule.y2:g})."
        )
    return BroadcastMessage(
        scheme=scheme,
        threshold=threshold,
        participation=participation,
        schedule=schedule,
        kind=kind,
    )
