# tests/logic/test_protocol_logic.py

import dataclasses
import math

import hypothesis.strategies as st
import pytest
from hypothesis import HealthCheck, given, settings
from mockito import verify, when

from tclflex.errors import (
    InfeasibleAmplitudeError,
    InfeasibleDurationError,
    InvalidParametersError,
    MessageError,
)
from tclflex.logic import analytics_logic, protocol_logic, thermo_logic
from tclflex.models import (
    ApplianceParams,
    BroadcastMessage,
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

pytestmark = pytest.mark.usefixtures("unstub_fixture")


def test_plan_longest_stretches_threshold(params_a):
    request = ReductionRequest(kind=RequestKind.REDUCE, duration=0.35, amplitude=300.0)

    message = protocol_logic.plan(request, params_a, 1400)

    assert message.scheme == MessageScheme.INDIV
    assert message.threshold == pytest.approx(0.5)
    assert message.participation == 1.0
    assert message.schedule is None


def test_plan_probabilistic_shares_participation(params_a):
    request = ReductionRequest(kind=RequestKind.REDUCE, duration=0.35, amplitude=300.0)

    message = protocol_logic.plan(
        request, params_a, 1400, mode=PlanMode.PROBABILISTIC
    )

    assert message.scheme == MessageScheme.INDIV
    assert message.threshold == 0.35
    assert message.participation == pytest.approx(300 / 510)


def test_plan_max_prefers_coord(params_a):
    request = ReductionRequest(kind=RequestKind.REDUCE, duration=0.35)

    message = protocol_logic.plan(request, params_a, 1400)

    assert message.scheme == MessageScheme.COORD
    assert message.threshold == 0.35
    assert message.participation == 1.0
    assert message.schedule == analytics_logic.coord_schedule(params_a, 0.35)


def test_plan_coord_amplitude_warns(params_a, capture_logs):
    request = ReductionRequest(kind=RequestKind.REDUCE, duration=0.8, amplitude=400.0)

    message = protocol_logic.plan(request, params_a, 1400, mode="longest")

    assert message.scheme == MessageScheme.COORD
    assert message.participation == pytest.approx(0.75)
    assert "shrunk probabilistically" in capture_logs.text


def test_plan_increase(params_a):
    request = ReductionRequest(
        kind=RequestKind.INCREASE, duration=0.35, amplitude=100.0
    )

    message = protocol_logic.plan(request, params_a, 1400)

    # the mirrored appliance has v'=1, w'=0.4 and 400 W of spare capacity
    assert message.kind == RequestKind.INCREASE
    assert message.scheme == MessageScheme.INDIV
    assert message.threshold == pytest.approx(1 / 1.4 - 100 / 560)


plan_failure_testdata = [
    # duration, amplitude, scheme preference, expected error
    (0.35, 2000.0, SchemePreference.AUTO, InfeasibleAmplitudeError),
    (1.3, None, SchemePreference.AUTO, InfeasibleDurationError),
    (0.8, None, SchemePreference.INDIV, InfeasibleDurationError),
    (1.3, None, SchemePreference.COORD, InfeasibleDurationError),
    (0.35, None, SchemePreference.UPPER, InvalidParametersError),
]


@pytest.mark.parametrize(
    "duration, amplitude, scheme_pref, expected_error", plan_failure_testdata
)
def test_plan_failures(params_a, duration, amplitude, scheme_pref, expected_error):
    request = ReductionRequest(
        kind=RequestKind.REDUCE, duration=duration, amplitude=amplitude
    )

    with pytest.raises(expected_error):
        protocol_logic.plan(request, params_a, 1400, scheme_pref=scheme_pref)


def test_plan_auto_falls_back_to_coord(params_a):
    # 0.8 h is past every appliance's individual capacity
    request = ReductionRequest(kind=RequestKind.REDUCE, duration=0.8, amplitude=100.0)

    message = protocol_logic.plan(request, params_a, 1400)

    assert message.scheme == MessageScheme.COORD


def test_plan_uses_quote(params_a):
    quote = analytics_logic.quote(params_a, 1400, 0.35, "indiv")
    when(analytics_logic).max_amplitude(...).thenReturn(quote.watts)
    request = ReductionRequest(kind=RequestKind.REDUCE, duration=0.35, amplitude=300.0)

    protocol_logic.plan(request, params_a, 1400, scheme_pref="indiv")

    verify(analytics_logic, times=1).max_amplitude(...)


interpret_indiv_testdata = [
    # y, draw, expected action
    (1.0, 0.0, OffNow()),  # 0.4 h of capacity
    (2.0, 0.0, OffNow()),
    (0.0, 0.0, None),  # just switched ON, at the temperature limit
    (3.0, 0.0, None),  # OFF
    (1.0, 0.6, None),  # not selected
]


@pytest.mark.parametrize("y, draw, expected", interpret_indiv_testdata)
def test_interpret_indiv(params_a, y, draw, expected):
    message = BroadcastMessage(
        scheme=MessageScheme.INDIV, threshold=0.35, participation=0.5
    )

    assert protocol_logic.interpret(message, params_a, CyclePhase(y), draw) == expected


interpret_coord_testdata = [
    # y, expected action
    (1.0, OffNow()),  # first batch [y1, y2]
    (2.0, OffNow()),
    (0.6, OffAt(0.4)),  # second batch
    (3.0, OffAt(1 / 3 + 4 / 3 / 3.5)),
    (2.5, None),  # too far from y1 to enter before t
    (4.5, OffNow()),  # one full cycle past 1.0
    (4.1, OffAt(0.4)),
]


@pytest.mark.parametrize("y, expected", interpret_coord_testdata)
def test_interpret_coord(params_a, y, expected):
    message = BroadcastMessage(
        scheme=MessageScheme.COORD,
        threshold=0.8,
        schedule=analytics_logic.coord_schedule(params_a, 0.8),
    )

    action = protocol_logic.interpret(message, params_a, CyclePhase(y), 0.0)

    if isinstance(expected, OffAt):
        assert isinstance(action, OffAt)
        assert action.delay == pytest.approx(expected.delay)
    else:
        assert action == expected


def test_interpret_increase_uses_mirrored_cycle(params_a):
    message = BroadcastMessage(
        scheme=MessageScheme.INDIV, threshold=0.35, kind=RequestKind.INCREASE
    )

    # OFF at y=3.0 maps to mirrored phase 0.5, ON with 0.35 h of capacity
    assert protocol_logic.interpret(message, params_a, CyclePhase(3.0), 0.0) == OffNow()
    # ON appliances are OFF in the mirrored cycle
    assert protocol_logic.interpret(message, params_a, CyclePhase(1.0), 0.0) is None


def test_interpret_schedule_disagreement_warns(params_a, capture_logs):
    schedule = analytics_logic.coord_schedule(params_a, 0.8)
    message = BroadcastMessage(
        scheme=MessageScheme.COORD,
        threshold=0.8,
        schedule=dataclasses.replace(schedule, y1=schedule.y1 + 0.1),
    )

    action = protocol_logic.interpret(message, params_a, CyclePhase(0.85), 0.0)

    # local values win: 0.85 lies in the locally computed first batch
    assert action == OffNow()
    assert "disagrees with the locally computed one" in capture_logs.text


def test_participation_draws():
    draws = protocol_logic.participation_draws(7, 50)

    assert draws == protocol_logic.participation_draws(7, 50)
    assert draws[3] == protocol_logic.participation_draw(7, 3)
    assert all(0.0 <= draw < 1.0 for draw in draws)
    assert draws != protocol_logic.participation_draws(8, 50)
    assert len(set(draws)) == 50


def test_participation_draws_are_uniform():
    draws = protocol_logic.participation_draws(0, 10000)

    assert sum(draws) / len(draws) == pytest.approx(0.5, abs=0.02)
    assert sum(draw < 0.25 for draw in draws) == pytest.approx(2500, abs=200)


def test_message_record_indiv():
    message = BroadcastMessage(
        scheme=MessageScheme.INDIV, threshold=0.5, participation=0.75
    )

    record = protocol_logic.message_to_record(message)

    assert record == {
        "kind": "reduce",
        "scheme": "indiv",
        "threshold_hours": 0.5,
        "participation": 0.75,
        "t_tilde": None,
        "y1": None,
        "y2": None,
    }


@pytest.mark.parametrize("kind", [RequestKind.REDUCE, RequestKind.INCREASE])
def test_message_record_coord(params_a, kind):
    request = ReductionRequest(kind=kind, duration=0.35)
    message = protocol_logic.plan(request, params_a, 1400)

    record = protocol_logic.message_to_record(message)

    assert record["t_tilde"] == message.schedule.t_tilde
    assert protocol_logic.message_from_record(record, params_a) == message


def test_message_from_record_mismatch(params_a):
    message = protocol_logic.plan(
        ReductionRequest(kind=RequestKind.REDUCE, duration=0.8), params_a, 1400
    )
    record = protocol_logic.message_to_record(message)
    record["y1"] += 0.01

    with pytest.raises(MessageError, match="does not match the recomputed"):
        protocol_logic.message_from_record(record, params_a)


def test_message_from_record_without_schedule(params_a):
    record = {"scheme": "coord", "threshold_hours": "0.8"}

    message = protocol_logic.message_from_record(record, params_a)

    assert message.kind == RequestKind.REDUCE
    assert message.schedule == analytics_logic.coord_schedule(params_a, 0.8)


malformed_record_testdata = [
    {"threshold_hours": 0.5},
    {"scheme": "broadcast", "threshold_hours": 0.5},
    {"scheme": "indiv", "threshold_hours": "soon"},
    {"scheme": "indiv", "threshold_hours": 0.5, "kind": "shift"},
]


@pytest.mark.parametrize("record", malformed_record_testdata)
def test_message_from_record_malformed(params_a, record):
    with pytest.raises(MessageError, match="Malformed message record"):
        protocol_logic.message_from_record(record, params_a)


rates = st.floats(0.2, 5.0)
# the module-wide unstub fixture runs once per test, not once per example
fixture_safe = settings(suppress_health_check=[HealthCheck.function_scoped_fixture])


@fixture_safe
@given(rates, rates, st.floats(0.01, 1.0), st.floats(0.0, 0.999))
def test_coord_offat_appliances_can_hold_until_t(v, w, share, entry):
    params = ApplianceParams.from_delta(1.0, v, w, power=1.0)
    t = share * analytics_logic.coord_max_duration(params)
    schedule = analytics_logic.coord_schedule(params, t)
    cycle = thermo_logic.cycle_length(params)
    message = BroadcastMessage(
        scheme=MessageScheme.COORD, threshold=t, schedule=schedule
    )
    # phases that reach y1 at some instant of (t_tilde, t]
    x = entry * (t - schedule.t_tilde)
    y = math.fmod(schedule.y1 - x * (1.0 + w / v) + cycle, cycle)

    action = protocol_logic.interpret(message, params, CyclePhase(y), 0.0)

    assert isinstance(action, (OffAt, OffNow))
    if isinstance(action, OffNow):
        return
    s = action.delay
    y_at_s = math.fmod(y + s, cycle)
    if y_at_s > cycle - 1e-9:
        y_at_s -= cycle
    assert 0.0 <= s <= t + 1e-9
    # naturally ON at s
    assert -1e-9 <= y_at_s < thermo_logic.on_duration(params)
    # enough room below the limit to stay OFF from s to t
    assert v * max(y_at_s, 0.0) >= w * (t - s) - 1e-9


@fixture_safe
@given(
    rates,
    rates,
    st.integers(1, 5000),
    st.floats(0.0, 0.99),
    st.floats(0.01, 1.0),
)
def test_plan_longest_threshold_delivers_amplitude(v, w, n, t_share, amplitude_share):
    params = ApplianceParams.from_delta(1.0, v, w, power=1.0)
    t = t_share * thermo_logic.max_reduction_capacity(params)
    amplitude = amplitude_share * analytics_logic.max_amplitude(
        params, n, t, QuoteScheme.INDIV
    )
    request = ReductionRequest(kind=RequestKind.REDUCE, duration=t, amplitude=amplitude)

    message = protocol_logic.plan(request, params, n, PlanMode.LONGEST)

    assert message.scheme == MessageScheme.INDIV
    assert message.threshold >= t
    delivered = analytics_logic.indiv_fraction(
        params, message.threshold
    ) * analytics_logic.steady_state_power(params, n)
    assert delivered == pytest.approx(amplitude, rel=1e-6)
