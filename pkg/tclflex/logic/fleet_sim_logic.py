# logic/fleet_sim_logic.py

"""Event-driven simulation of a homogeneous appliance fleet.

Each appliance follows its exact piecewise-linear temperature path, so the aggregate
power is an exact step function: no time step is involved anywhere. Appliances are
independent once the message is received and are evaluated in index blocks on a
thread pool; block traces are summed in index order so results are bit-reproducible.

Per-appliance event generation is pure Python, so the interpreter lock serializes it
and the pool does not speed it up; blocks bound the size of each merge, and worker
threads only overlap the numpy sorting and summing of block traces.
"""

import dataclasses
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Optional, Sequence

import numpy as np
from tqdm import tqdm
from tqdm.contrib.logging import logging_redirect_tqdm

from tclflex.config import FlexConfig, load_config
from tclflex.constants import EVENT_TIME_RTOL
from tclflex.errors import InfeasibleDurationError, InvalidParametersError
from tclflex.logic import analytics_logic, protocol_logic, thermo_logic, trace_logic
from tclflex.models import (
    ApplianceAction,
    ApplianceParams,
    BroadcastMessage,
    CyclePhase,
    FleetSpec,
    OffAt,
    OffNow,
    Policy,
    PowerTrace,
    QuoteScheme,
    ReductionRequest,
    RequestKind,
    Sampling,
    SimReport,
    SimulationDiagnostics,
    SimulationResult,
)

LOGGER = logging.getLogger(__name__)

PROGRESS_BAR_FORMAT = "{desc}: {percentage:3.0f}%|{bar}| {n_fmt}/{total_fmt} blocks"


## fleets


def build_fleet(spec: FleetSpec) -> list[CyclePhase]:
    """Initial cycle phases of a steady-state fleet."""
    cycle = thermo_logic.cycle_length(spec.params)
    if spec.sampling == Sampling.STRATIFIED:
        phases = (np.arange(spec.n) + 0.5) * cycle / spec.n
    else:
        rng = np.random.default_rng(spec.seed)
        # uniform() may return the upper bound after rounding
        phases = np.minimum(
            rng.uniform(0.0, cycle, spec.n), np.nextafter(cycle, 0.0)
        )
    return [CyclePhase(float(y)) for y in phases]


def empirical_survival(
    fleet: Sequence[CyclePhase], params: ApplianceParams, t: float
) -> float:
    """Share of the fleet that is ON and able to reduce constantly for at least t."""
    capable = sum(
        1
        for phase in fleet
        if thermo_logic.is_on(params, phase)
        and thermo_logic.reduction_capacity(params, phase) >= t
    )
    return capable / len(fleet)


## single appliance


@dataclasses.dataclass
class _ApplianceRun:
    initial_power: float
    change_times: list[float] = dataclasses.field(default_factory=list)
    change_deltas: list[float] = dataclasses.field(default_factory=list)
    temp_violations: int = 0
    forced_off_noop: bool = False


def _forced_off_time(action: ApplianceAction) -> Optional[float]:
    if isinstance(action, OffNow):
        return 0.0
    if isinstance(action, OffAt):
        return action.delay
    return None


def _pinned_run(
    params: ApplianceParams, phase: CyclePhase, horizon: float
) -> _ApplianceRun:
    """Drift to the limit with the modifier OFF, then hold the limit at average power."""
    v, w, power = params.drive_rate, params.drift_rate, params.power
    on = thermo_logic.is_on(params, phase)
    run = _ApplianceRun(initial_power=power if on else 0.0)
    if on:
        run.change_times.append(0.0)
        run.change_deltas.append(-power)
    pin_at = thermo_logic.distance_to_limit(params, phase) / w
    if pin_at < horizon:
        run.change_times.append(pin_at)
        run.change_deltas.append(power * w / (v + w))
    return run


def _nominal_run(
    params: ApplianceParams,
    phase: CyclePhase,
    action: ApplianceAction,
    horizon: float,
    epsilon: float,
) -> _ApplianceRun:
    """Hysteresis control with at most one forced OFF, held until the limit is hit."""
    v, w, delta, power = (
        params.drive_rate,
        params.drift_rate,
        params.delta,
        params.power,
    )
    on = thermo_logic.is_on(params, phase)
    # degrees away from the drift-side limit
    level = thermo_logic.distance_to_limit(params, phase)
    run = _ApplianceRun(initial_power=power if on else 0.0)
    forced_at = _forced_off_time(action)
    clock = 0.0

    def check(value: float) -> None:
        if not -epsilon <= value <= delta + epsilon:
            run.temp_violations += 1

    check(level)
    while clock < horizon:
        toggle_at = clock + ((delta - level) / v if on else level / w)
        if forced_at is not None and math.isclose(
            forced_at, toggle_at, rel_tol=EVENT_TIME_RTOL, abs_tol=EVENT_TIME_RTOL
        ):
            if on:
                forced_at = toggle_at
            else:
                # switching ON at the drift-side limit; nothing left to hold OFF
                forced_at = None

        # forced OFF wins ties with a natural toggle
        if (
            forced_at is not None
            and forced_at < horizon
            and forced_at <= toggle_at
        ):
            elapsed = forced_at - clock
            level = level + v * elapsed if on else level - w * elapsed
            check(level)
            level = min(max(level, 0.0), delta)
            if on:
                on = False
                run.change_times.append(forced_at)
                run.change_deltas.append(-power)
            else:
                run.forced_off_noop = True
            clock, forced_at = forced_at, None
            continue

        if toggle_at >= horizon:
            break
        elapsed = toggle_at - clock
        check(level + v * elapsed if on else level - w * elapsed)
        clock = toggle_at
        level = delta if on else 0.0
        on = not on
        run.change_times.append(clock)
        run.change_deltas.append(power if on else -power)
    return run


## blocks


def _simulate_block(
    params: ApplianceParams,
    phases: Sequence[CyclePhase],
    actions: Sequence[ApplianceAction],
    policy: Policy,
    horizon: float,
    epsilon: float,
) -> SimulationResult:
    runs = [
        (
            _pinned_run(params, phase, horizon)
            if policy == Policy.MIN_ENERGY
            else _nominal_run(params, phase, action, horizon, epsilon)
        )
        for phase, action in zip(phases, actions)
    ]
    change_times = [time for run in runs for time in run.change_times]
    change_deltas = [change for run in runs for change in run.change_deltas]
    trace = trace_logic.from_events(
        initial_power=sum(run.initial_power for run in runs),
        event_times=np.array(change_times, dtype=float),
        event_deltas=np.array(change_deltas, dtype=float),
        horizon=horizon,
    )
    return SimulationResult(
        trace=trace,
        diagnostics=SimulationDiagnostics(
            temp_violations=sum(run.temp_violations for run in runs),
            forced_off_noops=sum(run.forced_off_noop for run in runs),
            acting_appliances=sum(action is not None for action in actions),
            events=len(change_times),
        ),
    )


def _sum_diagnostics(
    diagnostics: Sequence[SimulationDiagnostics],
) -> SimulationDiagnostics:
    return SimulationDiagnostics(
        temp_violations=sum(d.temp_violations for d in diagnostics),
        forced_off_noops=sum(d.forced_off_noops for d in diagnostics),
        acting_appliances=sum(d.acting_appliances for d in diagnostics),
        events=sum(d.events for d in diagnostics),
    )


def _run_blocks(
    fleet: Sequence[CyclePhase],
    params: ApplianceParams,
    message: Optional[BroadcastMessage],
    policy: Policy,
    horizon: float,
    seed: int,
    config: FlexConfig,
) -> SimulationResult:
    if message is None:
        actions: list[ApplianceAction] = [None] * len(fleet)
    else:
        actions = [
            protocol_logic.interpret(message, params, phase, draw)
            for phase, draw in zip(
                fleet, protocol_logic.participation_draws(seed, len(fleet))
            )
        ]

    starts = range(0, len(fleet), config.block_size)
    blocks = [
        (fleet[start:end], actions[start:end])
        for start, end in zip(starts, [*starts[1:], len(fleet)])
    ]
    LOGGER.debug(
        f"Simulating {len(fleet)} appliances in {len(blocks)} blocks "
        f"on up to {config.max_workers} workers"
    )

    def run_block(
        block: tuple[Sequence[CyclePhase], Sequence[ApplianceAction]],
    ) -> SimulationResult:
        phases, block_actions = block
        return _simulate_block(
            params,
            phases,
            block_actions,
            policy,
            horizon,
            config.safety_epsilon_degrees,
        )

    with logging_redirect_tqdm():  # log without interfering with progress bars
        with ThreadPoolExecutor(max_workers=config.max_workers) as ex:
            # map keeps block order, which fixes the summation order
            results = list(
                tqdm(
                    ex.map(run_block, blocks),
                    total=len(blocks),
                    desc="Simulating",
                    bar_format=PROGRESS_BAR_FORMAT,
                    leave=False,
                    disable=None,
                )
            )

    return SimulationResult(
        trace=trace_logic.add_traces(result.trace for result in results),
        diagnostics=_sum_diagnostics([result.diagnostics for result in results]),
    )


## public entry points


def run_simulation(
    fleet: Sequence[CyclePhase],
    params: ApplianceParams,
    horizon: float,
    message: Optional[BroadcastMessage] = None,
    policy: Policy = Policy.NORMAL,
    seed: int = 0,
    kind: RequestKind = RequestKind.REDUCE,
    config: Optional[FlexConfig] = None,
) -> SimulationResult:
    """Simulate the fleet from the broadcast instant (time 0) to the horizon.

    `kind` only matters without a message: it selects the max-energy variant of the
    min-energy policy, and the mirrored evaluation of a baseline meant to be compared
    with an increase run. With a message, the message kind applies.
    """
    policy = Policy(policy)
    if not horizon > 0:
        raise InvalidParametersError(
            f"Simulation horizon must be positive, got {horizon}."
        )
    if len(fleet) == 0:
        raise InvalidParametersError("Cannot simulate an empty fleet.")
    if policy == Policy.MIN_ENERGY and message is not None:
        raise InvalidParametersError(
            "The min-energy policy does not take a broadcast message."
        )
    config = config or load_config()
    kind = RequestKind(message.kind if message is not None else kind)

    if kind == RequestKind.INCREASE:
        # an increase is a reduction of the mirrored appliance's consumption
        mirrored = _run_blocks(
            [thermo_logic.mirror_phase(params, phase) for phase in fleet],
            thermo_logic.mirror(params),
            (
                dataclasses.replace(message, kind=RequestKind.REDUCE)
                if message is not None
                else None
            ),
            policy,
            horizon,
            seed,
            config,
        )
        full_power = len(fleet) * params.power
        result = SimulationResult(
            trace=trace_logic.map_powers(
                mirrored.trace, lambda powers: full_power - powers
            ),
            diagnostics=mirrored.diagnostics,
        )
    else:
        result = _run_blocks(fleet, params, message, policy, horizon, seed, config)

    diagnostics = result.diagnostics
    if diagnostics.temp_violations:
        LOGGER.warning(
            f"{diagnostics.temp_violations} temperature readings left the band "
            f"by more than {config.safety_epsilon_degrees:g} degrees"
        )
    if diagnostics.forced_off_noops:
        LOGGER.warning(
            f"{diagnostics.forced_off_noops} appliances were told to switch OFF "
            "while already OFF"
        )
    LOGGER.debug(
        f"Simulation done: {len(result.trace)} breakpoints, "
        f"{diagnostics.events} events, "
        f"{diagnostics.acting_appliances} acting appliances"
    )
    return result


def simulate(
    fleet: Sequence[CyclePhase],
    params: ApplianceParams,
    message: Optional[BroadcastMessage],
    policy: Policy,
    horizon: float,
    seed: int = 0,
) -> PowerTrace:
    return run_simulation(
        fleet, params, horizon, message=message, policy=policy, seed=seed
    ).trace


def baseline_delta(trace: PowerTrace, baseline: PowerTrace) -> PowerTrace:
    return trace_logic.baseline_delta(trace, baseline)


## reporting


def _promised_watts(
    request: ReductionRequest,
    params: ApplianceParams,
    n: int,
    scheme: Optional[QuoteScheme],
) -> float:
    if request.amplitude is not None:
        return request.amplitude
    if scheme is None:
        return 0.0
    try:
        return analytics_logic.max_amplitude(
            params, n, request.duration, scheme, request.kind
        )
    except InfeasibleDurationError:
        return 0.0


def report(
    trace: PowerTrace,
    baseline: PowerTrace,
    request: ReductionRequest,
    params: ApplianceParams,
    n: int,
    scheme: Optional[QuoteScheme] = None,
    diagnostics: Optional[SimulationDiagnostics] = None,
) -> SimReport:
    """Compare a run against its baseline over the request window and its aftermath.

    The promised amplitude is the request amplitude, or the quote of `scheme` for a
    maximum request, or 0 when neither is known.
    """
    t, horizon = request.duration, trace.horizon
    if not t > 0:
        raise InvalidParametersError("A report needs a positive request duration.")
    if horizon <= t:
        raise InvalidParametersError(
            f"Simulation horizon {horizon:g} h must exceed "
            f"the request duration {t:g} h."
        )
    diagnostics = diagnostics or SimulationDiagnostics()

    if request.kind == RequestKind.INCREASE:
        effect = trace_logic.baseline_delta(trace, baseline)
    else:
        effect = trace_logic.baseline_delta(baseline, trace)
    rebound = trace_logic.positive_part(
        trace_logic.map_powers(effect, lambda powers: -powers)
    )

    average = trace_logic.mean_over(effect, 0.0, t)
    _, _, window_values = trace_logic.window_segments(effect, 0.0, t)
    promised = _promised_watts(request, params, n, scheme)
    quantum = params.power

    return SimReport(
        avg_reduction_watts=average,
        sup_deviation_watts=float(np.max(np.abs(window_values - average))),
        rebound_peak_watts=trace_logic.max_over(rebound, t, horizon),
        rebound_energy_watt_hours=trace_logic.integral_over(rebound, t, horizon),
        temp_violations=diagnostics.temp_violations,
        over_delivery=bool(np.any(window_values > promised + quantum)),
        under_delivery=bool(np.any(window_values < promised - quantum)),
        min_effect_watts=float(window_values.min()),
        max_effect_watts=float(window_values.max()),
        promised_watts=promised,
        forced_off_noops=diagnostics.forced_off_noops,
    )


def min_energy_average_reduction(
    params: ApplianceParams,
    n: int,
    t: float,
    kind: RequestKind = RequestKind.REDUCE,
    config: Optional[FlexConfig] = None,
) -> float:
    """Average effect over [0, t] of the min-energy policy on a stratified fleet."""
    if not t > 0:
        raise InvalidParametersError("Duration must be positive.")
    fleet = build_fleet(FleetSpec(params=params, n=n))
    policy_run = run_simulation(
        fleet, params, t, policy=Policy.MIN_ENERGY, kind=kind, config=config
    )
    baseline = run_simulation(fleet, params, t, kind=kind, config=config)
    if RequestKind(kind) == RequestKind.INCREASE:
        effect = trace_logic.baseline_delta(policy_run.trace, baseline.trace)
    else:
        effect = trace_logic.baseline_delta(baseline.trace, policy_run.trace)
    return trace_logic.mean_over(effect, 0.0, t)
