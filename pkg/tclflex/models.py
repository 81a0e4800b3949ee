# models.py

"""Immutable domain values shared by the logic and command layers.

Units are fixed throughout: hours, degrees, watts and watt-hours.
"""

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Union

import numpy as np

from tclflex.errors import InvalidParametersError


class ApplianceKind(str, Enum):
    COOLING = "cooling"
    HEATING = "heating"


class RequestKind(str, Enum):
    REDUCE = "reduce"
    INCREASE = "increase"


class QuoteScheme(str, Enum):
    UPPER_BOUND = "upper"
    INDIV = "indiv"
    COORD = "coord"
    MIN_ENERGY_POLICY = "min_energy_policy"


class MessageScheme(str, Enum):
    INDIV = "indiv"
    COORD = "coord"


class SchemePreference(str, Enum):
    AUTO = "auto"
    INDIV = "indiv"
    COORD = "coord"
    # not a broadcast scheme: runs the min-energy policy in simulations
    UPPER = "upper"


class PlanMode(str, Enum):
    LONGEST = "longest"
    PROBABILISTIC = "probabilistic"


class Sampling(str, Enum):
    STRATIFIED = "stratified"
    UNIFORM_RANDOM = "uniform_random"


class Policy(str, Enum):
    NORMAL = "normal"
    MIN_ENERGY = "min_energy"


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise InvalidParametersError(message)


def _is_finite(*values: float) -> bool:
    return all(math.isfinite(value) for value in values)


@dataclass(frozen=True)
class ApplianceParams:
    """Thermostat band, drive rate v (ON), drift rate w (OFF) and ON power P."""

    temp_min: float
    temp_max: float
    drive_rate: float
    drift_rate: float
    power: float
    kind: ApplianceKind = ApplianceKind.COOLING

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", ApplianceKind(self.kind))
        _require(
            _is_finite(
                self.temp_min,
                self.temp_max,
                self.drive_rate,
                self.drift_rate,
                self.power,
            ),
            "Appliance parameters must be finite numbers.",
        )
        _require(self.temp_max > self.temp_min, "temp_max must exceed temp_min.")
        _require(self.drive_rate > 0, "drive_rate (v) must be positive.")
        _require(self.drift_rate > 0, "drift_rate (w) must be positive.")
        _require(self.power > 0, "power (P) must be positive.")

    @property
    def delta(self) -> float:
        return self.temp_max - self.temp_min

    @classmethod
    def from_delta(
        cls,
        delta: float,
        drive_rate: float,
        drift_rate: float,
        power: float,
        kind: ApplianceKind = ApplianceKind.COOLING,
        temp_min: float = 0.0,
    ) -> "ApplianceParams":
        return cls(
            temp_min=temp_min,
            temp_max=temp_min + delta,
            drive_rate=drive_rate,
            drift_rate=drift_rate,
            power=power,
            kind=kind,
        )


@dataclass(frozen=True)
class CyclePhase:
    """Hours since the temperature modifier last switched ON; thermo_logic wraps
    positions past one cycle."""

    y: float

    def __post_init__(self) -> None:
        _require(
            _is_finite(self.y) and self.y >= 0, "Cycle phase must be non-negative."
        )


@dataclass(frozen=True)
class ApplianceClass:
    params: ApplianceParams
    count: int
    name: str = ""

    def __post_init__(self) -> None:
        _require(self.count >= 1, "An appliance class needs at least one appliance.")


@dataclass(frozen=True)
class Portfolio:
    classes: tuple[ApplianceClass, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "classes", tuple(self.classes))
        _require(len(self.classes) > 0, "A portfolio needs at least one class.")


@dataclass(frozen=True)
class ReductionQuote:
    fraction: float
    watts: float
    scheme: QuoteScheme
    duration: float
    kind: RequestKind = RequestKind.REDUCE


@dataclass(frozen=True)
class CoordSchedule:
    """Two-batch plan: first batch [y1, y2] switches OFF at once, the second batch
    enters gradually from t_tilde until the request duration."""

    duration: float
    t_tilde: float
    y1: float
    y2: float
    y3: float
    hat_t: float
    fraction: float


@dataclass(frozen=True)
class ReductionRequest:
    """A grid request. `amplitude` is in watts, or None for the maximum available."""

    kind: RequestKind
    duration: float
    amplitude: Optional[float] = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", RequestKind(self.kind))
        _require(
            _is_finite(self.duration) and self.duration >= 0,
            "Request duration must be non-negative.",
        )
        if self.amplitude is not None:
            _require(
                _is_finite(self.amplitude) and self.amplitude > 0,
                "Request amplitude must be positive.",
            )

    @property
    def is_max(self) -> bool:
        return self.amplitude is None


@dataclass(frozen=True)
class BroadcastMessage:
    """The single aggregator-to-fleet message.

    `threshold` is the (possibly stretched) duration t' for indiv messages and the request
    duration t for coord messages. The message never carries appliance parameters.
    """

    scheme: MessageScheme
    threshold: float
    participation: float = 1.0
    schedule: Optional[CoordSchedule] = None
    kind: RequestKind = RequestKind.REDUCE

    def __post_init__(self) -> None:
        object.__setattr__(self, "scheme", MessageScheme(self.scheme))
        object.__setattr__(self, "kind", RequestKind(self.kind))
        _require(
            _is_finite(self.threshold) and self.threshold >= 0,
            "Message threshold must be non-negative.",
        )
        _require(
            0.0 <= self.participation <= 1.0, "Participation must lie in [0, 1]."
        )
        if self.scheme == MessageScheme.COORD:
            _require(self.schedule is not None, "A coord message needs a schedule.")
            assert self.schedule is not None
            _require(
                math.isclose(
                    self.schedule.duration, self.threshold, rel_tol=1e-9, abs_tol=1e-12
                ),
                "Coord schedule duration does not match the message threshold.",
            )
        else:
            _require(self.schedule is None, "An indiv message carries no schedule.")


@dataclass(frozen=True)
class OffNow:
    """Switch the modifier OFF on receipt and keep it OFF as long as possible."""


@dataclass(frozen=True)
class OffAt:
    """Switch the modifier OFF `delay` hours after receipt."""

    delay: float

    def __post_init__(self) -> None:
        _require(self.delay >= 0, "OffAt delay must be non-negative.")


ApplianceAction = Union[OffNow, OffAt, None]


@dataclass(frozen=True)
class FleetSpec:
    params: ApplianceParams
    n: int
    sampling: Sampling = Sampling.STRATIFIED
    seed: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "sampling", Sampling(self.sampling))
        _require(self.n >= 1, "A fleet needs at least one appliance.")


def _frozen_array(values: object) -> np.ndarray:
    array = np.array(values, dtype=float)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class PowerTrace:
    """Piecewise-constant power: powers[i] holds on [times[i], times[i+1]), the last
    value holds until the horizon."""

    times: np.ndarray
    powers: np.ndarray
    horizon: float

    def __post_init__(self) -> None:
        times = _frozen_array(self.times)
        powers = _frozen_array(self.powers)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "powers", powers)
        _require(times.ndim == 1 and len(times) > 0, "A trace needs breakpoints.")
        _require(len(times) == len(powers), "Trace times and powers differ in length.")
        _require(times[0] == 0.0, "Trace times must start at 0.")
        _require(
            bool(np.all(np.diff(times) > 0)), "Trace times must strictly increase."
        )
        _require(self.horizon > times[-1], "Trace horizon must follow the last time.")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PowerTrace):
            return NotImplemented
        return (
            self.horizon == other.horizon
            and np.array_equal(self.times, other.times)
            and np.array_equal(self.powers, other.powers)
        )

    def __len__(self) -> int:
        return len(self.times)

    @property
    def breakpoints(self) -> list[tuple[float, float]]:
        return list(zip(self.times.tolist(), self.powers.tolist()))


@dataclass(frozen=True)
class SimulationDiagnostics:
    temp_violations: int = 0
    forced_off_noops: int = 0
    acting_appliances: int = 0
    events: int = 0


@dataclass(frozen=True)
class SimulationResult:
    trace: PowerTrace
    diagnostics: SimulationDiagnostics = field(default_factory=SimulationDiagnostics)


@dataclass(frozen=True)
class SimReport:
    """Reduction and rebound figures of one run against its baseline.

    "Effect" is baseline − trace for reductions and trace − baseline for increases.
    """

    avg_reduction_watts: float
    sup_deviation_watts: float
    rebound_peak_watts: float
    rebound_energy_watt_hours: float
    temp_violations: int
    over_delivery: bool
    under_delivery: bool
    min_effect_watts: float
    max_effect_watts: float
    promised_watts: float
    forced_off_noops: int = 0
