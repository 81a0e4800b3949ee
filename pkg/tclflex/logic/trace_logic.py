# logic/trace_logic.py

"""Step-function algebra over PowerTrace values, plus CSV import/export."""

import csv
import functools
import logging
import math
from typing import Callable, Iterable

import numpy as np

from tclflex.constants import TRACE_CSV_HEADER
from tclflex.errors import TraceMismatchError
from tclflex.models import PowerTrace

LOGGER = logging.getLogger(__name__)


def _coalesce(times: np.ndarray, powers: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Drop breakpoints that do not change the power."""
    keep = np.ones(len(times), dtype=bool)
    keep[1:] = powers[1:] != powers[:-1]
    return times[keep], powers[keep]


def from_events(
    initial_power: float,
    event_times: np.ndarray,
    event_deltas: np.ndarray,
    horizon: float,
) -> PowerTrace:
    """Build a trace from power changes; simultaneous changes are summed in input order."""
    event_times = np.asarray(event_times, dtype=float)
    event_deltas = np.asarray(event_deltas, dtype=float)
    inside = event_times < horizon
    event_times, event_deltas = event_times[inside], event_deltas[inside]

    order = np.argsort(event_times, kind="stable")
    event_times, event_deltas = event_times[order], event_deltas[order]
    levels = initial_power + np.cumsum(event_deltas)

    # keep the level reached after the last change at each distinct time
    distinct, first_index = np.unique(event_times, return_index=True)
    last_index = np.append(first_index[1:], len(event_times)) - 1
    levels = levels[last_index] if len(distinct) else levels

    if len(distinct) and distinct[0] == 0.0:
        times, powers = distinct, levels
    else:
        times = np.concatenate(([0.0], distinct))
        powers = np.concatenate(([initial_power], levels))
    times, powers = _coalesce(times, powers)
    return PowerTrace(times=times, powers=powers, horizon=horizon)


def constant(power: float, horizon: float) -> PowerTrace:
    return PowerTrace(times=[0.0], powers=[power], horizon=horizon)


def value_at(trace: PowerTrace, x: float) -> float:
    index = int(np.searchsorted(trace.times, x, side="right")) - 1
    return float(trace.powers[max(index, 0)])


def _values_at(trace: PowerTrace, xs: np.ndarray) -> np.ndarray:
    return trace.powers[np.searchsorted(trace.times, xs, side="right") - 1]


def combine_traces(
    first: PowerTrace,
    second: PowerTrace,
    operation: Callable[[np.ndarray, np.ndarray], np.ndarray],
) -> PowerTrace:
    """Pointwise operation on two traces over the union of their breakpoints."""
    if not math.isclose(first.horizon, second.horizon, rel_tol=1e-12):
        raise TraceMismatchError(
            f"Cannot combine traces with horizons {first.horizon:g} h and "
            f"{second.horizon:g} h."
        )
    times = np.union1d(first.times, second.times)
    powers = operation(_values_at(first, times), _values_at(second, times))
    times, powers = _coalesce(times, np.asarray(powers, dtype=float))
    return PowerTrace(times=times, powers=powers, horizon=first.horizon)


def add_traces(traces: Iterable[PowerTrace]) -> PowerTrace:
    """Sum traces left to right; a fixed input order gives bit-identical results."""
    return functools.reduce(
        lambda total, trace: combine_traces(total, trace, np.add), traces
    )


def baseline_delta(trace: PowerTrace, baseline: PowerTrace) -> PowerTrace:
    """trace - baseline; signed values are allowed."""
    return combine_traces(trace, baseline, np.subtract)


def map_powers(
    trace: PowerTrace, function: Callable[[np.ndarray], np.ndarray]
) -> PowerTrace:
    times, powers = _coalesce(
        trace.times, np.asarray(function(trace.powers), dtype=float)
    )
    return PowerTrace(times=times, powers=powers, horizon=trace.horizon)


def window_segments(
    trace: PowerTrace, start: float, end: float
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(starts, ends, values) of the positive-width pieces of the trace inside [start, end)."""
    edges = np.append(trace.times, trace.horizon)
    starts = np.maximum(edges[:-1], start)
    ends = np.minimum(edges[1:], end)
    inside = ends > starts
    return starts[inside], ends[inside], trace.powers[inside]


def integral_over(trace: PowerTrace, start: float, end: float) -> float:
    starts, ends, values = window_segments(trace, start, end)
    return float(np.sum((ends - starts) * values))


def mean_over(trace: PowerTrace, start: float, end: float) -> float:
    if end <= start:
        raise ValueError("Averaging window must have positive length.")
    return integral_over(trace, start, end) / (end - start)


def max_over(trace: PowerTrace, start: float, end: float) -> float:
    _, _, values = window_segments(trace, start, end)
    return float(values.max()) if len(values) else 0.0


def min_over(trace: PowerTrace, start: float, end: float) -> float:
    _, _, values = window_segments(trace, start, end)
    return float(values.min()) if len(values) else 0.0


def positive_part(trace: PowerTrace) -> PowerTrace:
    return map_powers(trace, lambda powers: np.maximum(powers, 0.0))


## csv


def write_trace_csv(trace: PowerTrace, path: str) -> None:
    """One row per breakpoint, full double precision."""
    with open(path, "w", newline="") as out_file:
        writer = csv.writer(out_file)
        writer.writerow(TRACE_CSV_HEADER)
        for time, power in trace.breakpoints:
            writer.writerow([repr(time), repr(power)])
    LOGGER.debug(f"Wrote {len(trace)} breakpoints to {path}")


def read_trace_csv(path: str, horizon: float) -> PowerTrace:
    with open(path, newline="") as in_file:
        reader = csv.reader(in_file)
        header = next(reader, None)
        if header != TRACE_CSV_HEADER:
            raise ValueError(
                f"Unexpected trace header {header}; expected {TRACE_CSV_HEADER}."
            )
        rows = [(float(time), float(power)) for time, power in reader]
    times, powers = zip(*rows) if rows else ((), ())
    return PowerTrace(times=list(times), powers=list(powers), horizon=horizon)
