"""Measurement pipeline for the numerically induced wavepackets.

Amplitudes come from a five-point peak rule scanned inward from the packet
front; front positions from linear interpolation of a half-maximum threshold
crossing; velocities and decay exponents from least-squares fits of the
resulting series.  All detectors return ``None`` for "not detected", which
is distinct from a zero amplitude.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import AnalysisError, InsufficientDataError, ParameterError
from .grid import CompactonSpec, FieldState, GridSpec, support_edges


class Side(enum.Enum):
    FORWARD = "forward"    # right of the compacton, co-moving frame
    BACKWARD = "backward"  # left of the compacton

    @classmethod
    def from_name(cls, name: str) -> "Side":
        try:
            return cls(str(name).strip().lower())
        except ValueError:
            raise ParameterError(f"unknown side {name!r}") from None


@dataclass(frozen=True)
class RegressionFit:
    """Least-squares line fit; for log-log decay fits the exponent is -slope."""

    slope: float
    intercept: float
    r_squared: float


@dataclass(frozen=True)
class AnalysisSettings:
    """Knobs of the wavepacket measurement procedure."""

    guard_nodes: int = 5            # nodes skipped beyond the support edge
    discard_fraction: float = 0.25  # transient dropped before the decay fit
    threshold_fraction: float = 0.5  # front threshold / final-time side maximum
    min_amplitude: float = 0.0      # absolute detection floor

    def __post_init__(self):
        if not 0.0 <= self.discard_fraction < 1.0:
            raise ParameterError("discard_fraction must be in [0, 1)")
        if self.guard_nodes < 0:
            raise ParameterError("guard_nodes must be nonnegative")


def _side_bounds(side: Side, spec: CompactonSpec, grid: GridSpec, t: float,
                 guard_nodes: int):
    """Index range [start, stop) of the radiation region on one side."""
    left_edge, right_edge = support_edges(spec, t)
    dx = grid.dx
    m = grid.num_nodes
    if side is Side.FORWARD:
        start = int(math.ceil(right_edge / dx)) + guard_nodes
        stop = m
    else:
        start = 0
        stop = int(math.floor(left_edge / dx)) - guard_nodes + 1
    return max(0, start), min(m, max(0, stop))


def side_maximum(field: FieldState, side: Side, spec: CompactonSpec,
                 grid: GridSpec, guard_nodes: int = 5) -> float:
    """Largest |U| over the radiation region of one side (0 if empty)."""
    start, stop = _side_bounds(side, spec, grid, field.t, guard_nodes)
    if stop - start < 1:
        return 0.0
    return float(np.max(np.abs(field.values[start:stop])))


def _five_point_peaks(scan: np.ndarray) -> np.ndarray:
    """Values of all strictly-rising-then-falling quintuple centers."""
    if scan.size < 5:
        return np.empty(0)
    v0, v1, v2 = scan[:-4], scan[1:-3], scan[2:-2]
    v3, v4 = scan[3:-1], scan[4:]
    hits = (v0 < v1) & (v1 < v2) & (v2 > v3) & (v3 > v4)
    return v2[hits]


def detect_amplitude(field: FieldState, side: Side, spec: CompactonSpec,
                     grid: GridSpec, guard_nodes: int = 5,
                     min_amplitude: float = 0.0) -> Optional[float]:
    """Wavepacket amplitude: its principal crest, located by a five-point rule.

    A crest is a node of |U| with two strictly rising nodes before it and two
    strictly falling after it; the amplitude is the largest such crest value
    on the side.  Requiring a genuine crest (rather than a bare maximum)
    rejects monotone edges, and taking the principal one rides the packet
    envelope instead of small leading ripples.  Returns ``None`` when no
    crest above ``min_amplitude`` exists.
    """
    start, stop = _side_bounds(side, spec, grid, field.t, guard_nodes)
    if stop - start < 5:
        return None
    region = np.abs(field.values[start:stop])
    crests = _five_point_peaks(region)
    if crests.size == 0:
        return None
    amplitude = float(crests.max())
    if amplitude <= 0.0 or amplitude <= min_amplitude:
        return None
    return amplitude


def front_position(field: FieldState, side: Side, threshold: float,
                   spec: CompactonSpec, grid: GridSpec,
                   guard_nodes: int = 5) -> Optional[float]:
    """Interpolated position where |U| first crosses ``threshold``.

    The scan runs from the domain end toward the compacton: left to right
    for the backward packet, right to left for the forward one.
    """
    if threshold <= 0.0:
        raise ParameterError(f"threshold must be positive, got {threshold}")
    start, stop = _side_bounds(side, spec, grid, field.t, guard_nodes)
    if stop - start < 1:
        return None
    region = np.abs(field.values[start:stop])
    x0 = start * grid.dx
    dx = grid.dx
    above = np.flatnonzero(region >= threshold)
    if above.size == 0:
        return None
    if side is Side.BACKWARD:
        i = above[0]
        if i == 0:
            return x0
        lo, hi = region[i - 1], region[i]
        return x0 + (i - 1) * dx + dx * (threshold - lo) / (hi - lo)
    i = above[-1]
    if i == region.size - 1:
        return x0 + i * dx
    inner, outer = region[i], region[i + 1]
    return x0 + i * dx + dx * (inner - threshold) / (inner - outer)


def mean_envelope_amplitude(field: FieldState, side: Side, spec: CompactonSpec,
                            grid: GridSpec,
                            front: float) -> Optional[float]:
    """Mean |U| over nodes strictly between the support edge and the front."""
    left_edge, right_edge = support_edges(spec, field.t)
    if side is Side.FORWARD:
        lo, hi = right_edge, front
    else:
        lo, hi = front, left_edge
    dx = grid.dx
    first = int(math.floor(lo / dx)) + 1
    last = int(math.ceil(hi / dx)) - 1
    first = max(first, 0)
    last = min(last, grid.num_nodes - 1)
    if last < first:
        return None
    return float(np.mean(np.abs(field.values[first:last + 1])))


def _linear_fit(x: np.ndarray, y: np.ndarray) -> RegressionFit:
    slope, intercept = np.polyfit(x, y, 1)
    predicted = slope * x + intercept
    ss_res = float(np.sum((y - predicted) ** 2))
    ss_tot = float(np.sum((y - np.mean(y)) ** 2))
    if ss_tot == 0.0:
        r2 = 1.0 if ss_res == 0.0 else 0.0
    else:
        r2 = max(0.0, 1.0 - ss_res / ss_tot)
    return RegressionFit(float(slope), float(intercept), r2)


def front_velocity(positions, times) -> RegressionFit:
    """Front speed as the least-squares slope of position against time."""
    pos = np.asarray(positions, dtype=float)
    t = np.asarray(times, dtype=float)
    mask = np.isfinite(pos) & np.isfinite(t)
    if int(mask.sum()) < 2:
        raise InsufficientDataError(
            f"need at least 2 detected front positions, have {int(mask.sum())}")
    return _linear_fit(t[mask], pos[mask])


def scaling_exponent(mean_series, times,
                     discard_fraction: float = 0.25) -> RegressionFit:
    """Log-log fit of envelope amplitude against time after a transient discard.

    The earliest ``discard_fraction`` of the samples is dropped before
    fitting log(amplitude) on log(t); the decay exponent of the power law
    ``t**-rho`` is the negated slope of the returned fit.
    """
    amps = np.asarray(mean_series, dtype=float)
    t = np.asarray(times, dtype=float)
    if amps.shape != t.shape:
        raise ParameterError("series and times have mismatched lengths")
    if not 0.0 <= discard_fraction < 1.0:
        raise ParameterError("discard_fraction must be in [0, 1)")
    drop = int(math.floor(amps.size * discard_fraction))
    amps, t = amps[drop:], t[drop:]
    usable = np.isfinite(amps)
    amps, t = amps[usable], t[usable]
    if np.any(amps <= 0.0):
        raise AnalysisError("nonpositive amplitudes in the fit window")
    if np.any(t <= 0.0):
        raise AnalysisError("nonpositive times in the fit window")
    if amps.size < 4:
        raise InsufficientDataError(
            f"need at least 4 usable points after the discard, have {amps.size}")
    return _linear_fit(np.log(t), np.log(amps))


def convergence_exponent(amplitudes, steps) -> RegressionFit:
    """Power-law exponent q of amplitude against step size (log-log slope)."""
    amps = np.asarray(amplitudes, dtype=float)
    h = np.asarray(steps, dtype=float)
    if amps.shape != h.shape:
        raise ParameterError("amplitudes and steps have mismatched lengths")
    mask = np.isfinite(amps) & (amps > 0.0) & np.isfinite(h) & (h > 0.0)
    if int(mask.sum()) < 2:
        raise InsufficientDataError(
            f"need at least 2 valid (amplitude, step) pairs, have {int(mask.sum())}")
    return _linear_fit(np.log(h[mask]), np.log(amps[mask]))


@dataclass
class SideReport:
    """Measured series and fits for one wavepacket."""

    side: Side
    threshold: float
    times: np.ndarray
    amplitudes: np.ndarray
    front_positions: np.ndarray
    mean_amplitudes: np.ndarray
    front_fit: Optional[RegressionFit]
    decay_fit: Optional[RegressionFit]

    @property
    def detected(self) -> bool:
        return bool(np.isfinite(self.amplitudes).any())

    @property
    def final_amplitude(self) -> float:
        finite = self.amplitudes[np.isfinite(self.amplitudes)]
        return float(finite[-1]) if finite.size else float("nan")

    @property
    def front_velocity(self) -> float:
        return self.front_fit.slope if self.front_fit else float("nan")

    @property
    def decay_exponent(self) -> float:
        return -self.decay_fit.slope if self.decay_fit else float("nan")

    def amplitude_at(self, t: float) -> float:
        """Detected amplitude at the snapshot closest to ``t``."""
        idx = int(np.argmin(np.abs(self.times - t)))
        return float(self.amplitudes[idx])


@dataclass
class RadiationReport:
    forward: SideReport
    backward: SideReport

    def side(self, side: Side) -> SideReport:
        return self.forward if side is Side.FORWARD else self.backward


def analyze_trajectory(trajectory,
                       settings: AnalysisSettings = AnalysisSettings()) -> RadiationReport:
    """Measure both wavepackets over a trajectory's snapshots.

    The front threshold is half the side maximum at the final snapshot, so
    front tracking is a second pass over the stored states.
    """
    states = trajectory.states
    if not states:
        raise InsufficientDataError("trajectory has no snapshots")
    spec, grid = trajectory.spec, trajectory.grid
    times = np.array([s.t for s in states])
    final = states[-1]

    reports = {}
    for side in (Side.FORWARD, Side.BACKWARD):
        threshold = settings.threshold_fraction * side_maximum(
            final, side, spec, grid, settings.guard_nodes)
        amps = np.full(times.size, np.nan)
        fronts = np.full(times.size, np.nan)
        means = np.full(times.size, np.nan)
        for i, state in enumerate(states):
            amp = detect_amplitude(state, side, spec, grid,
                                   settings.guard_nodes,
                                   settings.min_amplitude)
            if amp is not None:
                amps[i] = amp
            if threshold > 0.0:
                front = front_position(state, side, threshold, spec, grid,
                                       settings.guard_nodes)
                if front is not None:
                    fronts[i] = front
                    mean = mean_envelope_amplitude(state, side, spec, grid, front)
                    if mean is not None:
                        means[i] = mean

        try:
            front_fit = front_velocity(fronts, times)
        except InsufficientDataError:
            front_fit = None
        try:
            decay_fit = scaling_exponent(means, times, settings.discard_fraction)
        except (AnalysisError, InsufficientDataError):
            decay_fit = None
        reports[side] = SideReport(side, threshold, times, amps, fronts, means,
                                   front_fit, decay_fit)

    return RadiationReport(forward=reports[Side.FORWARD],
                           backward=reports[Side.BACKWARD])
