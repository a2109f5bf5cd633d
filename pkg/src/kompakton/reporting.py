"""Text persistence: snapshot files, invariant series, and analysis CSVs.

Snapshot files carry one header line and one ``x,value`` pair per line at 17
significant digits, so they round-trip losslessly and diff cleanly.  CSV
cells are always either a finite number or one of the literal markers
``blowup`` / ``nd``.
"""

from __future__ import annotations

import math
import os
from pathlib import Path

import numpy as np

from .config import ExperimentConfig, parse_config
from .errors import AnalysisError, ConfigurationError
from .grid import FieldState
from .invariants import InvariantSeries
from .radiation import RadiationReport
from .stepper import RunStatus, Trajectory

SNAPSHOT_DIRNAME = "snapshots"
CONFIG_FILENAME = "config.txt"
STATUS_FILENAME = "status.txt"
INVARIANTS_FILENAME = "invariants.csv"

NOT_DETECTED = "nd"
BLOWUP = "blowup"


def format_value(x) -> str:
    """CSV cell: shortest exact float representation, or a marker."""
    if x is None:
        return NOT_DETECTED
    x = float(x)
    if not math.isfinite(x):
        return NOT_DETECTED
    return repr(x)


def _snapshot_name(index: int) -> str:
    return f"snapshot_{index:04d}.txt"


def write_snapshot(path, field: FieldState, config: ExperimentConfig) -> None:
    x = np.arange(field.values.size) * config.dx
    header = (f"t={field.t:.17g} scheme={config.scheme.value} "
              f"p={config.p} dx={config.dx:.17g}")
    np.savetxt(path, np.column_stack([x, field.values]), fmt="%.17g",
               delimiter=",", header=header, comments="# ")


def read_snapshot(path):
    """Returns (meta dict, positions, values)."""
    with open(path) as fh:
        first = fh.readline()
    if not first.startswith("#"):
        raise ConfigurationError(f"{path}: missing snapshot header")
    meta = {}
    for token in first.lstrip("#").split():
        if "=" in token:
            key, value = token.split("=", 1)
            meta[key] = value
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return meta, data[:, 0], data[:, 1]


def write_invariants(path, series: InvariantSeries) -> None:
    with open(path, "w") as fh:
        fh.write("t,I1,I2,I3,I4\n")
        for t, row in zip(series.times, series.values):
            cells = [format_value(t)] + [format_value(v) for v in row]
            fh.write(",".join(cells) + "\n")


def read_invariants(path) -> InvariantSeries:
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    if data.size == 0:
        return InvariantSeries(np.zeros(0), np.zeros((0, 4)))
    return InvariantSeries(data[:, 0], data[:, 1:5])


def write_trajectory(out_dir, trajectory: Trajectory,
                     config: ExperimentConfig) -> Path:
    """Persist snapshots, invariants, config, and run status to a directory."""
    out = Path(out_dir)
    snaps = out / SNAPSHOT_DIRNAME
    snaps.mkdir(parents=True, exist_ok=True)
    (out / CONFIG_FILENAME).write_text(config.to_text())
    status_lines = [
        f"status = {trajectory.status.value}",
        f"end_time = {trajectory.end_time!r}",
        f"snapshots = {len(trajectory.states)}",
    ]
    if trajectory.failure_detail:
        status_lines.append(f"detail = {trajectory.failure_detail}")
    (out / STATUS_FILENAME).write_text("\n".join(status_lines) + "\n")
    write_invariants(out / INVARIANTS_FILENAME, trajectory.invariants)
    for i, state in enumerate(trajectory.states):
        write_snapshot(snaps / _snapshot_name(i), state, config)
    return out


def read_trajectory(directory):
    """Load (config, status dict, states) back from a trajectory directory."""
    directory = Path(directory)
    config_path = directory / CONFIG_FILENAME
    if not config_path.exists():
        raise ConfigurationError(f"{directory}: no {CONFIG_FILENAME} found")
    config = parse_config(config_path.read_text())
    status = {}
    status_path = directory / STATUS_FILENAME
    if status_path.exists():
        for line in status_path.read_text().splitlines():
            if "=" in line:
                key, value = line.split("=", 1)
                status[key.strip()] = value.strip()
    snaps_dir = directory / SNAPSHOT_DIRNAME
    states = []
    if snaps_dir.is_dir():
        for name in sorted(os.listdir(snaps_dir)):
            if not name.startswith("snapshot_"):
                continue
            meta, _, values = read_snapshot(snaps_dir / name)
            states.append(FieldState(float(meta["t"]), values))
    return config, status, states


def write_radiation_series(path, report: RadiationReport) -> None:
    with open(path, "w") as fh:
        fh.write("t,side,amplitude,front_position,mean_amplitude\n")
        for side_report in (report.forward, report.backward):
            for i, t in enumerate(side_report.times):
                cells = [
                    format_value(t),
                    side_report.side.value,
                    format_value(side_report.amplitudes[i]),
                    format_value(side_report.front_positions[i]),
                    format_value(side_report.mean_amplitudes[i]),
                ]
                fh.write(",".join(cells) + "\n")


def write_radiation_summary(path, report: RadiationReport,
                            status: RunStatus = RunStatus.COMPLETED) -> None:
    with open(path, "w") as fh:
        fh.write("side,status,threshold,final_amplitude,front_velocity,"
                 "front_r2,decay_exponent,decay_r2\n")
        for side_report in (report.forward, report.backward):
            if status is not RunStatus.COMPLETED:
                marker = BLOWUP if status is RunStatus.BLOWUP else "failed"
            elif not side_report.detected:
                marker = NOT_DETECTED
            else:
                marker = "ok"
            front = side_report.front_fit
            decay = side_report.decay_fit
            cells = [
                side_report.side.value,
                marker,
                format_value(side_report.threshold),
                format_value(side_report.final_amplitude),
                format_value(front.slope if front else None),
                format_value(front.r_squared if front else None),
                format_value(-decay.slope if decay else None),
                format_value(decay.r_squared if decay else None),
            ]
            fh.write(",".join(cells) + "\n")


def write_dispersion_curves(path, curves, predictions) -> None:
    """Curves: list of DispersionCurve; predictions: {scheme: (fwd, bwd)}."""
    with open(path, "w") as fh:
        fh.write("scheme,normalized_wavenumber,group_velocity\n")
        for curve in curves:
            for alpha, velocity in zip(curve.normalized_wavenumbers,
                                       curve.velocities):
                fh.write(f"{curve.scheme.value},{format_value(alpha)},"
                         f"{format_value(velocity)}\n")


def write_dispersion_predictions(path, predictions) -> None:
    with open(path, "w") as fh:
        fh.write("scheme,forward_front_velocity,backward_front_velocity\n")
        for scheme, (fwd, bwd) in predictions.items():
            fh.write(f"{scheme.value},{format_value(fwd)},{format_value(bwd)}\n")
