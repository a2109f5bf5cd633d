"""Parameter sweeps reproducing the published table layouts.

Each sweep point is an independent run followed by the radiation analysis;
blow-ups are recorded as explicit markers and never abort the campaign.
Sweep points may execute concurrently (KOMPAKTON_THREADS or the ``threads``
argument), but results are collected and written in a fixed order so
repeated campaigns are byte-identical.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional

import numpy as np

from .config import ExperimentConfig
from .errors import InsufficientDataError, ParameterError
from .radiation import RegressionFit, analyze_trajectory, convergence_exponent
from .reporting import BLOWUP, NOT_DETECTED, format_value
from .schemes import Scheme
from .stepper import RunStatus, run

TABLE_IDS = ("amplitudes_dx", "amplitudes_dt", "front_velocities",
             "scaling_dx", "scaling_c")

DX_SWEEP = (0.2, 0.1, 0.05, 0.025, 0.0125)
DT_SWEEP = (0.1, 0.05, 0.025, 0.0125, 0.00625)
GRID_PAIRS = ((0.1, 0.025), (0.1, 0.05), (0.5, 0.05))
DRIFT_FACTORS = (0.5, 1.0, 2.0)
SPEED_SWEEP = (0.1, 0.2, 0.5, 1.0, 1.5, 2.0, 5.0)


@dataclass
class CellResult:
    """Measured quantities of one sweep point; None means not detected."""

    scheme: Scheme
    dx: float
    dt: float
    c: float
    c0: float
    status: str = "ok"
    forward_amplitude: Optional[float] = None
    backward_amplitude: Optional[float] = None
    forward_velocity: Optional[float] = None
    forward_velocity_r2: Optional[float] = None
    backward_velocity: Optional[float] = None
    backward_velocity_r2: Optional[float] = None
    forward_exponent: Optional[float] = None
    forward_exponent_r2: Optional[float] = None
    backward_exponent: Optional[float] = None
    backward_exponent_r2: Optional[float] = None

    @property
    def ok(self) -> bool:
        return self.status == "ok"


@dataclass
class CampaignResult:
    table_id: str
    swept: str  # "dx" | "dt" | "grid_drift" | "speed"
    schemes: list
    values: tuple
    cells: list
    amplitude_fits: dict  # (scheme.value, side) -> RegressionFit, amplitude tables only

    def cells_for(self, scheme: Scheme):
        return [cell for cell in self.cells if cell.scheme is scheme]


def _worker_count(threads: Optional[int]) -> int:
    if threads is not None:
        return max(1, int(threads))
    env = os.environ.get("KOMPAKTON_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return 1


def _optional(value) -> Optional[float]:
    if value is None:
        return None
    value = float(value)
    return value if math.isfinite(value) else None


def _evaluate_cell(cfg: ExperimentConfig) -> CellResult:
    cell = CellResult(scheme=cfg.scheme, dx=cfg.dx, dt=cfg.dt, c=cfg.c, c0=cfg.c0)
    trajectory = run(cfg.scheme, cfg.stepper(), cfg.compacton(), cfg.grid(),
                     cfg.timespec())
    if trajectory.status is not RunStatus.COMPLETED:
        cell.status = trajectory.status.value
        return cell
    report = analyze_trajectory(trajectory, cfg.analysis())
    t_final = trajectory.end_time
    cell.forward_amplitude = _optional(report.forward.amplitude_at(t_final))
    cell.backward_amplitude = _optional(report.backward.amplitude_at(t_final))
    for prefix, side_report in (("forward", report.forward),
                                ("backward", report.backward)):
        if side_report.front_fit is not None:
            setattr(cell, f"{prefix}_velocity", side_report.front_fit.slope)
            setattr(cell, f"{prefix}_velocity_r2", side_report.front_fit.r_squared)
        if side_report.decay_fit is not None:
            setattr(cell, f"{prefix}_exponent", -side_report.decay_fit.slope)
            setattr(cell, f"{prefix}_exponent_r2", side_report.decay_fit.r_squared)
    return cell


def _sweep_configs(table_id, base, schemes, values, pairs, drift_factors):
    configs = []
    if table_id == "amplitudes_dx" or table_id == "scaling_dx":
        for scheme in schemes:
            for dx in values:
                configs.append(base.with_scheme(scheme).with_spacing(dx))
    elif table_id == "amplitudes_dt":
        for scheme in schemes:
            for dt in values:
                configs.append(base.with_scheme(scheme).with_timestep(dt))
    elif table_id == "front_velocities":
        for scheme in schemes:
            for dx, dt in pairs:
                for factor in drift_factors:
                    configs.append(base.with_scheme(scheme).with_spacing(dx)
                                   .with_timestep(dt).with_drift(factor * base.c))
    elif table_id == "scaling_c":
        for scheme in schemes:
            for speed in values:
                configs.append(replace(base.with_scheme(scheme), c=speed,
                                       c0=speed))
    else:
        raise ParameterError(
            f"unknown table id {table_id!r}; expected one of {', '.join(TABLE_IDS)}")
    return configs


def run_table(table_id: str, base: ExperimentConfig, schemes=None, values=None,
              pairs=None, drift_factors=None,
              threads: Optional[int] = None) -> CampaignResult:
    """Run one table's sweep from a base configuration.

    ``values`` overrides the swept dx/dt/speed set; ``pairs`` the (dx, dt)
    grid pairs and ``drift_factors`` the drift multiples for the
    front-velocity table.
    """
    if table_id not in TABLE_IDS:
        raise ParameterError(
            f"unknown table id {table_id!r}; expected one of {', '.join(TABLE_IDS)}")
    schemes = list(schemes) if schemes else [base.scheme]
    if table_id == "amplitudes_dx" or table_id == "scaling_dx":
        values = tuple(values) if values else DX_SWEEP
        swept = "dx"
    elif table_id == "amplitudes_dt":
        values = tuple(values) if values else DT_SWEEP
        swept = "dt"
    elif table_id == "scaling_c":
        values = tuple(values) if values else SPEED_SWEEP
        swept = "speed"
    else:
        pairs = tuple(pairs) if pairs else GRID_PAIRS
        drift_factors = tuple(drift_factors) if drift_factors else DRIFT_FACTORS
        values = tuple((dx, dt, f) for dx, dt in pairs for f in drift_factors)
        swept = "grid_drift"

    configs = _sweep_configs(table_id, base, schemes, values, pairs, drift_factors)
    workers = _worker_count(threads)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            cells = list(pool.map(_evaluate_cell, configs))
    else:
        cells = [_evaluate_cell(cfg) for cfg in configs]

    fits = {}
    if table_id in ("amplitudes_dx", "amplitudes_dt"):
        for scheme in schemes:
            rows = [c for c in cells if c.scheme is scheme]
            steps = [c.dx if swept == "dx" else c.dt for c in rows]
            for side in ("forward", "backward"):
                amps = [getattr(c, f"{side}_amplitude") for c in rows]
                amps = [a if (a is not None and c.ok) else float("nan")
                        for a, c in zip(amps, rows)]
                try:
                    fits[(scheme.value, side)] = convergence_exponent(amps, steps)
                except InsufficientDataError:
                    pass

    return CampaignResult(table_id=table_id, swept=swept, schemes=schemes,
                          values=values, cells=cells, amplitude_fits=fits)


def _cell_text(cell: CellResult, attribute: str) -> str:
    if not cell.ok:
        return BLOWUP
    value = getattr(cell, attribute)
    return NOT_DETECTED if value is None else format_value(value)


_WIDE_QUANTITIES = {
    "amplitudes_dx": ("forward_amplitude", "backward_amplitude"),
    "amplitudes_dt": ("forward_amplitude", "backward_amplitude"),
    "front_velocities": ("forward_velocity", "backward_velocity"),
    "scaling_dx": ("forward_exponent", "backward_exponent"),
    "scaling_c": ("forward_exponent", "backward_exponent"),
}

_LONG_COLUMNS = ("forward_amplitude", "backward_amplitude",
                 "forward_velocity", "forward_velocity_r2",
                 "backward_velocity", "backward_velocity_r2",
                 "forward_exponent", "forward_exponent_r2",
                 "backward_exponent", "backward_exponent_r2")


def _column_label(result: CampaignResult, value) -> str:
    if result.swept == "grid_drift":
        dx, dt, factor = value
        return f"dx{dx:g}_dt{dt:g}_c0x{factor:g}"
    prefix = {"dx": "dx", "dt": "dt", "speed": "c0"}[result.swept]
    return f"{prefix}={value:g}"


def write_campaign_csvs(out_dir, result: CampaignResult):
    """Write the paper-shaped wide CSV and its tidy long-format twin."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    wide_path = out / f"table_{result.table_id}.csv"
    long_path = out / f"table_{result.table_id}_long.csv"

    quantities = _WIDE_QUANTITIES[result.table_id]
    has_fit = result.table_id in ("amplitudes_dx", "amplitudes_dt")
    with open(wide_path, "w") as fh:
        header = ["scheme", "quantity"]
        header += [_column_label(result, v) for v in result.values]
        if has_fit:
            header.append("q")
        fh.write(",".join(header) + "\n")
        for scheme in result.schemes:
            rows = result.cells_for(scheme)
            for quantity in quantities:
                cells = [scheme.value, quantity]
                cells += [_cell_text(c, quantity) for c in rows]
                if has_fit:
                    side = quantity.split("_")[0]
                    fit = result.amplitude_fits.get((scheme.value, side))
                    cells.append(format_value(fit.slope) if fit else NOT_DETECTED)
                fh.write(",".join(cells) + "\n")

    with open(long_path, "w") as fh:
        fh.write("scheme,dx,dt,c,c0,status," + ",".join(_LONG_COLUMNS) + "\n")
        for cell in result.cells:
            row = [cell.scheme.value, format_value(cell.dx), format_value(cell.dt),
                   format_value(cell.c), format_value(cell.c0), cell.status]
            row += [_cell_text(cell, column) for column in _LONG_COLUMNS]
            fh.write(",".join(row) + "\n")
    return wide_path, long_path
