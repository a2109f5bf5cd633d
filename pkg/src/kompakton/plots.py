"""Figure rendering for the report paths (PNG files next to the CSVs)."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .radiation import RadiationReport, Side, side_maximum

_DPI = 150


def _save(fig, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, dpi=_DPI, bbox_inches="tight")
    plt.close(fig)
    return path


def save_snapshot_zoom(path, trajectory) -> Path:
    """Final snapshot zoomed to the radiation scale on both sides."""
    state = trajectory.states[-1]
    spec, grid = trajectory.spec, trajectory.grid
    x = grid.positions()
    fig, axes = plt.subplots(1, 2, figsize=(9.0, 3.2))
    for ax, side in zip(axes, (Side.BACKWARD, Side.FORWARD)):
        peak = side_maximum(state, side, spec, grid)
        ax.plot(x, state.values, lw=0.6)
        if peak > 0:
            ax.set_ylim(-1.5 * peak, 1.5 * peak)
        ax.set_xlabel("x")
        ax.set_title(f"{side.value} radiation, t={state.t:g}")
    axes[0].set_ylabel("u")
    fig.suptitle(f"{trajectory.scheme.value}, dx={grid.dx:g}, dt={trajectory.dt:g}")
    return _save(fig, path)


def save_radiation_report(path, report: RadiationReport) -> Path:
    """Amplitude decay (log-log) and front trajectories for both packets."""
    fig, (ax_amp, ax_front) = plt.subplots(1, 2, figsize=(9.0, 3.4))
    for side_report, style in ((report.forward, "-"), (report.backward, "--")):
        mask = np.isfinite(side_report.mean_amplitudes) & (side_report.times > 0)
        if mask.any():
            ax_amp.loglog(side_report.times[mask],
                          side_report.mean_amplitudes[mask], style,
                          label=side_report.side.value)
        fmask = np.isfinite(side_report.front_positions)
        if fmask.any():
            ax_front.plot(side_report.times[fmask],
                          side_report.front_positions[fmask], style,
                          label=side_report.side.value)
    ax_amp.set_xlabel("t")
    ax_amp.set_ylabel("mean envelope amplitude")
    ax_amp.legend()
    ax_front.set_xlabel("t")
    ax_front.set_ylabel("front position")
    ax_front.legend()
    return _save(fig, path)


def save_dispersion_curves(path, curves) -> Path:
    fig, ax = plt.subplots(figsize=(5.2, 3.6))
    styles = ("-", "--", "-.", ":")
    for curve, style in zip(curves, styles * 2):
        ax.plot(curve.normalized_wavenumbers, curve.velocities, style,
                label=curve.scheme.value)
    ax.set_xlabel("normalized wavenumber")
    ax.set_ylabel("group velocity")
    ax.legend()
    return _save(fig, path)


def save_campaign_figure(path, result) -> Path:
    """One panel per campaign: measured quantity against the swept parameter."""
    fig, ax = plt.subplots(figsize=(5.6, 3.8))
    amplitude_table = result.table_id in ("amplitudes_dx", "amplitudes_dt")
    for scheme in result.schemes:
        rows = result.cells_for(scheme)
        for side, marker in (("forward", "o"), ("backward", "s")):
            if amplitude_table:
                attribute = f"{side}_amplitude"
            elif result.table_id == "front_velocities":
                attribute = f"{side}_velocity"
            else:
                attribute = f"{side}_exponent"
            xs, ys = [], []
            for cell, value in zip(rows, result.values):
                quantity = getattr(cell, attribute)
                if not cell.ok or quantity is None:
                    continue
                if result.swept == "grid_drift":
                    xs.append(cell.c0)
                else:
                    xs.append(value)
                ys.append(quantity)
            if not xs:
                continue
            label = f"{scheme.value} {side}"
            if amplitude_table:
                ax.loglog(xs, np.abs(ys), marker=marker, ls="-", label=label)
            else:
                ax.plot(xs, ys, marker=marker, ls="-", label=label)
    xlabel = {"dx": "dx", "dt": "dt", "speed": "c0 = c",
              "grid_drift": "c0"}[result.swept]
    ax.set_xlabel(xlabel)
    ax.set_ylabel(result.table_id)
    ax.legend(fontsize=7)
    return _save(fig, path)
