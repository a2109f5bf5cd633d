"""Command-line entry point: simulate | analyze | dispersion | table.

Exit codes: 0 success, 2 parse/configuration error, 3 blow-up, 4 solver
failure, 5 I/O error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .campaign import TABLE_IDS, run_table, write_campaign_csvs
from .config import parse_config
from .dispersion import dispersion_curve, predicted_front_velocities
from .errors import (ConfigurationError, InsufficientDataError, KompaktonError,
                     LinearSolveError, ParameterError)
from .radiation import analyze_trajectory
from .reporting import (read_trajectory, write_dispersion_curves,
                        write_dispersion_predictions, write_radiation_series,
                        write_radiation_summary, write_trajectory)
from .schemes import Scheme
from .stepper import RunStatus, Trajectory, run
from .invariants import InvariantSeries

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_BLOWUP = 3
EXIT_SOLVER = 4
EXIT_IO = 5

_STATUS_EXIT = {
    RunStatus.COMPLETED: EXIT_OK,
    RunStatus.BLOWUP: EXIT_BLOWUP,
    RunStatus.SOLVER_FAILURE: EXIT_SOLVER,
}


def _say(args, message):
    if not args.quiet:
        print(message)


def _load_config(path):
    return parse_config(Path(path).read_text())


def cmd_simulate(args) -> int:
    config = _load_config(args.config)
    out = Path(args.out or config.out_dir or "kompakton_out")
    trajectory = run(config.scheme, config.stepper(), config.compacton(),
                     config.grid(), config.timespec())
    write_trajectory(out, trajectory, config)
    _say(args, f"status: {trajectory.status.value} (t reached {trajectory.end_time:g})")
    _say(args, f"wrote {len(trajectory.states)} snapshots to {out}")
    return _STATUS_EXIT[trajectory.status]


def cmd_analyze(args) -> int:
    config, status, states = read_trajectory(args.directory)
    if len(states) < 3:
        raise ConfigurationError(
            f"{args.directory}: need at least 3 snapshots, found {len(states)}")
    run_status = RunStatus(status.get("status", "completed"))
    trajectory = Trajectory(
        scheme=config.scheme, spec=config.compacton(), grid=config.grid(),
        dt=config.dt, states=states, reports=[],
        invariants=InvariantSeries([], []), status=run_status,
        end_time=states[-1].t)
    report = analyze_trajectory(trajectory, config.analysis())
    out = Path(args.out or args.directory)
    out.mkdir(parents=True, exist_ok=True)
    write_radiation_series(out / "radiation_series.csv", report)
    write_radiation_summary(out / "radiation_summary.csv", report, run_status)
    if args.figures:
        from .plots import save_radiation_report, save_snapshot_zoom
        save_radiation_report(out / "radiation_report.png", report)
        save_snapshot_zoom(out / "final_snapshot.png", trajectory)
    for side_report in (report.forward, report.backward):
        tag = "detected" if side_report.detected else "not detected"
        _say(args, f"{side_report.side.value}: {tag}, "
                   f"velocity={side_report.front_velocity:.4g}, "
                   f"decay exponent={side_report.decay_exponent:.4g}")
    return EXIT_OK


def cmd_dispersion(args) -> int:
    if args.scheme == "all":
        schemes = list(Scheme)
    else:
        schemes = [Scheme.from_name(args.scheme)]
    curves = [dispersion_curve(s, args.dx, args.c0, args.samples)
              for s in schemes]
    predictions = {s: predicted_front_velocities(s, args.c0, args.dx,
                                                 args.backward_probe)
                   for s in schemes}
    out = Path(args.out or "kompakton_out")
    out.mkdir(parents=True, exist_ok=True)
    write_dispersion_curves(out / "dispersion_curves.csv", curves, predictions)
    write_dispersion_predictions(out / "dispersion_predictions.csv", predictions)
    if args.figures:
        from .plots import save_dispersion_curves
        save_dispersion_curves(out / "dispersion_curves.png", curves)
    for scheme, (fwd, bwd) in predictions.items():
        _say(args, f"{scheme.value}: forward front {fwd:.6g}, "
                   f"backward front {bwd:.6g}")
    return EXIT_OK


def _parse_floats(text):
    return tuple(float(tok) for tok in text.split(",") if tok.strip())


def _parse_pairs(text):
    pairs = []
    for token in text.split(","):
        token = token.strip()
        if not token:
            continue
        dx, _, dt = token.partition(":")
        pairs.append((float(dx), float(dt)))
    return tuple(pairs)


def cmd_table(args) -> int:
    base = _load_config(args.config)
    schemes = None
    if args.schemes:
        if args.schemes == "all":
            schemes = list(Scheme)
        else:
            schemes = [Scheme.from_name(tok) for tok in args.schemes.split(",")]
    values = _parse_floats(args.values) if args.values else None
    pairs = _parse_pairs(args.pairs) if args.pairs else None
    factors = _parse_floats(args.drift_factors) if args.drift_factors else None
    result = run_table(args.table, base, schemes=schemes, values=values,
                       pairs=pairs, drift_factors=factors, threads=args.threads)
    out = Path(args.out or base.out_dir or "kompakton_out")
    wide, long_ = write_campaign_csvs(out, result)
    if args.figures:
        from .plots import save_campaign_figure
        save_campaign_figure(out / f"table_{result.table_id}.png", result)
    _say(args, f"wrote {wide} and {long_}")
    blown = sum(1 for cell in result.cells if not cell.ok)
    if blown:
        _say(args, f"{blown}/{len(result.cells)} sweep points blew up")
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kompakton",
        description="Compacton propagation runs and radiation diagnostics.")
    parser.add_argument("--quiet", action="store_true",
                        help="suppress progress output")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run one configuration to t_end")
    sim.add_argument("--config", required=True)
    sim.add_argument("--out", default=None)
    sim.set_defaults(func=cmd_simulate)

    ana = sub.add_parser("analyze", help="measure radiation of a stored run")
    ana.add_argument("directory")
    ana.add_argument("--out", default=None)
    ana.add_argument("--no-figures", dest="figures", action="store_false")
    ana.set_defaults(func=cmd_analyze, figures=True)

    dis = sub.add_parser("dispersion", help="group-velocity curves and predictions")
    dis.add_argument("--scheme", default="all")
    dis.add_argument("--dx", type=float, required=True)
    dis.add_argument("--c0", type=float, default=1.0)
    dis.add_argument("--samples", type=int, default=200)
    dis.add_argument("--backward-probe", type=float, default=0.1)
    dis.add_argument("--out", default=None)
    dis.add_argument("--no-figures", dest="figures", action="store_false")
    dis.set_defaults(func=cmd_dispersion, figures=True)

    tab = sub.add_parser("table", help="run a table campaign from a base config")
    tab.add_argument("--table", required=True, choices=TABLE_IDS)
    tab.add_argument("--config", required=True)
    tab.add_argument("--out", default=None)
    tab.add_argument("--schemes", default=None,
                     help="comma list or 'all' (default: the config's scheme)")
    tab.add_argument("--values", default=None,
                     help="override the swept dx/dt/speed values (comma list)")
    tab.add_argument("--pairs", default=None,
                     help="grid pairs for front_velocities, e.g. 0.1:0.05,0.5:0.05")
    tab.add_argument("--drift-factors", default=None,
                     help="drift multiples of c for front_velocities")
    tab.add_argument("--threads", type=int, default=None)
    tab.add_argument("--no-figures", dest="figures", action="store_false")
    tab.set_defaults(func=cmd_table, figures=True)
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigurationError, ParameterError, InsufficientDataError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except LinearSolveError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    except KompaktonError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
