"""Command-line entry points.

Every report-producing command writes delimited data as its primary output
and renders a matching figure alongside it (same stem, .png) unless told
not to.  One config file feeds every command; geometry can be overridden
per command where that makes sense.
"""

from __future__ import annotations

import argparse
import dataclasses
import os
import sys
import time

import numpy as np

from .bridge import ConsoleBridge, ConsoleSource
from .config import (
    build_controller,
    default_config,
    load_config,
    load_geometry,
    save_config,
)
from .errors import TraceFormatError
from .fsm import ReplaySource
from .markers import synth_frame
from .pipeline import RawAxes
from .telemetry import read_trace, write_trace
from .validation import (
    Source,
    read_mocap,
    read_references,
    sweep,
    validate,
    validate_mocap,
    write_mocap,
    write_references,
    write_report,
    write_sweep,
)

__all__ = ["main", "demo_session_raws"]


def _figure_path(out: str) -> str:
    return os.path.splitext(out)[0] + ".png"


def demo_session_raws(seconds: float = 30.0, rate_hz: float = 100.0,
                      device_range: float = 350.0) -> list[RawAxes]:
    """Canonical scripted operator session: enable, one full open-close
    cycle of the jaws, then a bend from straight to the 90 degree stop,
    then hold.  Used by `record` and by the determinism checks."""
    n = round(seconds * rate_hz)
    full = device_range
    raws: list[RawAxes] = []
    for i in range(n):
        t = i / rate_hz
        buttons = 1 if 0.10 <= t < 0.15 else 0
        tz = ry = 0.0
        if 0.2 <= t < 3.2:
            tz = full          # open the jaws
        elif 3.4 <= t < 6.6:
            tz = -full         # close them again
        elif 6.8 <= t < 10.8:
            ry = full          # bend to the hard limit
        raws.append(RawAxes(tz=tz, ry=ry, buttons=buttons))
    return raws


# ---- subcommands --------------------------------------------------------

def _cmd_sweep(args, cfg: SystemConfig) -> int:
    geom = load_geometry(args.geom) if args.geom else cfg.gripper
    rows = sweep(geom, n=args.points)
    write_sweep(args.out, rows)
    print(f"wrote {len(rows)} rows to {args.out}")
    if not args.no_figure:
        from .plots import render_sweep
        render_sweep(rows, _figure_path(args.out))
        print(f"wrote {_figure_path(args.out)}")
    return 0


def _cmd_validate(args, cfg: SystemConfig) -> int:
    geom = load_geometry(args.geom) if args.geom else cfg.gripper
    if args.cad:
        report = validate(read_references(args.cad), geom, Source.CAD)
    else:
        report = validate_mocap(read_mocap(args.mocap), geom)
    write_report(args.report, report)
    curve_path = os.path.splitext(args.report)[0] + "_curve.csv"
    write_sweep(curve_path, sweep(geom, n=len(report.curve)))
    print(f"{report.source.value}: {len(report.errors)} points, "
          f"{len(report.excluded)} excluded, "
          f"MAE {report.mae:.4f} deg, max {report.max_err:.4f} deg")
    print(f"wrote {args.report} and {curve_path}")
    if not args.no_figure:
        from .plots import render_validation
        render_validation(report, _figure_path(args.report))
        print(f"wrote {_figure_path(args.report)}")
    return 0


def _cmd_record(args, cfg: SystemConfig) -> int:
    raws = demo_session_raws(seconds=args.seconds,
                             rate_hz=cfg.control.loop_rate_hz,
                             device_range=cfg.pipeline.device_range)
    source = ReplaySource(raws)
    records = []
    controller = build_controller(cfg, source=source, telemetry=records.append)
    controller.initialize()
    controller.run(len(raws))
    write_trace(args.out, records)
    final = records[-1]
    print(f"recorded {len(records)} ticks to {args.out}; "
          f"final mode {final.mode}, q3 {final.estimated.q3:.3f} mm, "
          f"q1 {final.estimated.q1:.2f} deg")
    if not args.no_figure:
        from .plots import render_trace
        render_trace(records, _figure_path(args.out), controller.control.dt)
        print(f"wrote {_figure_path(args.out)}")
    return 0


def _replay_records(cfg: SystemConfig, records):
    source = ReplaySource([r.raw for r in records])
    rerun = []
    controller = build_controller(cfg, source=source, telemetry=rerun.append)
    controller.initialize()
    controller.run(len(records))
    return controller, rerun


def _cmd_replay(args, cfg: SystemConfig) -> int:
    try:
        records = read_trace(args.trace, cfg.gripper)
    except TraceFormatError as exc:
        print(f"{args.trace}:{exc.line}: {exc}", file=sys.stderr)
        return 1
    if not records:
        print(f"{args.trace}: no records", file=sys.stderr)
        return 1
    controller, rerun = _replay_records(cfg, records)
    identical = [a.to_row() for a in rerun] == [b.to_row() for b in records]
    truth = controller.plant.true_state()
    est = rerun[-1].estimated
    print(f"replayed {len(rerun)} ticks; telemetry "
          f"{'bit-identical' if identical else 'DIVERGED'}")
    print(f"final q3: estimated {est.q3:.4f} mm, ground truth {truth.q3:.4f} mm")
    if args.out:
        write_trace(args.out, rerun)
        print(f"wrote {args.out}")
        if not args.no_figure:
            from .plots import render_trace
            render_trace(rerun, _figure_path(args.out), controller.control.dt)
            print(f"wrote {_figure_path(args.out)}")
    return 0 if identical else 1


def _cmd_teleop(args, cfg: SystemConfig) -> int:
    if args.rate:
        control = dataclasses.replace(cfg.control, loop_rate_hz=args.rate)
        cfg = dataclasses.replace(cfg, control=control)
    records = []
    if args.input.startswith("replay:"):
        trace_path = args.input.split(":", 1)[1]
        raws = [r.raw for r in read_trace(trace_path, cfg.gripper)]
        source = ReplaySource(raws)
        controller = build_controller(cfg, source=source, telemetry=records.append)
        controller.initialize()
        controller.run(len(raws))
        print(f"ran {len(records)} ticks from {trace_path}; "
              f"final mode {records[-1].mode}")
    elif args.input == "console":
        source = ConsoleSource()
        controller = build_controller(cfg, source=source, telemetry=records.append)
        bridge = ConsoleBridge(controller, source, host=args.host,
                               port=args.port,
                               allow_fault_inject=args.allow_fault_inject)
        controller.initialize()
        controller.telemetry = _tee(records.append, bridge.publish)
        bridge.start()
        dt = controller.control.dt
        print(f"console bridge on ws://{args.host}:{bridge.port} "
              f"(loop {cfg.control.loop_rate_hz:.0f} Hz); Ctrl-C stops")
        deadline = time.monotonic()
        try:
            while args.ticks is None or controller.tick_count < args.ticks:
                controller.tick()
                deadline += dt
                pause = deadline - time.monotonic()
                if pause > 0:
                    time.sleep(pause)
        except KeyboardInterrupt:
            pass
        finally:
            bridge.stop()
        print(f"stopped after {controller.tick_count} ticks, "
              f"mode {controller.mode.value}")
    else:
        print(f"unknown input {args.input!r}; use console or replay:FILE",
              file=sys.stderr)
        return 2
    if args.out and records:
        write_trace(args.out, records)
        print(f"wrote {args.out}")
    return 0


def _tee(*sinks):
    def emit(record):
        for sink in sinks:
            sink(record)
    return emit


def _cmd_synth(args, cfg: SystemConfig) -> int:
    geom = load_geometry(args.geom) if args.geom else cfg.gripper
    if args.what == "cad":
        from .validation import ReferenceConfig
        from .gripper import jaw_state, valid_displacement_range
        rng = np.random.default_rng(args.seed)
        lo, hi = valid_displacement_range(geom)
        refs = []
        for dl in np.linspace(lo + 0.05 * (hi - lo), hi - 0.05 * (hi - lo), args.n):
            angle = jaw_state(geom, float(dl)).total_angle
            if args.noise > 0.0:
                angle += float(rng.normal(0.0, args.noise))
            refs.append(ReferenceConfig(slider=float(dl), total_angle=angle))
        write_references(args.out, refs)
        print(f"wrote {len(refs)} reference configurations to {args.out}")
    else:
        rng = np.random.default_rng(args.seed) if args.sigma > 0.0 else None
        frames = [synth_frame(geom, 0.0, rng, args.sigma, timestamp=0.0)]
        for i, dl in enumerate(np.linspace(0.1, 5.8, args.n)):
            frames.append(synth_frame(geom, float(dl), rng, args.sigma,
                                      timestamp=(i + 1) * 0.1))
        write_mocap(args.out, frames)
        print(f"wrote baseline + {args.n} marker frames to {args.out}")
    return 0


def _cmd_config(args, cfg: SystemConfig) -> int:
    save_config(cfg, args.out)
    print(f"wrote {args.out}")
    return 0


# ---- parser -------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lapflex",
        description="Digital twin and teleoperation stack for a 4-DOF "
                    "flexible laparoscopic instrument.")
    parser.add_argument("--config", help="YAML parameter file (defaults built in)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sweep", help="tabulate the gripper linkage over its range")
    p.add_argument("--geom", help="geometry YAML (default: config geometry)")
    p.add_argument("--out", required=True, help="output CSV path")
    p.add_argument("--points", type=int, default=200)
    p.add_argument("--no-figure", action="store_true")
    p.set_defaults(fn=_cmd_sweep)

    p = sub.add_parser("validate", help="compare references against the model")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--cad", help="reference CSV (slider, total_angle)")
    group.add_argument("--mocap", help="marker-frame CSV")
    p.add_argument("--geom", help="geometry YAML (default: config geometry)")
    p.add_argument("--report", required=True, help="report CSV path")
    p.add_argument("--no-figure", action="store_true")
    p.set_defaults(fn=_cmd_validate)

    p = sub.add_parser("teleop", help="run the control loop")
    p.add_argument("--input", required=True,
                   help="'console' or 'replay:TRACE.csv'")
    p.add_argument("--rate", type=float, default=None, help="loop rate Hz")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8765)
    p.add_argument("--ticks", type=int, default=None,
                   help="stop after this many ticks (console input)")
    p.add_argument("--allow-fault-inject", action="store_true")
    p.add_argument("--out", help="write the telemetry trace here")
    p.set_defaults(fn=_cmd_teleop)

    p = sub.add_parser("replay", help="re-run a trace and verify determinism")
    p.add_argument("trace", help="trace CSV recorded earlier")
    p.add_argument("--out", help="write the re-run trace here")
    p.add_argument("--no-figure", action="store_true")
    p.set_defaults(fn=_cmd_replay)

    p = sub.add_parser("record", help="record the scripted demo session")
    p.add_argument("--out", required=True, help="trace CSV path")
    p.add_argument("--seconds", type=float, default=30.0)
    p.add_argument("--no-figure", action="store_true")
    p.set_defaults(fn=_cmd_record)

    p = sub.add_parser("synth", help="generate synthetic reference data")
    p.add_argument("what", choices=("cad", "mocap"))
    p.add_argument("--out", required=True)
    p.add_argument("--geom", help="geometry YAML (default: config geometry)")
    p.add_argument("--n", type=int, default=9)
    p.add_argument("--noise", type=float, default=0.0,
                   help="cad: angle noise sigma in deg")
    p.add_argument("--sigma", type=float, default=0.0,
                   help="mocap: marker noise sigma in mm")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=_cmd_synth)

    p = sub.add_parser("config", help="write the effective config to a file")
    p.add_argument("--out", required=True)
    p.set_defaults(fn=_cmd_config)

    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    cfg = load_config(args.config) if args.config else default_config()
    return args.fn(args, cfg)


if __name__ == "__main__":
    sys.exit(main())
