"""Command-line front end.

    bsn-sim run echo --scenario apartment --channel 12 --power -10 --seed 1 --runs 10 --out out/
    bsn-sim run scan --scenario apartment --out out/
    bsn-sim run star --scenario apartment --nodes 3 --duration 30 --out out/
    bsn-sim run classify --activity fall --duration 10 --seed 3 --out out/
    bsn-sim run energy --profile ten_percent_radio --out out/
    bsn-sim calibrate --targets tables.csv --out out/
    bsn-sim replay-log out/frames.log

Every experiment writes a result JSON embedding the full configuration and
seed, so re-running it reproduces the output bit for bit. File writes are
atomic (write-temp-then-rename).
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
import tempfile
from pathlib import Path
from typing import Sequence

from . import calibrate as calibrate_mod
from .classify import ClassifierConfig, detect_abnormal, events_to_csv
from .energy import (
    CONTINUOUS_PROFILE,
    TEN_PERCENT_RADIO_PROFILE,
    PACK_BATTERY,
    battery_life_hours,
    paper_components,
)
from .errors import ParameterError, ScenarioError
from .linksim import EchoTestConfig, RunStats, read_frame_log, run_echo_test, run_star_network
from .motion import ActivityKind, compose_schedule, generate_trace
from .rf import ChannelSpec, InterferenceCalibration
from .scenario import apply_overrides, load_scenario
from .selector import scan as scan_channels
from .selector import select_channel

ENERGY_PROFILES = {
    "continuous": CONTINUOUS_PROFILE,
    "ten_percent_radio": TEN_PERCENT_RADIO_PROFILE,
}


def atomic_write(path: Path, data: str | bytes) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    mode = "wb" if isinstance(data, bytes) else "w"
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, mode) as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def export_table(rows: Sequence[tuple[float, int, RunStats]]) -> str:
    """Success-ratio table: one row per (power, channel), two decimals."""
    lines = ["power_dbm,channel,mean_pct,std_pct"]
    for power, channel, stats in rows:
        lines.append(f"{power:g},{channel},{stats.mean_ratio * 100:.2f},{stats.std_ratio * 100:.2f}")
    return "\n".join(lines) + "\n"


def gnuplot_dat(header: Sequence[str], rows: Sequence[Sequence[float]]) -> str:
    """Whitespace-separated data block with a commented header row."""
    lines = ["# " + " ".join(header)]
    for row in rows:
        lines.append(" ".join(f"{v:g}" for v in row))
    return "\n".join(lines) + "\n"


def _maybe_png(args, path: Path, title: str, xlabel: str, ylabel: str, xs, ys) -> None:
    if not getattr(args, "png", False):
        return
    try:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        print("matplotlib not installed; skipping PNG output", file=sys.stderr)
        return
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.bar(xs, ys, width=0.8)
    ax.set_title(title)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    fig.tight_layout()
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, dpi=120)
    plt.close(fig)


def _result_json(kind: str, scenario_name: str, seed: int, config: dict, payload: dict) -> str:
    return json.dumps(
        {"experiment": kind, "scenario": scenario_name, "seed": seed, "config": config, "result": payload},
        indent=2,
        default=str,
    )


def _load_calibration(args):
    if getattr(args, "calibration", None):
        calib, overrides = calibrate_mod.load_calibration_file(args.calibration)
        return calib, overrides
    return InterferenceCalibration(), {}


def _scenario_for(args):
    calib, overrides = _load_calibration(args)
    scenario = load_scenario(args.scenario)
    if overrides:
        scenario = apply_overrides(scenario, overrides)
    return scenario, calib


def _cmd_run_echo(args, out: Path) -> int:
    scenario, calib = _scenario_for(args)
    channel = args.channel if args.channel is not None else scenario.channel
    power = args.power if args.power is not None else scenario.tx_power_dbm
    cfg = EchoTestConfig(
        channel=ChannelSpec.wpan(channel),
        tx_power_dbm=power,
        n_messages=args.messages,
        runs=args.runs,
    )
    stats = run_echo_test(cfg, scenario, args.seed, calib)
    table = export_table([(power, channel, stats)])
    atomic_write(out / "echo_table.csv", table)
    ratios = [count / cfg.n_messages * 100 for count in stats.per_run_success]
    atomic_write(out / "echo_runs.dat",
                 gnuplot_dat(("run", "success_pct"), [(i + 1, r) for i, r in enumerate(ratios)]))
    _maybe_png(args, out / "echo_runs.png", f"{scenario.name} ch{channel} {power:+g} dBm",
               "run", "success %", range(1, len(ratios) + 1), ratios)
    atomic_write(
        out / "echo_result.json",
        _result_json(
            "echo",
            scenario.name,
            args.seed,
            {"channel": channel, "tx_power_dbm": power, "n_messages": cfg.n_messages, "runs": cfg.runs},
            {
                "per_run_success": list(stats.per_run_success),
                "mean_pct": stats.mean_ratio * 100,
                "std_pct": stats.std_ratio * 100,
            },
        ),
    )
    print(f"echo {scenario.name} ch{channel} {power:+g} dBm: "
          f"mean {stats.mean_ratio * 100:.2f}% std {stats.std_ratio * 100:.2f}%")
    return 0


def _cmd_run_scan(args, out: Path) -> int:
    scenario, calib = _scenario_for(args)
    report = scan_channels(scenario, calib)
    best = select_channel(report)
    atomic_write(out / "scan.csv", report.to_csv())
    channels = list(range(11, 27))
    atomic_write(out / "scan.dat",
                 gnuplot_dat(("channel", "score"), list(zip(channels, report.scores))))
    _maybe_png(args, out / "scan.png", f"{scenario.name} interference scan",
               "802.15.4 channel", "expected loss per message", channels, report.scores)
    atomic_write(
        out / "scan_result.json",
        _result_json("scan", scenario.name, args.seed, {"tx_power_dbm": scenario.tx_power_dbm},
                     {"scores": list(report.scores), "selected_channel": best}),
    )
    print(f"scan {scenario.name}: best channel {best}")
    return 0


def _cmd_run_star(args, out: Path) -> int:
    scenario, calib = _scenario_for(args)
    # synthesize one trace per sensor node around the logger
    traces = {}
    nodes = dict(scenario.nodes)
    for i in range(args.nodes):
        name = f"sensor_{i + 1}"
        nodes.setdefault(name, (1.0 + i, 1.0))
        schedule = [(ActivityKind.REST, args.duration / 2), (ActivityKind.FALL, 2.0),
                    (ActivityKind.REST, max(1.0, args.duration / 2 - 2.0))]
        traces[name] = compose_schedule(schedule, seed=args.seed + i)
    scenario = dataclasses.replace(scenario, nodes=nodes)
    result = run_star_network(scenario, traces, args.duration, args.seed, calib)
    atomic_write(out / "frames.log", result.log_bytes())
    lines = ["t,node,node_id,seq,timestamp_ms,code_x,code_y,code_z"]
    for t, node, frame in result.logged:
        lines.append(f"{t:.6g},{node},{frame.node_id},{frame.seq},{frame.timestamp_ms},"
                     f"{frame.codes[0]},{frame.codes[1]},{frame.codes[2]}")
    atomic_write(out / "frames.csv", "\n".join(lines) + "\n")
    delivery = ["node,emitted,delivered"]
    for name, d in sorted(result.deliveries.items()):
        delivery.append(f"{name},{d.emitted},{d.delivered}")
    atomic_write(out / "delivery.csv", "\n".join(delivery) + "\n")
    atomic_write(
        out / "star_result.json",
        _result_json("star", scenario.name, args.seed,
                     {"nodes": args.nodes, "duration_s": args.duration},
                     {name: {"emitted": d.emitted, "delivered": d.delivered}
                      for name, d in sorted(result.deliveries.items())}),
    )
    print(f"star {scenario.name}: {sum(d.delivered for d in result.deliveries.values())} frames logged")
    return 0


def _cmd_run_classify(args, out: Path) -> int:
    kind = ActivityKind(args.activity)
    trace = generate_trace(kind, args.duration, seed=args.seed)
    events = detect_abnormal(trace, ClassifierConfig())
    atomic_write(out / "events.csv", events_to_csv(events))
    atomic_write(
        out / "classify_result.json",
        _result_json("classify", "-", args.seed,
                     {"activity": kind.value, "duration_s": args.duration},
                     {"n_events": len(events)}),
    )
    print(f"classify {kind.value}: {len(events)} abnormal event(s)")
    return 0


def _cmd_run_energy(args, out: Path) -> int:
    duty = ENERGY_PROFILES[args.profile]
    components = paper_components()
    hours = battery_life_hours(PACK_BATTERY, components, duty)
    lines = ["profile,battery_mah,life_hours"]
    lines.append(f"{args.profile},{PACK_BATTERY.capacity_mah:g},{hours:.1f}")
    atomic_write(out / "energy.csv", "\n".join(lines) + "\n")
    atomic_write(
        out / "energy_result.json",
        _result_json("energy", "-", args.seed, {"profile": args.profile},
                     {"battery_mah": PACK_BATTERY.capacity_mah, "life_hours": hours}),
    )
    print(f"energy {args.profile}: {hours:.1f} h on {PACK_BATTERY.capacity_mah:g} mAh")
    return 0


def _cmd_calibrate(args, out: Path) -> int:
    targets = calibrate_mod.load_targets(args.targets)
    result = calibrate_mod.fit(targets, verbose=True)
    atomic_write(out / "calibration.json", result.to_json())
    report = ["scenario,channel,tx_power_dbm,role,target_pct,model_pct,residual_pp"]
    for t in result.targets:
        key = (t.scenario, t.channel, t.tx_power_dbm)
        report.append(f"{t.scenario},{t.channel},{t.tx_power_dbm:g},{t.role},"
                      f"{t.target_mean_pct:.2f},{result.achieved_pct[key]:.2f},{result.residual_pp(t):+.3f}")
    atomic_write(out / "fit_report.csv", "\n".join(report) + "\n")
    print(f"calibration written to {out / 'calibration.json'}")
    return 0


def _cmd_replay_log(args, out: Path | None) -> int:
    data = Path(args.logfile).read_bytes()
    frames = read_frame_log(data)
    lines = ["node_id,seq,timestamp_ms,code_x,code_y,code_z,range_x,range_y,range_z"]
    for f in frames:
        lines.append(f"{f.node_id},{f.seq},{f.timestamp_ms},{f.codes[0]},{f.codes[1]},{f.codes[2]},"
                     f"{f.range_codes[0]},{f.range_codes[1]},{f.range_codes[2]}")
    text = "\n".join(lines) + "\n"
    if args.out:
        atomic_write(Path(args.out) / "replay.csv", text)
    else:
        sys.stdout.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bsn-sim", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one experiment")
    run.add_argument("kind", choices=["echo", "star", "classify", "energy", "scan"])
    run.add_argument("--scenario", default="apartment", help="preset name or scenario file path")
    run.add_argument("--channel", type=int, default=None, help="802.15.4 channel 11..26")
    run.add_argument("--power", type=float, default=None, help="transmit power in dBm")
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--runs", type=int, default=10)
    run.add_argument("--messages", type=int, default=1000)
    run.add_argument("--nodes", type=int, default=3, help="sensor node count for star runs")
    run.add_argument("--duration", type=float, default=30.0, help="trace duration in seconds")
    run.add_argument("--activity", default="fall", choices=[k.value for k in ActivityKind])
    run.add_argument("--profile", default="continuous", choices=sorted(ENERGY_PROFILES))
    run.add_argument("--calibration", default=None, help="calibration JSON from `calibrate`")
    run.add_argument("--png", action="store_true", help="also render PNG plots (needs matplotlib)")
    run.add_argument("--out", default="out")

    cal = sub.add_parser("calibrate", help="fit interference constants to the test tables")
    cal.add_argument("--targets", default=None, help="targets CSV (defaults to the built-in tables)")
    cal.add_argument("--out", default="out")

    replay = sub.add_parser("replay-log", help="decode a binary frame log to CSV")
    replay.add_argument("logfile")
    replay.add_argument("--out", default=None)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            out = Path(args.out)
            handler = {
                "echo": _cmd_run_echo,
                "scan": _cmd_run_scan,
                "star": _cmd_run_star,
                "classify": _cmd_run_classify,
                "energy": _cmd_run_energy,
            }[args.kind]
            return handler(args, out)
        if args.command == "calibrate":
            return _cmd_calibrate(args, Path(args.out))
        return _cmd_replay_log(args, None)
    except (ParameterError, ScenarioError, FileNotFoundError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
