"""Command-line front end: scenario files, run modes, CSV trace emission.

Scenario files are YAML.  Unknown keys are rejected (a silently ignored
typo in a gain would invalidate an experiment), every unspecified field
takes its documented default, and all outputs are pure functions of the
scenario file plus overrides, so reruns are byte-identical.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path as FsPath
from typing import Any, Optional

import yaml

from .actuator import MotorParams
from .control import FeedforwardConfig, PidGains, PursuitConfig, critical_params, zn_tune
from .dynamics import LongitudinalParams
from .kinematics import Pose, RobotGeometry
from .paths import Path, circle_path, lane_change_path, straight_path
from .sim import (
    TRACE_COLUMNS,
    ControllerSet,
    DisturbanceProfile,
    Metrics,
    RobotParams,
    Scenario,
    SimConfig,
    SimTrace,
    compute_metrics,
    hill_profile,
    run_scenario,
)

OUTPUT_DIR_ENV = "ROVERSIM_OUT"

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3


class ConfigError(ValueError):
    """Scenario-file or override validation failure."""


def _take(section: dict, name: str, allowed: set[str]) -> None:
    unknown = set(section) - allowed
    if unknown:
        raise ConfigError(f"unknown key(s) in '{name}': {', '.join(sorted(unknown))}")


def _build(cls, section: dict, name: str):
    fields = set(cls.__dataclass_fields__)
    _take(section, name, fields)
    try:
        return cls(**section)
    except (ValueError, TypeError) as err:
        raise ConfigError(f"invalid '{name}': {err}") from err


def _build_path(section: dict) -> Path:
    kind = section.get("type")
    if kind is None:
        raise ConfigError("path section requires a 'type'")
    args = {k: v for k, v in section.items() if k != "type"}
    builders = {
        "straight": straight_path,
        "lane_change": lane_change_path,
        "circle": circle_path,
    }
    try:
        if kind == "waypoints":
            _take(args, "path", {"points"})
            return Path(args["points"])
        if kind in builders:
            return builders[kind](**args)
    except (ValueError, TypeError, KeyError) as err:
        raise ConfigError(f"invalid 'path': {err}") from err
    raise ConfigError(f"unknown path type: {kind!r}")


def _build_disturbance(section: dict) -> DisturbanceProfile:
    _take(section, "disturbance", {"profile", "wind_speed", "grade_breakpoints",
                                   "peak_grade_deg", "total_distance"})
    wind = float(section.get("wind_speed", 0.0))
    profile = section.get("profile", "flat")
    try:
        if "grade_breakpoints" in section:
            pts = tuple((float(d), float(g)) for d, g in section["grade_breakpoints"])
            return DisturbanceProfile(grade_breakpoints=pts, wind_speed=wind)
        if profile == "hill":
            base = hill_profile(
                peak_grade=math.radians(float(section.get("peak_grade_deg", 5.0))),
                total_distance=float(section.get("total_distance", 400.0)),
            )
            return DisturbanceProfile(grade_breakpoints=base.grade_breakpoints, wind_speed=wind)
        if profile == "flat":
            return DisturbanceProfile(wind_speed=wind)
    except (ValueError, TypeError) as err:
        raise ConfigError(f"invalid 'disturbance': {err}") from err
    raise ConfigError(f"unknown disturbance profile: {profile!r}")


_TOP_LEVEL_KEYS = {
    # sim config
    "dt", "duration", "integrator", "log_decimation",
    # scenario
    "reference_speed", "speed_profile", "initial_speed", "initial_pose",
    "initial_delta", "pid_on", "ff_on", "pursuit_on", "steering_events",
    "steer_rate_limit", "steer_time_constant", "start_at_trim", "path", "disturbance",
    # parameter sets
    "geometry", "longitudinal", "motor", "pid", "pursuit", "feedforward",
}


def load_scenario(file) -> tuple[Scenario, SimConfig, RobotParams, ControllerSet]:
    """Parse and validate a scenario file, filling defaults everywhere."""
    path = FsPath(file)
    if not path.exists():
        raise ConfigError(f"scenario file not found: {path}")
    try:
        raw = yaml.safe_load(path.read_text())
    except yaml.YAMLError as err:
        raise ConfigError(f"malformed scenario file: {err}") from err
    if raw is None:
        raw = {}
    if not isinstance(raw, dict):
        raise ConfigError("scenario file must be a mapping at the top level")
    return build_run(raw)


def build_run(raw: dict) -> tuple[Scenario, SimConfig, RobotParams, ControllerSet]:
    """Construct all run objects from a raw (already-merged) config dict."""
    _take(raw, "scenario", _TOP_LEVEL_KEYS)

    sim_cfg = _build(
        SimConfig,
        {k: raw[k] for k in ("dt", "duration", "integrator", "log_decimation") if k in raw},
        "sim config",
    )

    geometry = _build(RobotGeometry, dict(raw.get("geometry", {})), "geometry")
    longitudinal = _build(LongitudinalParams, dict(raw.get("longitudinal", {})), "longitudinal")
    motor = _build(MotorParams, dict(raw.get("motor", {})), "motor")
    robot = RobotParams(geometry=geometry, longitudinal=longitudinal, motor=motor)

    pid_raw = dict(raw.get("pid", {}))
    pid_raw.setdefault("kp", 3.94)
    pid_raw.setdefault("ki", 1.52)
    pid_raw.setdefault("kd", 2.51)
    gains = _build(PidGains, pid_raw, "pid")
    pursuit_raw = dict(raw.get("pursuit", {}))
    pursuit_raw.setdefault("wheelbase", geometry.wheelbase)
    pursuit_raw.setdefault("delta_max", geometry.delta_max)
    pursuit = _build(PursuitConfig, pursuit_raw, "pursuit")
    feedforward = _build(FeedforwardConfig, dict(raw.get("feedforward", {})), "feedforward")
    controllers = ControllerSet(gains=gains, pursuit=pursuit, feedforward=feedforward)

    sc_kwargs: dict[str, Any] = {}
    for key in ("reference_speed", "initial_speed", "initial_delta", "pid_on",
                "ff_on", "pursuit_on", "steer_rate_limit", "steer_time_constant",
                "start_at_trim"):
        if key in raw:
            sc_kwargs[key] = raw[key]
    if "speed_profile" in raw:
        sc_kwargs["speed_profile"] = tuple(
            (float(t), float(v)) for t, v in raw["speed_profile"]
        )
    if "steering_events" in raw:
        sc_kwargs["steering_events"] = tuple(
            (float(a), float(b), float(d)) for a, b, d in raw["steering_events"]
        )
    if "initial_pose" in raw:
        sc_kwargs["initial_pose"] = _build(Pose, dict(raw["initial_pose"]), "initial_pose")
    if "path" in raw:
        sc_kwargs["path"] = _build_path(dict(raw["path"]))
    if "disturbance" in raw:
        sc_kwargs["disturbance"] = _build_disturbance(dict(raw["disturbance"]))
    try:
        scenario = Scenario(**sc_kwargs)
    except ValueError as err:
        raise ConfigError(f"invalid scenario: {err}") from err
    return scenario, sim_cfg, robot, controllers


def apply_overrides(raw: dict, overrides: list[str]) -> dict:
    """Apply dotted key=value overrides (e.g. pid.kp=3.94) to the raw dict."""
    out = dict(raw)
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"override must be key=value: {item!r}")
        dotted, _, text = item.partition("=")
        try:
            value = yaml.safe_load(text)
        except yaml.YAMLError as err:
            raise ConfigError(f"cannot parse override value {text!r}: {err}") from err
        keys = dotted.split(".")
        node = out
        for k in keys[:-1]:
            child = dict(node.get(k, {}))
            node[k] = child
            node = child
        node[keys[-1]] = value
    return out


def format_number(x: float) -> str:
    return f"{x:.9g}"


def write_trace_csv(trace: SimTrace, path: FsPath) -> None:
    lines = [",".join(TRACE_COLUMNS)]
    for row in trace.data:
        lines.append(",".join(format_number(v) for v in row))
    path.write_text("\n".join(lines) + "\n")


def _metrics_lines(prefix: str, m: Metrics) -> list[str]:
    return [
        f"{prefix}speed_rmse={format_number(m.speed_rmse)}",
        f"{prefix}max_speed_error={format_number(m.max_speed_error)}",
        f"{prefix}cte_rmse={format_number(m.cte_rmse)}",
        f"{prefix}max_cte={format_number(m.max_cte)}",
        f"{prefix}settled={'true' if m.settled else 'false'}",
    ]


def _plot_script(csv_names: list[str]) -> str:
    lines = [
        "# gnuplot script; run from the output directory",
        "set datafile separator ','",
        "set key autotitle columnhead",
        "set xlabel 't [s]'",
        "set ylabel 'v [m/s]'",
    ]
    plots = ", ".join(
        f"'{name}' using 1:5 with lines title '{name} v', "
        f"'{name}' using 1:6 with lines dashtype 2 title '{name} v_ref'"
        for name in csv_names
    )
    lines.append(f"plot {plots}")
    return "\n".join(lines) + "\n"


def emit_outputs(traces: dict[str, SimTrace], metrics: dict[str, Metrics],
                 extra: dict[str, str], out_dir: FsPath) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_names = []
    for name, trace in traces.items():
        csv_name = f"{name}.csv"
        write_trace_csv(trace, out_dir / csv_name)
        csv_names.append(csv_name)
    lines: list[str] = []
    for name, m in metrics.items():
        prefix = "" if name == "trace" else name.removeprefix("trace_") + "."
        lines.extend(_metrics_lines(prefix, m))
    lines.extend(f"{k}={v}" for k, v in extra.items())
    (out_dir / "metrics.txt").write_text("\n".join(lines) + "\n")
    (out_dir / "plot.gp").write_text(_plot_script(csv_names))


@dataclass
class RunRequest:
    scenario_file: str
    output_dir: str
    mode: str = "single"
    overrides: list[str] = field(default_factory=list)


def _run_tune(longitudinal: LongitudinalParams, out=sys.stdout) -> None:
    k_u, t_u = critical_params(longitudinal)
    tuning = zn_tune(k_u, t_u, "PID")
    print(f"k_U = {k_u:.4f}", file=out)
    print(f"T_U = {t_u:.4f}", file=out)
    print(f"kp = {tuning.gains.kp:.4f}", file=out)
    print(f"ki = {tuning.gains.ki:.4f}", file=out)
    print(f"kd = {tuning.gains.kd:.4f}", file=out)


def execute(req: RunRequest, out=sys.stdout) -> int:
    """Run one request; returns the process exit code."""
    try:
        path = FsPath(req.scenario_file)
        if not path.exists():
            raise ConfigError(f"scenario file not found: {path}")
        try:
            raw = yaml.safe_load(path.read_text()) or {}
        except yaml.YAMLError as err:
            raise ConfigError(f"malformed scenario file: {err}") from err
        if not isinstance(raw, dict):
            raise ConfigError("scenario file must be a mapping at the top level")
        raw = apply_overrides(raw, req.overrides)
        scenario, sim_cfg, robot, controllers = build_run(raw)
    except ConfigError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_CONFIG

    out_dir = FsPath(req.output_dir)
    try:
        if req.mode == "tune":
            _run_tune(robot.longitudinal, out=out)
            return EXIT_OK
        if req.mode == "single":
            trace = run_scenario(scenario, robot, controllers, sim_cfg)
            m = compute_metrics(trace)
            emit_outputs({"trace": trace}, {"trace": m}, {}, out_dir)
            print(f"wrote {out_dir}/trace.csv", file=out)
            return EXIT_OK
        if req.mode == "compare_ff":
            import dataclasses

            traces, metrics = {}, {}
            for on in (True, False):
                sc = dataclasses.replace(scenario, ff_on=on)
                name = "trace_ff_on" if on else "trace_ff_off"
                traces[name] = run_scenario(sc, robot, controllers, sim_cfg)
                metrics[name] = compute_metrics(traces[name])
            peak_on = metrics["trace_ff_on"].max_speed_error
            peak_off = metrics["trace_ff_off"].max_speed_error
            if peak_off > 0.0:
                ratio = peak_on / peak_off
            else:
                ratio = 1.0 if peak_on == 0.0 else math.inf
            emit_outputs(traces, metrics, {"peak_error_ratio_ff_on_over_off": format_number(ratio)}, out_dir)
            print(f"peak_error_ratio_ff_on_over_off={format_number(ratio)}", file=out)
            return EXIT_OK
        if req.mode == "compare_controllers":
            import dataclasses

            traces, metrics = {}, {}
            sc_on = dataclasses.replace(scenario, pid_on=True)
            sc_off = dataclasses.replace(scenario, pid_on=False, ff_on=False, pursuit_on=False)
            traces["trace_ctrl_on"] = run_scenario(sc_on, robot, controllers, sim_cfg)
            traces["trace_ctrl_off"] = run_scenario(sc_off, robot, controllers, sim_cfg)
            metrics = {k: compute_metrics(v) for k, v in traces.items()}
            emit_outputs(traces, metrics, {}, out_dir)
            for name, m in metrics.items():
                print(f"{name}.settled={'true' if m.settled else 'false'}", file=out)
            return EXIT_OK
        print(f"error: unknown mode: {req.mode!r}", file=sys.stderr)
        return EXIT_CONFIG
    except (ValueError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_RUNTIME


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="roversim",
        description="Longitudinal and lateral control simulator for a 4-wheeled robot",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run a scenario file")
    run.add_argument("scenario", help="YAML scenario file")
    run.add_argument(
        "--out",
        default=os.environ.get(OUTPUT_DIR_ENV, "out"),
        help=f"output directory (default: ${OUTPUT_DIR_ENV} or ./out)",
    )
    run.add_argument(
        "--mode",
        default="single",
        choices=["single", "compare_ff", "compare_controllers", "tune"],
    )
    run.add_argument(
        "--set",
        dest="overrides",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="override a scenario value, dotted keys allowed (e.g. pid.kp=3.94)",
    )
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    req = RunRequest(
        scenario_file=args.scenario,
        output_dir=args.out,
        mode=args.mode,
        overrides=args.overrides,
    )
    return execute(req)


if __name__ == "__main__":
    sys.exit(main())
