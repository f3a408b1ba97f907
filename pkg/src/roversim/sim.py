"""Deterministic fixed-step closed-loop simulator.

Wires the speed PID and grade feedforward to the drive motor, the drive
motor torque to the longitudinal force balance, and pure pursuit to a
rate-limited steering channel feeding the bicycle kinematics.  Controller
commands are held over each integration step (single-rate loop).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .actuator import MotorParams
from .control import (
    FeedforwardConfig,
    NoIntersectionError,
    PidController,
    PidGains,
    PidState,
    PursuitConfig,
    fallback_target,
    feedforward_command,
    find_lookahead_point,
    lookahead_distance,
    pure_pursuit_steering,
)
from .dynamics import DisturbanceState, LongitudinalParams
from .kinematics import Pose, RobotGeometry, normalize_angle
from .paths import Path

TRACE_COLUMNS = (
    "t",
    "x",
    "y",
    "theta",
    "v",
    "v_ref",
    "delta",
    "cte",
    "e_v",
    "u_pid",
    "u_ff",
    "theta_road",
)


@dataclass(frozen=True)
class SimConfig:
    dt: float = 0.001
    duration: float = 30.0
    integrator: str = "rk4"
    log_decimation: int = 10

    def __post_init__(self):
        if self.dt <= 0.0:
            raise ValueError("dt must be positive")
        if self.duration < 0.0:
            raise ValueError("duration must be non-negative")
        if self.log_decimation < 1:
            raise ValueError("log_decimation must be >= 1")
        if self.integrator not in ("euler", "rk4"):
            raise ValueError(f"unknown integrator: {self.integrator!r}")


@dataclass(frozen=True)
class DisturbanceProfile:
    """Road grade as a piecewise-linear function of distance traveled,
    plus a constant wind speed."""

    grade_breakpoints: tuple[tuple[float, float], ...] = ((0.0, 0.0),)
    wind_speed: float = 0.0

    def __post_init__(self):
        dists = [d for d, _ in self.grade_breakpoints]
        if any(b <= a for a, b in zip(dists, dists[1:])):
            raise ValueError("grade breakpoint distances must be strictly increasing")
        if any(abs(g) >= math.pi / 2.0 for _, g in self.grade_breakpoints):
            raise ValueError("grades must lie in (-pi/2, pi/2)")
        # cached arrays for fast interpolation in the sim loop
        object.__setattr__(self, "_dists", np.array(dists, dtype=float))
        object.__setattr__(self, "_grades", np.array([g for _, g in self.grade_breakpoints], dtype=float))

    def grade_at(self, distance_traveled: float) -> float:
        return float(np.interp(distance_traveled, self._dists, self._grades))


def disturbance_at(profile: DisturbanceProfile, distance_traveled: float) -> DisturbanceState:
    """Grade interpolated at the given distance; end values held outside."""
    return DisturbanceState(
        road_grade=profile.grade_at(distance_traveled), wind_speed=profile.wind_speed
    )


def hill_profile(
    peak_grade: float = math.radians(5.0), total_distance: float = 400.0
) -> DisturbanceProfile:
    """Trapezoidal up-then-down hill: flat, +grade, flat, -grade, flat."""
    d = total_distance
    pts = (
        (0.0, 0.0),
        (0.125 * d, 0.0),
        (0.25 * d, peak_grade),
        (0.375 * d, peak_grade),
        (0.5 * d, 0.0),
        (0.625 * d, -peak_grade),
        (0.75 * d, -peak_grade),
        (0.875 * d, 0.0),
    )
    return DisturbanceProfile(grade_breakpoints=pts)


def cross_track_error(p: Pose, path: Path) -> float:
    """Signed perpendicular distance to the path; positive to the left."""
    return path.signed_offset((p.x, p.y))


@dataclass
class RobotParams:
    """Everything physical about the robot, bundled for the sim loop."""

    geometry: RobotGeometry = field(default_factory=RobotGeometry)
    longitudinal: LongitudinalParams = field(default_factory=LongitudinalParams)
    motor: MotorParams = field(default_factory=MotorParams)


@dataclass
class ControllerSet:
    gains: PidGains = field(default_factory=lambda: PidGains(kp=3.94, ki=1.52, kd=2.51))
    pursuit: PursuitConfig = field(default_factory=PursuitConfig)
    feedforward: FeedforwardConfig = field(default_factory=FeedforwardConfig)


@dataclass
class Scenario:
    """One closed-loop experiment definition."""

    reference_speed: float = 10.0
    speed_profile: Optional[tuple[tuple[float, float], ...]] = None
    path: Optional[Path] = None
    disturbance: DisturbanceProfile = field(default_factory=DisturbanceProfile)
    initial_pose: Pose = field(default_factory=Pose)
    initial_delta: float = 0.0
    initial_speed: float = 0.0
    pid_on: bool = True
    ff_on: bool = True
    pursuit_on: bool = False
    steering_events: tuple[tuple[float, float, float], ...] = ()
    steer_rate_limit: float = 1.0
    steer_time_constant: float = 0.1
    start_at_trim: bool = False

    def __post_init__(self):
        if self.reference_speed < 0.0:
            raise ValueError("reference_speed must be non-negative")
        if self.pursuit_on and self.path is None:
            raise ValueError("pursuit_on requires a path")

    def reference_at(self, t: float) -> float:
        if self.speed_profile is None:
            return self.reference_speed
        times = [tp for tp, _ in self.speed_profile]
        speeds = [s for _, s in self.speed_profile]
        return float(np.interp(t, times, speeds))

    def open_loop_steering(self, t: float) -> float:
        for start, end, delta in self.steering_events:
            if start <= t < end:
                return delta
        return 0.0


@dataclass
class SimTrace:
    """Time-indexed log of the closed loop, one row per decimated step."""

    data: np.ndarray  # shape (n, len(TRACE_COLUMNS))

    def __len__(self) -> int:
        return len(self.data)

    def __getitem__(self, column: str) -> np.ndarray:
        return self.data[:, TRACE_COLUMNS.index(column)]


@dataclass(frozen=True)
class Metrics:
    speed_rmse: float
    max_speed_error: float
    cte_rmse: float
    max_cte: float
    settled: bool


def integrate_step(
    state: np.ndarray,
    derivative_function: Callable[[np.ndarray], np.ndarray],
    dt: float,
    integrator: str = "rk4",
) -> np.ndarray:
    """One explicit Euler or classical RK4 step of an autonomous system."""
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    y = np.asarray(state, dtype=float)
    if integrator == "euler":
        out = y + dt * np.asarray(derivative_function(y))
    elif integrator == "rk4":
        k1 = np.asarray(derivative_function(y))
        k2 = np.asarray(derivative_function(y + 0.5 * dt * k1))
        k3 = np.asarray(derivative_function(y + 0.5 * dt * k2))
        k4 = np.asarray(derivative_function(y + dt * k3))
        out = y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    else:
        raise ValueError(f"unknown integrator: {integrator!r}")
    if not np.all(np.isfinite(out)):
        raise ValueError("non-finite state after integration step")
    return out


def run_scenario(
    sc: Scenario,
    robot: RobotParams,
    controllers: ControllerSet,
    cfg: SimConfig,
) -> SimTrace:
    """Simulate the closed loop and return the logged trace.

    Deterministic: the trace is a pure function of the arguments.  The
    inner loop works on plain floats (not arrays) with the RK4 stages
    inlined; per-step command updates make this loop hot.
    """
    geom = robot.geometry
    long_p = robot.longitudinal
    motor_p = robot.motor
    profile = sc.disturbance
    pid = PidController(controllers.gains, u_limit=motor_p.voltage_limit)

    x, y_pos = sc.initial_pose.x, sc.initial_pose.y
    theta = sc.initial_pose.theta
    delta = sc.initial_delta
    v = sc.initial_speed
    cur = 0.0  # armature current
    wm = 0.0  # motor shaft speed
    s_pos = 0.0  # distance traveled

    n_steps = int(round(cfg.duration / cfg.dt))
    dt = cfg.dt
    rows: list[list[float]] = []
    last_arc: Optional[float] = None

    drive_gain = motor_p.torque_const * motor_p.gear_ratio / geom.wheel_radius
    mass = long_p.mass
    grav = long_p.gravity
    c_a = long_p.aero_coeff
    f_lim = long_p.drive_force_limit
    wind = profile.wind_speed
    res, ind = motor_p.resistance, motor_p.inductance
    k_t, k_b = motor_p.torque_const, motor_p.emf_const
    damp, inertia = motor_p.damping, motor_p.inertia
    v_lim = motor_p.voltage_limit
    wheelbase = geom.wheelbase
    steer_tau = sc.steer_time_constant
    steer_rate = sc.steer_rate_limit
    rk4 = cfg.integrator == "rk4"

    if sc.start_at_trim:
        # start at the force/motor/integrator equilibrium for the initial
        # speed, so comparisons are not dominated by the spin-up transient
        rel0 = v - wind
        f_a0 = math.copysign(c_a * rel0 * rel0, rel0) if rel0 != 0.0 else 0.0
        f_hold = f_a0 + mass * grav * math.sin(profile.grade_at(0.0))
        cur = f_hold / drive_gain
        u_trim = cur * (k_t * k_b + res * damp) / damp
        wm = (u_trim - res * cur) / k_b
        if sc.pid_on and controllers.gains.ki > 0.0:
            u_ff0 = feedforward_command(mass * grav * math.sin(profile.grade_at(0.0)),
                                        controllers.feedforward) if sc.ff_on else 0.0
            pid.state = PidState(
                integral=(u_trim - u_ff0) / controllers.gains.ki,
                prev_error=sc.reference_at(0.0) - v,
                initialized=True,
            )

    for step in range(n_steps + 1):
        t = step * dt
        v_ref = sc.reference_at(t)
        e_v = v_ref - v
        grade_here = profile.grade_at(s_pos)

        # longitudinal command
        if sc.pid_on:
            u_pid = pid.step(e_v, dt)
        else:
            u_pid = v_ref  # open loop: reference fed straight to the motor
        if sc.ff_on:
            u_ff = feedforward_command(mass * grav * math.sin(grade_here), controllers.feedforward)
        else:
            u_ff = 0.0
        u_cmd = max(-v_lim, min(v_lim, u_pid + u_ff))

        # lateral command
        if sc.pursuit_on:
            pose = Pose(x, y_pos, theta)
            l_d = lookahead_distance(max(v, 0.0), controllers.pursuit)
            try:
                target, last_arc = find_lookahead_point(pose, sc.path, l_d, min_arc=last_arc)
            except NoIntersectionError:
                target, last_arc = fallback_target(pose, sc.path, min_arc=last_arc)
            delta_cmd = pure_pursuit_steering(pose, target, controllers.pursuit)
        else:
            delta_cmd = sc.open_loop_steering(t)
        delta_cmd = min(max(delta_cmd, -geom.delta_max), geom.delta_max)

        if step % cfg.log_decimation == 0:
            cte = cross_track_error(Pose(x, y_pos, theta), sc.path) if sc.path is not None else 0.0
            rows.append([t, x, y_pos, theta, v, v_ref, delta, cte, e_v, u_pid, u_ff, grade_here])
        if step == n_steps:
            break

        def deriv(x_, y_, th_, de_, v_, i_, wm_, s_):
            grade = profile.grade_at(s_)
            f_g = mass * grav * math.sin(grade)
            rel = v_ - wind
            f_a = math.copysign(c_a * rel * rel, rel) if rel != 0.0 else 0.0
            f_d = max(-f_lim, min(f_lim, drive_gain * i_))
            raw_rate = (delta_cmd - de_) / steer_tau
            return (
                v_ * math.cos(th_),
                v_ * math.sin(th_),
                v_ * math.tan(de_) / wheelbase,
                min(max(raw_rate, -steer_rate), steer_rate),
                (f_d - f_a - f_g) / mass,
                (u_cmd - res * i_ - k_b * wm_) / ind,
                (k_t * i_ - damp * wm_) / inertia,
                v_,
            )

        state = (x, y_pos, theta, delta, v, cur, wm, s_pos)
        if rk4:
            k1 = deriv(*state)
            k2 = deriv(*(si + 0.5 * dt * ki for si, ki in zip(state, k1)))
            k3 = deriv(*(si + 0.5 * dt * ki for si, ki in zip(state, k2)))
            k4 = deriv(*(si + dt * ki for si, ki in zip(state, k3)))
            state = tuple(
                si + (dt / 6.0) * (a + 2.0 * b + 2.0 * c + d)
                for si, a, b, c, d in zip(state, k1, k2, k3, k4)
            )
        else:
            k1 = deriv(*state)
            state = tuple(si + dt * ki for si, ki in zip(state, k1))
        if not all(math.isfinite(si) for si in state):
            raise ValueError(f"simulation diverged at step {step} (t={t:.4f}s)")
        x, y_pos, theta, delta, v, cur, wm, s_pos = state
        theta = normalize_angle(theta)

    return SimTrace(data=np.array(rows))


def compute_metrics(tr: SimTrace, v_ref: Optional[float] = None) -> Metrics:
    """Error statistics over a trace; settled means the speed stays inside
    the +/-5% band of the reference over the final 20% of the run."""
    if len(tr) == 0:
        raise ValueError("empty trace")
    e_v = tr["e_v"]
    cte = tr["cte"]
    refs = tr["v_ref"] if v_ref is None else np.full(len(tr), v_ref)
    tail = max(1, int(math.ceil(0.2 * len(tr))))
    tail_err = np.abs(tr["v"][-tail:] - refs[-tail:])
    band = 0.05 * np.abs(refs[-tail:]) + 1e-12
    return Metrics(
        speed_rmse=float(np.sqrt(np.mean(e_v**2))),
        max_speed_error=float(np.max(np.abs(e_v))),
        cte_rmse=float(np.sqrt(np.mean(cte**2))),
        max_cte=float(np.max(np.abs(cte))),
        settled=bool(np.all(tail_err <= band)),
    )
