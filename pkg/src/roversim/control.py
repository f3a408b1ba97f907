"""Controllers: discrete PID, static feedforward, Ziegler-Nichols tuner,
and the pure-pursuit steering law with a velocity-scaled lookahead."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .dynamics import LongitudinalParams
from .kinematics import Pose, normalize_angle
from .paths import Path


@dataclass(frozen=True)
class PidGains:
    kp: float = 0.0
    ki: float = 0.0
    kd: float = 0.0

    def __post_init__(self):
        if self.kp < 0.0 or self.ki < 0.0 or self.kd < 0.0:
            raise ValueError("PID gains must be non-negative")


@dataclass(frozen=True)
class PidState:
    """Integrator and derivative memory of the discrete PID."""

    integral: float = 0.0
    prev_error: float = 0.0
    initialized: bool = False


def pid_step(
    st: PidState,
    e: float,
    dt: float,
    g: PidGains,
    u_limit: Optional[float] = None,
) -> tuple[float, PidState]:
    """One backward-Euler PID update; returns (command, next state).

    The derivative uses a backward difference seeded with the current error
    on the first call, so there is no derivative kick.  When ``u_limit`` is
    given, the integrator freezes whenever the command saturates in the
    error's direction (conditional anti-windup).
    """
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    prev = e if not st.initialized else st.prev_error
    e_rate = (e - prev) / dt
    integral = st.integral + e * dt
    u = g.kp * e + g.ki * integral + g.kd * e_rate
    if u_limit is not None and abs(u) > u_limit and u * e > 0.0:
        integral = st.integral
        u = g.kp * e + g.ki * integral + g.kd * e_rate
    return u, PidState(integral=integral, prev_error=e, initialized=True)


class PidController:
    """Stateful wrapper around :func:`pid_step` for loop code."""

    def __init__(self, gains: PidGains, u_limit: Optional[float] = None):
        self.gains = gains
        self.u_limit = u_limit
        self.state = PidState()

    def step(self, e: float, dt: float) -> float:
        u, self.state = pid_step(self.state, e, dt, self.gains, self.u_limit)
        return u

    def reset(self):
        self.state = PidState()


def critical_params(p: LongitudinalParams) -> tuple[float, float]:
    """Ultimate gain and oscillation period (k_U, T_U) of the tuning plant."""
    k_u = p.mass * p.gravity / p.spring_k
    t_u = 2.0 * math.pi * math.sqrt(p.mass / p.spring_k)
    return (k_u, t_u)


@dataclass(frozen=True)
class ZnTuning:
    """Gains from the Ziegler-Nichols ultimate-cycle table.

    ``t_i`` / ``t_d`` are the integral / derivative time constants where the
    controller type defines them, else None.
    """

    gains: PidGains
    t_i: Optional[float] = None
    t_d: Optional[float] = None


def zn_tune(k_u: float, t_u: float, controller_type: str = "PID") -> ZnTuning:
    """Ziegler-Nichols ultimate-cycle tuning for P, PI, PD, or PID."""
    if k_u <= 0.0 or t_u <= 0.0:
        raise ValueError("k_u and t_u must be positive")
    kind = controller_type.upper()
    if kind == "P":
        return ZnTuning(PidGains(kp=0.5 * k_u))
    if kind == "PI":
        return ZnTuning(
            PidGains(kp=0.45 * k_u, ki=0.54 * k_u / t_u), t_i=t_u / 1.2
        )
    if kind == "PD":
        return ZnTuning(
            PidGains(kp=0.8 * k_u, kd=k_u * t_u / 10.0), t_d=t_u / 8.0
        )
    if kind == "PID":
        return ZnTuning(
            PidGains(kp=0.6 * k_u, ki=1.2 * k_u / t_u, kd=3.0 * k_u * t_u / 40.0),
            t_i=t_u / 2.0,
            t_d=t_u / 8.0,
        )
    raise ValueError(f"unknown controller type: {controller_type!r}")


@dataclass(frozen=True)
class PursuitConfig:
    """Pure-pursuit parameters: lookahead scaling and steering limits."""

    lookahead_gain: float = 0.2
    lookahead_min: float = 1.0
    lookahead_max: float = 3.0
    wheelbase: float = 1.0
    delta_max: float = 0.6

    def __post_init__(self):
        if not (0.0 < self.lookahead_min <= self.lookahead_max):
            raise ValueError("need 0 < lookahead_min <= lookahead_max")


@dataclass(frozen=True)
class FeedforwardConfig:
    """Static disturbance-force feedforward gain (command per newton)."""

    kff: float = 0.0022


class NoIntersectionError(ValueError):
    """Lookahead circle does not reach the path ahead of the robot."""


def lookahead_distance(v: float, cfg: PursuitConfig) -> float:
    """Velocity-scaled lookahead, saturated to [lookahead_min, lookahead_max]."""
    return min(max(cfg.lookahead_gain * v, cfg.lookahead_min), cfg.lookahead_max)


def find_lookahead_point(
    p: Pose, path: Path, l_d: float, min_arc: Optional[float] = None
) -> tuple[np.ndarray, float]:
    """First path point at distance l_d from the rear axle, ahead of the robot.

    ``min_arc`` lower-bounds the returned arc position; callers tracking a
    path pass their last arc so the target never moves backwards.  When
    given, it replaces the global projection (which can jump laps on a
    self-overlapping path).  Raises NoIntersectionError when the circle
    misses the remaining path.
    """
    center = (p.x, p.y)
    floor = path.project(center) if min_arc is None else min_arc
    for arc in path.circle_intersections(center, l_d):
        if arc >= floor - 1e-9:
            return path.point_at(arc), arc
    raise NoIntersectionError(
        f"no path point at distance {l_d} ahead of arc position {floor:.3f}"
    )


def fallback_target(p: Pose, path: Path, min_arc: Optional[float] = None) -> tuple[np.ndarray, float]:
    """Nearest path point beyond the current projection, for off-path starts."""
    arc = path.project((p.x, p.y)) if min_arc is None else min_arc
    return path.point_at(arc), arc


def pure_pursuit_steering(p: Pose, target, cfg: PursuitConfig) -> float:
    """Steering angle aiming the rear axle along an arc through ``target``.

    delta = arctan(2 L sin(alpha) / l_d) with alpha the heading-to-target
    angle and l_d the actual distance to the target; clamped to the
    steering limit.
    """
    tx, ty = float(target[0]), float(target[1])
    dx, dy = tx - p.x, ty - p.y
    l_d = math.hypot(dx, dy)
    if l_d == 0.0:
        raise ValueError("pursuit target coincides with the rear axle")
    alpha = normalize_angle(math.atan2(dy, dx) - p.theta)
    delta = math.atan2(2.0 * cfg.wheelbase * math.sin(alpha), l_d)
    return min(max(delta, -cfg.delta_max), cfg.delta_max)


def feedforward_command(disturbance_force: float, cfg: FeedforwardConfig) -> float:
    """Compensating command for a measured resistive disturbance force.

    Positive force (uphill grade) yields a positive command, adding drive
    effort on top of the feedback controller.
    """
    return cfg.kff * disturbance_force
