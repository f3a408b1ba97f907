"""Unicycle (differential-drive) and bicycle kinematics.

All functions here are pure: they map states and commands to rates or
derived quantities without touching any shared state.  Heading is kept in
(-pi, pi]; normalization is applied by callers after integration steps,
never inside derivative functions, so the derivatives stay smooth.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


def normalize_angle(angle: float) -> float:
    """Wrap an angle into (-pi, pi]."""
    wrapped = math.fmod(angle + math.pi, 2.0 * math.pi)
    if wrapped <= 0.0:
        wrapped += 2.0 * math.pi
    return wrapped - math.pi


@dataclass
class Pose:
    """Planar configuration (x, y, heading)."""

    x: float = 0.0
    y: float = 0.0
    theta: float = 0.0

    def normalized(self) -> "Pose":
        return Pose(self.x, self.y, normalize_angle(self.theta))


@dataclass
class BicycleState:
    """Pose plus front-wheel steering angle."""

    pose: Pose
    delta: float = 0.0


@dataclass(frozen=True)
class RobotGeometry:
    """Geometric constants of the chassis.

    The half-track is the lateral distance from the chassis centerline to
    each drive wheel; the wheelbase is the front-to-rear axle distance used
    by the bicycle model.  They are distinct lengths and kept as separate
    fields.
    """

    wheel_radius: float = 0.1
    half_track: float = 0.25
    wheelbase: float = 1.0
    delta_max: float = 0.6

    def __post_init__(self):
        for name in ("wheel_radius", "half_track", "wheelbase"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be strictly positive")


@dataclass(frozen=True)
class WheelSpeeds:
    """Rotational speeds of the right and left drive wheels, rad/s."""

    right: float
    left: float


@dataclass(frozen=True)
class ChassisTwist:
    """Chassis longitudinal speed (m/s) and yaw rate (rad/s)."""

    v: float
    omega: float


def forward_kinematics(ws: WheelSpeeds, geom: RobotGeometry) -> ChassisTwist:
    """Wheel speeds -> chassis twist (direct kinematic map)."""
    v = geom.wheel_radius * (ws.right + ws.left) / 2.0
    omega = geom.wheel_radius * (ws.right - ws.left) / (2.0 * geom.half_track)
    return ChassisTwist(v=v, omega=omega)


def inverse_kinematics(tw: ChassisTwist, geom: RobotGeometry) -> WheelSpeeds:
    """Chassis twist -> wheel speeds (inverse kinematic map)."""
    right = (tw.v + geom.half_track * tw.omega) / geom.wheel_radius
    left = (tw.v - geom.half_track * tw.omega) / geom.wheel_radius
    return WheelSpeeds(right=right, left=left)


def unicycle_derivatives(p: Pose, tw: ChassisTwist) -> tuple[float, float, float]:
    """Pose rate (xdot, ydot, thetadot) of the unicycle model."""
    return (tw.v * math.cos(p.theta), tw.v * math.sin(p.theta), tw.omega)


def bicycle_derivatives(
    s: BicycleState, v: float, delta_rate: float, geom: RobotGeometry
) -> tuple[float, float, float, float]:
    """State rate (xdot, ydot, thetadot, deltadot) of the kinematic bicycle.

    Raises ValueError at the tangent singularity |delta| >= pi/2.
    """
    if abs(s.delta) >= math.pi / 2.0:
        raise ValueError(f"steering angle {s.delta} at or past tangent singularity")
    theta = s.pose.theta
    return (
        v * math.cos(theta),
        v * math.sin(theta),
        v * math.tan(s.delta) / geom.wheelbase,
        delta_rate,
    )


def constraint_residual(
    pose_rate: tuple[float, float, float],
    theta: float,
    ws: WheelSpeeds,
    geom: RobotGeometry,
) -> tuple[float, float, float]:
    """Residuals of the three non-holonomic rolling constraints.

    All three vanish exactly when the generalized rates are consistent with
    no lateral slip and no rolling slip.
    """
    xdot, ydot, thetadot = pose_rate
    sin_t, cos_t = math.sin(theta), math.cos(theta)
    r1 = -xdot * sin_t + ydot * cos_t
    r2 = xdot * cos_t + ydot * sin_t + geom.half_track * thetadot - geom.wheel_radius * ws.right
    r3 = xdot * cos_t + ydot * sin_t - geom.half_track * thetadot - geom.wheel_radius * ws.left
    return (r1, r2, r3)


def turn_radius(delta: float, wheelbase: float) -> float:
    """Instantaneous turn radius from the steering angle; tan(delta) = L/R.

    Returns signed radius (sign follows the turn direction); infinite for
    straight-line motion (delta = 0).
    """
    if delta == 0.0:
        return math.inf
    return wheelbase / math.tan(delta)
