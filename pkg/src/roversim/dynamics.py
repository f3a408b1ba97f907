"""Longitudinal force balance and frequency-domain plant models.

The simulated plant is the Newton balance (drive force minus aerodynamic
and grade resistance).  The second-order transfer function ``eval_g0`` is
used only for controller tuning and its oscillation-period check; the
irrational plant/feedforward transfer functions are used for
frequency-domain analysis of the disturbance-cancellation identity.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

_POLE_TOL = 1e-9


@dataclass(frozen=True)
class LongitudinalParams:
    """Longitudinal plant constants.

    The default mass/spring pair gives a static gain mg/k = 6.54 and a
    natural period 2*pi*sqrt(m/k) = 5.13 s, the operating point used for
    the Ziegler-Nichols tuning.
    """

    mass: float = 20.0
    spring_k: float = 30.0
    aero_coeff: float = 0.5
    gravity: float = 9.81
    drive_force_limit: float = 200.0

    def __post_init__(self):
        for name in ("mass", "spring_k", "aero_coeff", "gravity"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be strictly positive")


@dataclass(frozen=True)
class DisturbanceState:
    """Road grade (rad) and wind speed (m/s) at the current position."""

    road_grade: float = 0.0
    wind_speed: float = 0.0

    def __post_init__(self):
        if abs(self.road_grade) >= math.pi / 2.0:
            raise ValueError("road_grade must lie in (-pi/2, pi/2)")


@dataclass(frozen=True)
class ForceBreakdown:
    """Drive, aerodynamic, and grade forces acting on the chassis, N."""

    drive: float
    aero: float
    grade: float


def grade_force(dist: DisturbanceState, p: LongitudinalParams) -> float:
    """Gravity component along the road slope, m*g*sin(grade)."""
    return p.mass * p.gravity * math.sin(dist.road_grade)


def aero_force(v: float, dist: DisturbanceState, p: LongitudinalParams) -> float:
    """Aerodynamic drag, signed so a tailwind faster than the robot pushes it.

    The quadratic law is kept for v > v_w; the signed extension
    sign(v - v_w) * c_a * (v - v_w)^2 fixes the direction for the tailwind
    case, which the unsigned square would get backwards.
    """
    rel = v - dist.wind_speed
    return math.copysign(p.aero_coeff * rel * rel, rel) if rel != 0.0 else 0.0


def longitudinal_accel(
    v: float, f_drive: float, dist: DisturbanceState, p: LongitudinalParams
) -> float:
    """Acceleration from the Newton balance, with drive-force saturation."""
    f_d = max(-p.drive_force_limit, min(p.drive_force_limit, f_drive))
    return (f_d - aero_force(v, dist, p) - grade_force(dist, p)) / p.mass


def force_breakdown(
    v: float, f_drive: float, dist: DisturbanceState, p: LongitudinalParams
) -> ForceBreakdown:
    f_d = max(-p.drive_force_limit, min(p.drive_force_limit, f_drive))
    return ForceBreakdown(
        drive=f_d, aero=aero_force(v, dist, p), grade=grade_force(dist, p)
    )


def eval_g0(p: LongitudinalParams, s: complex) -> complex:
    """Second-order tuning plant (mg/k) / ((m/k) s^2 + 1) at frequency s."""
    denom = (p.mass / p.spring_k) * s * s + 1.0
    if abs(denom) < _POLE_TOL:
        raise ValueError(f"s = {s} is a pole of the tuning plant")
    return (p.mass * p.gravity / p.spring_k) / denom


def eval_gp(p: LongitudinalParams, f_d_op: float, s: complex) -> complex:
    """Irrational linearized speed plant at drive-force operating point f_d_op.

    Uses the principal square-root branch; undefined at s = 0.
    """
    if s == 0:
        raise ValueError("speed plant is undefined at s = 0")
    root = cmath.sqrt(1.0 - p.mass * f_d_op / (s * p.aero_coeff))
    return (p.aero_coeff / p.mass) * (-1.0 + root)


def eval_gff(p: LongitudinalParams, f_d_op: float, s: complex) -> complex:
    """Ideal feedforward compensator -G0(s) / Gp(s), in closed form."""
    if s == 0:
        raise ValueError("feedforward compensator is undefined at s = 0")
    root = cmath.sqrt(1.0 - p.mass * f_d_op / (s * p.aero_coeff))
    denom = p.aero_coeff * (1.0 - root)
    if abs(denom) < _POLE_TOL:
        raise ValueError(f"speed plant vanishes at s = {s}")
    return (p.mass / denom) * eval_g0(p, s)
