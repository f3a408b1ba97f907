"""DC motor model with gear reduction.

One parameter set serves both the drive and steering actuators.  The
armature circuit and the shaft mechanics are the two ODE states; the gear
stage is a pure speed ratio.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class MotorParams:
    """Electrical and mechanical motor constants.

    Defaults are the reference motor: r = 0.8 ohm, L = 0.011 H,
    J = 0.2 kg m^2, k = k_b = 0.4, N = 31.4.  The damping coefficient has
    no catalog value; 0.05 N m s/rad keeps the no-load speed finite.
    """

    resistance: float = 0.8
    inductance: float = 0.011
    inertia: float = 0.2
    torque_const: float = 0.4
    emf_const: float = 0.4
    gear_ratio: float = 31.4
    damping: float = 0.05
    voltage_limit: float = 12.0

    def __post_init__(self):
        for name in (
            "resistance",
            "inductance",
            "inertia",
            "torque_const",
            "emf_const",
            "gear_ratio",
            "damping",
            "voltage_limit",
        ):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be strictly positive")


@dataclass(frozen=True)
class MotorState:
    """Armature current (A) and shaft speed (rad/s)."""

    current: float = 0.0
    shaft_speed: float = 0.0


def clamp_voltage(u: float, p: MotorParams) -> float:
    return max(-p.voltage_limit, min(p.voltage_limit, u))


def motor_derivatives(
    st: MotorState, u: float, tau_load: float, p: MotorParams
) -> tuple[float, float]:
    """(di/dt, domega/dt) under applied voltage u and load torque tau_load."""
    u_eff = clamp_voltage(u, p)
    di_dt = (u_eff - p.resistance * st.current - p.emf_const * st.shaft_speed) / p.inductance
    domega_dt = (
        p.torque_const * st.current - p.damping * st.shaft_speed - tau_load
    ) / p.inertia
    return (di_dt, domega_dt)


def motor_torque(st: MotorState, p: MotorParams) -> float:
    return p.torque_const * st.current


def motor_steady_state(u: float, tau_load: float, p: MotorParams) -> tuple[float, float]:
    """Analytic fixed point (i_ss, omega_ss) of the motor ODEs."""
    u_eff = clamp_voltage(u, p)
    denom = p.torque_const * p.emf_const + p.resistance * p.damping
    omega_ss = (p.torque_const * u_eff - p.resistance * tau_load) / denom
    i_ss = (u_eff - p.emf_const * omega_ss) / p.resistance
    return (i_ss, omega_ss)


def gear_reduce(omega_m: float, p: MotorParams) -> float:
    """Motor shaft speed -> output (wheel) speed through the gear stage."""
    return omega_m / p.gear_ratio
