"""Deterministic cruise-control and path-tracking simulation for a
four-wheeled mobile robot: kinematic models, disturbance dynamics, DC-motor
actuators, PID + feedforward longitudinal control, pure-pursuit lateral
control, and Ziegler-Nichols tuning."""

from .actuator import MotorParams, MotorState, gear_reduce, motor_derivatives, motor_steady_state
from .control import (
    FeedforwardConfig,
    PidController,
    PidGains,
    PidState,
    PursuitConfig,
    critical_params,
    feedforward_command,
    find_lookahead_point,
    lookahead_distance,
    pid_step,
    pure_pursuit_steering,
    zn_tune,
)
from .dynamics import (
    DisturbanceState,
    ForceBreakdown,
    LongitudinalParams,
    aero_force,
    eval_g0,
    eval_gff,
    eval_gp,
    grade_force,
    longitudinal_accel,
)
from .kinematics import (
    BicycleState,
    ChassisTwist,
    Pose,
    RobotGeometry,
    WheelSpeeds,
    bicycle_derivatives,
    constraint_residual,
    forward_kinematics,
    inverse_kinematics,
    turn_radius,
    unicycle_derivatives,
)
from .paths import Path, circle_path, lane_change_path, straight_path
from .sim import (
    ControllerSet,
    DisturbanceProfile,
    Metrics,
    RobotParams,
    Scenario,
    SimConfig,
    SimTrace,
    compute_metrics,
    cross_track_error,
    disturbance_at,
    hill_profile,
    integrate_step,
    run_scenario,
)

__version__ = "0.1.0"
