import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from roversim.kinematics import (
    BicycleState,
    ChassisTwist,
    Pose,
    RobotGeometry,
    WheelSpeeds,
    bicycle_derivatives,
    constraint_residual,
    forward_kinematics,
    inverse_kinematics,
    normalize_angle,
    turn_radius,
    unicycle_derivatives,
)

GEOM = RobotGeometry(wheel_radius=0.1, half_track=0.25, wheelbase=1.0)

finite = st.floats(min_value=-50.0, max_value=50.0, allow_nan=False)
angles = st.floats(min_value=-10.0, max_value=10.0, allow_nan=False)


class TestForwardKinematics:
    def test_rest(self):
        tw = forward_kinematics(WheelSpeeds(0.0, 0.0), GEOM)
        assert tw.v == 0.0 and tw.omega == 0.0

    def test_straight(self):
        tw = forward_kinematics(WheelSpeeds(10.0, 10.0), GEOM)
        assert tw.v == pytest.approx(1.0)
        assert tw.omega == 0.0

    def test_spin_in_place(self):
        tw = forward_kinematics(WheelSpeeds(10.0, -10.0), GEOM)
        assert tw.v == 0.0
        assert tw.omega == pytest.approx(4.0)


class TestInverseKinematics:
    def test_rest(self):
        ws = inverse_kinematics(ChassisTwist(0.0, 0.0), GEOM)
        assert ws.right == 0.0 and ws.left == 0.0

    def test_straight(self):
        ws = inverse_kinematics(ChassisTwist(1.0, 0.0), GEOM)
        assert ws.right == pytest.approx(10.0)
        assert ws.left == pytest.approx(10.0)

    def test_exact_inverse(self):
        tw = ChassisTwist(2.0, 1.5)
        back = forward_kinematics(inverse_kinematics(tw, GEOM), GEOM)
        assert back.v == pytest.approx(tw.v, abs=1e-12)
        assert back.omega == pytest.approx(tw.omega, abs=1e-12)

    def test_round_trip_grid(self):
        for v in np.linspace(-5.0, 5.0, 41):
            for omega in np.linspace(-4.0, 4.0, 41):
                tw = ChassisTwist(v, omega)
                back = forward_kinematics(inverse_kinematics(tw, GEOM), GEOM)
                assert abs(back.v - v) < 1e-12
                assert abs(back.omega - omega) < 1e-12

    @given(right=finite, left=finite)
    def test_inverse_of_forward(self, right, left):
        ws = WheelSpeeds(right, left)
        back = inverse_kinematics(forward_kinematics(ws, GEOM), GEOM)
        assert back.right == pytest.approx(right, abs=1e-9)
        assert back.left == pytest.approx(left, abs=1e-9)


class TestUnicycleDerivatives:
    def test_aligned_with_x(self):
        assert unicycle_derivatives(Pose(0, 0, 0.0), ChassisTwist(1.0, 0.0)) == (1.0, 0.0, 0.0)

    def test_heading_up(self):
        xd, yd, td = unicycle_derivatives(Pose(0, 0, math.pi / 2), ChassisTwist(2.0, 0.5))
        assert xd == pytest.approx(0.0, abs=1e-15)
        assert yd == pytest.approx(2.0)
        assert td == 0.5

    @given(theta=angles, v=finite, omega=finite)
    def test_speed_identity(self, theta, v, omega):
        xd, yd, _ = unicycle_derivatives(Pose(0, 0, theta), ChassisTwist(v, omega))
        assert xd * xd + yd * yd == pytest.approx(v * v, rel=1e-9, abs=1e-9)


class TestBicycleDerivatives:
    def test_straight(self):
        s = BicycleState(Pose(0, 0, 0.0), delta=0.0)
        rates = bicycle_derivatives(s, 1.0, 0.3, GEOM)
        assert rates == (1.0, 0.0, 0.0, 0.3)

    def test_quarter_radian_steer(self):
        s = BicycleState(Pose(0, 0, 0.0), delta=math.pi / 4)
        _, _, thetadot, _ = bicycle_derivatives(s, 2.0, 0.0, GEOM)
        assert thetadot == pytest.approx(2.0)

    def test_singularity(self):
        s = BicycleState(Pose(0, 0, 0.0), delta=math.pi / 2)
        with pytest.raises(ValueError):
            bicycle_derivatives(s, 1.0, 0.0, GEOM)

    @given(
        theta=angles,
        delta=st.floats(min_value=-1.4, max_value=1.4),
        v=finite,
    )
    def test_yaw_rate_identity(self, theta, delta, v):
        s = BicycleState(Pose(0, 0, theta), delta=delta)
        _, _, thetadot, _ = bicycle_derivatives(s, v, 0.0, GEOM)
        assert thetadot * GEOM.wheelbase == pytest.approx(v * math.tan(delta), rel=1e-12, abs=1e-12)

    @given(delta=st.floats(min_value=1e-3, max_value=0.6), v=st.floats(min_value=0.1, max_value=20.0))
    def test_heading_rate_sign_follows_steering(self, delta, v):
        s = BicycleState(Pose(0, 0, 0.0), delta=delta)
        _, _, thetadot, _ = bicycle_derivatives(s, v, 0.0, GEOM)
        assert thetadot > 0.0
        s_neg = BicycleState(Pose(0, 0, 0.0), delta=-delta)
        _, _, thetadot_neg, _ = bicycle_derivatives(s_neg, v, 0.0, GEOM)
        assert thetadot_neg < 0.0


class TestConstraintResidual:
    def test_consistent_motion(self):
        tw = ChassisTwist(1.7, -0.9)
        theta = 0.8
        rates = unicycle_derivatives(Pose(0, 0, theta), tw)
        ws = inverse_kinematics(tw, GEOM)
        for r in constraint_residual(rates, theta, ws, GEOM):
            assert abs(r) < 1e-12

    def test_lateral_slip_detected(self):
        # pure lateral body velocity at theta=0 shows up in the first row
        residuals = constraint_residual((0.0, 0.1, 0.0), 0.0, WheelSpeeds(0.0, 0.0), GEOM)
        assert residuals[0] == pytest.approx(0.1)

    @given(theta=angles, v=finite, omega=finite, rot=angles)
    def test_rotation_invariance(self, theta, v, omega, rot):
        tw = ChassisTwist(v, omega)
        ws = inverse_kinematics(tw, GEOM)
        rates = unicycle_derivatives(Pose(0, 0, theta), tw)
        r_base = constraint_residual(rates, theta, ws, GEOM)
        c, s = math.cos(rot), math.sin(rot)
        rot_rates = (
            c * rates[0] - s * rates[1],
            s * rates[0] + c * rates[1],
            rates[2],
        )
        r_rot = constraint_residual(rot_rates, theta + rot, ws, GEOM)
        for a, b in zip(r_base, r_rot):
            assert a == pytest.approx(b, abs=1e-9)


class TestTurnRadius:
    def test_unit(self):
        assert turn_radius(math.pi / 4, 1.0) == pytest.approx(1.0)

    def test_straight_is_infinite(self):
        assert math.isinf(turn_radius(0.0, 1.0))

    def test_inverse_of_formula(self):
        assert turn_radius(math.atan(0.2), 1.0) == pytest.approx(5.0)

    @given(delta=st.floats(min_value=1e-6, max_value=0.6))
    def test_radius_tan_identity(self, delta):
        assert turn_radius(delta, GEOM.wheelbase) * math.tan(delta) == pytest.approx(
            GEOM.wheelbase, rel=1e-12
        )


class TestNormalizeAngle:
    @given(angle=st.floats(min_value=-100.0, max_value=100.0))
    def test_range(self, angle):
        w = normalize_angle(angle)
        assert -math.pi < w <= math.pi

    @given(angle=st.floats(min_value=-100.0, max_value=100.0))
    def test_same_direction(self, angle):
        w = normalize_angle(angle)
        assert math.cos(w) == pytest.approx(math.cos(angle), abs=1e-9)
        assert math.sin(w) == pytest.approx(math.sin(angle), abs=1e-9)


def test_geometry_validation():
    with pytest.raises(ValueError):
        RobotGeometry(wheel_radius=0.0)
    with pytest.raises(ValueError):
        RobotGeometry(half_track=-1.0)
