import dataclasses
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from roversim.kinematics import Pose, RobotGeometry, WheelSpeeds, constraint_residual, inverse_kinematics, unicycle_derivatives, ChassisTwist, normalize_angle
from roversim.paths import straight_path
from roversim.sim import (
    ControllerSet,
    DisturbanceProfile,
    Metrics,
    RobotParams,
    Scenario,
    SimConfig,
    SimTrace,
    TRACE_COLUMNS,
    compute_metrics,
    cross_track_error,
    disturbance_at,
    hill_profile,
    integrate_step,
    run_scenario,
)

ROBOT = RobotParams()
CTRL = ControllerSet()


class TestIntegrateStep:
    def test_zero_derivative(self):
        y = np.array([1.0, -2.0])
        out = integrate_step(y, lambda s: np.zeros(2), 0.1, "rk4")
        assert out == pytest.approx(y)

    @pytest.mark.parametrize("method", ["euler", "rk4"])
    def test_constant_derivative_exact(self, method):
        y = np.array([1.0, 2.0])
        c = np.array([3.0, -4.0])
        out = integrate_step(y, lambda s: c, 0.25, method)
        assert out == pytest.approx(y + 0.25 * c, rel=1e-15)

    def test_harmonic_oscillator_rk4_accuracy(self):
        def f(s):
            return np.array([s[1], -s[0]])

        y = np.array([1.0, 0.0])
        dt = 0.01
        for _ in range(int(round(2.0 * math.pi / dt))):
            y = integrate_step(y, f, dt, "rk4")
        # closed form: x(t) = cos(t), one full period back to (1, 0)
        assert abs(y[0] - math.cos(int(round(2.0 * math.pi / dt)) * dt)) < 1e-6

    def test_richardson_orders(self):
        # error vs closed form cos(1) halves like O(dt) for euler, O(dt^4) for rk4
        def f(s):
            return np.array([s[1], -s[0]])

        def final_error(dt, method):
            y = np.array([1.0, 0.0])
            n = int(round(1.0 / dt))
            for _ in range(n):
                y = integrate_step(y, f, dt, method)
            return abs(y[0] - math.cos(n * dt))

        r_euler = final_error(0.01, "euler") / final_error(0.005, "euler")
        r_rk4 = final_error(0.02, "rk4") / final_error(0.01, "rk4")
        assert 1.7 < r_euler < 2.3
        assert 12.0 < r_rk4 < 20.0

    def test_rejects_nonfinite(self):
        with pytest.raises(ValueError):
            integrate_step(np.array([1.0]), lambda s: np.array([math.nan]), 0.1, "rk4")

    def test_rejects_bad_dt(self):
        with pytest.raises(ValueError):
            integrate_step(np.array([1.0]), lambda s: s, 0.0, "rk4")


class TestDisturbanceAt:
    def test_flat(self):
        prof = DisturbanceProfile()
        for d in (0.0, 17.0, 1e4):
            assert disturbance_at(prof, d).road_grade == 0.0

    def test_midpoint_interpolation(self):
        prof = DisturbanceProfile(grade_breakpoints=((0.0, 0.0), (100.0, 0.0873)))
        assert disturbance_at(prof, 50.0).road_grade == pytest.approx(0.04365)

    def test_hold_past_end(self):
        prof = DisturbanceProfile(grade_breakpoints=((0.0, 0.0), (100.0, 0.0873)))
        assert disturbance_at(prof, 200.0).road_grade == pytest.approx(0.0873)

    def test_validation(self):
        with pytest.raises(ValueError):
            DisturbanceProfile(grade_breakpoints=((0.0, 0.0), (0.0, 0.1)))
        with pytest.raises(ValueError):
            DisturbanceProfile(grade_breakpoints=((0.0, 1.6),))


class TestCrossTrackError:
    PATH = straight_path(length=100.0)

    def test_on_path(self):
        assert cross_track_error(Pose(5.0, 0.0, 0.0), self.PATH) == 0.0

    def test_left_positive(self):
        assert cross_track_error(Pose(5.0, 1.0, 0.0), self.PATH) == pytest.approx(1.0)

    def test_right_negative(self):
        assert cross_track_error(Pose(5.0, -1.0, 0.0), self.PATH) == pytest.approx(-1.0)


class TestRunScenario:
    def test_zero_duration(self):
        sc = Scenario(reference_speed=5.0)
        tr = run_scenario(sc, ROBOT, CTRL, SimConfig(duration=0.0))
        assert len(tr) == 1
        assert tr["t"][0] == 0.0

    def test_trace_time_grid(self):
        cfg = SimConfig(dt=0.01, duration=1.0, log_decimation=10)
        tr = run_scenario(Scenario(reference_speed=2.0), ROBOT, CTRL, cfg)
        dts = np.diff(tr["t"])
        assert np.all(dts > 0)
        assert dts == pytest.approx(np.full(len(dts), 0.1), abs=1e-12)

    def test_equilibrium_hold(self):
        # starting at the reference speed: the cold motor (zero current and
        # shaft speed) sags the speed at first, then the PID recovers it
        sc = Scenario(reference_speed=10.0, initial_speed=10.0)
        tr = run_scenario(sc, ROBOT, CTRL, SimConfig(dt=0.005, duration=30.0))
        m = compute_metrics(tr)
        assert m.settled
        assert abs(tr["e_v"][-1]) < 0.05 * 10.0

    def test_trim_start_is_exact_equilibrium(self):
        sc = Scenario(reference_speed=10.0, initial_speed=10.0, start_at_trim=True)
        tr = run_scenario(sc, ROBOT, CTRL, SimConfig(dt=0.005, duration=5.0))
        assert np.max(np.abs(tr["e_v"])) < 1e-9

    def test_determinism(self):
        sc = Scenario(reference_speed=5.0, disturbance=hill_profile())
        cfg = SimConfig(dt=0.005, duration=5.0)
        a = run_scenario(sc, ROBOT, CTRL, cfg)
        b = run_scenario(sc, ROBOT, CTRL, cfg)
        assert np.array_equal(a.data, b.data)

    def test_coast_decay(self):
        # everything off and zero command: aero drag bleeds speed monotonically
        sc = Scenario(reference_speed=0.0, initial_speed=8.0, pid_on=False, ff_on=False)
        tr = run_scenario(sc, ROBOT, CTRL, SimConfig(dt=0.005, duration=10.0))
        v = tr["v"]
        assert np.all(np.diff(v) < 0)
        assert v[-1] < 8.0

    def test_ff_reduces_hill_peak_error(self):
        sc = Scenario(
            reference_speed=10.0, initial_speed=10.0, start_at_trim=True,
            disturbance=hill_profile(),
        )
        cfg = SimConfig(dt=0.005, duration=45.0)
        peak_on = compute_metrics(run_scenario(sc, ROBOT, CTRL, cfg)).max_speed_error
        peak_off = compute_metrics(
            run_scenario(dataclasses.replace(sc, ff_on=False), ROBOT, CTRL, cfg)
        ).max_speed_error
        assert peak_on < peak_off

    def test_heading_normalized(self):
        sc = Scenario(
            reference_speed=3.0, initial_speed=3.0, pid_on=True, ff_on=False,
            steering_events=((0.0, 60.0, 0.5),),
        )
        tr = run_scenario(sc, ROBOT, CTRL, SimConfig(dt=0.005, duration=60.0))
        theta = tr["theta"]
        assert np.all(theta > -math.pi) and np.all(theta <= math.pi)

    def test_pursuit_requires_path(self):
        with pytest.raises(ValueError):
            Scenario(pursuit_on=True, path=None)

    def test_speed_profile(self):
        sc = Scenario(reference_speed=0.0, speed_profile=((0.0, 2.0), (10.0, 4.0)))
        tr = run_scenario(sc, ROBOT, CTRL, SimConfig(dt=0.01, duration=10.0))
        assert tr["v_ref"][0] == pytest.approx(2.0)
        assert tr["v_ref"][-1] == pytest.approx(4.0, abs=1e-6)


def test_oscillator_amplitude_drift():
    # undamped tuning-plant oscillation: rk4 at 1 ms keeps the amplitude
    # (tracked through the conserved energy) within 0.1% per period
    m, k, g = 20.0, 30.0, 9.81
    x_eq = -m * g / k
    dt = 1e-3
    y = np.array([0.0, 0.0])

    def f(s):
        return np.array([s[1], -(k / m) * s[0] - g])

    def energy(s):
        return 0.5 * s[1] ** 2 + 0.5 * (k / m) * (s[0] - x_eq) ** 2

    e0 = energy(y)
    period = 2.0 * math.pi * math.sqrt(m / k)
    for _ in range(int(round(period / dt))):
        y = integrate_step(y, f, dt, "rk4")
    # amplitude ~ sqrt(energy), so 0.1% amplitude drift = 0.2% energy drift
    assert abs(math.sqrt(energy(y) / e0) - 1.0) < 1e-3


def test_constraint_residual_along_trajectory():
    # unicycle trajectory under time-varying commands: the pose rates stay
    # consistent with the wheel speeds they were generated from
    geom = RobotGeometry()
    pose = Pose(0.0, 0.0, 0.0)
    dt = 0.01
    worst = 0.0
    for step in range(3000):
        t = step * dt
        tw = ChassisTwist(2.0 + math.sin(0.5 * t), 0.8 * math.cos(0.3 * t))
        rates = unicycle_derivatives(pose, tw)
        ws = inverse_kinematics(tw, geom)
        worst = max(worst, max(abs(r) for r in constraint_residual(rates, pose.theta, ws, geom)))
        pose = Pose(
            pose.x + dt * rates[0],
            pose.y + dt * rates[1],
            normalize_angle(pose.theta + dt * rates[2]),
        )
    assert worst < 1e-9


class TestComputeMetrics:
    def _trace(self, rows):
        return SimTrace(data=np.array(rows))

    def _row(self, t, v=5.0, v_ref=5.0, cte=0.0):
        row = [0.0] * len(TRACE_COLUMNS)
        row[0], row[4], row[5], row[7] = t, v, v_ref, cte
        row[8] = v_ref - v
        return row

    def test_perfect_trace(self):
        tr = self._trace([self._row(t) for t in (0.0, 1.0, 2.0)])
        m = compute_metrics(tr)
        assert m.speed_rmse == 0.0 and m.max_speed_error == 0.0
        assert m.cte_rmse == 0.0 and m.max_cte == 0.0
        assert m.settled

    def test_two_row_rms(self):
        tr = self._trace([self._row(0.0, v=4.7), self._row(1.0, v=4.6)])
        m = compute_metrics(tr)
        # errors 0.3 and 0.4: rms = sqrt((0.09+0.16)/2)
        assert m.speed_rmse == pytest.approx(0.35355, abs=1e-5)
        assert m.max_speed_error == pytest.approx(0.4)

    def test_duplication_invariance(self):
        rows = [self._row(0.0, v=4.7), self._row(1.0, v=4.6)]
        doubled = [r for r in rows for _ in range(2)]
        m1 = compute_metrics(self._trace(rows))
        m2 = compute_metrics(self._trace(doubled))
        assert m1.speed_rmse == pytest.approx(m2.speed_rmse, rel=1e-12)

    def test_empty_trace(self):
        with pytest.raises(ValueError):
            compute_metrics(SimTrace(data=np.empty((0, len(TRACE_COLUMNS)))))

    def test_unsettled(self):
        tr = self._trace([self._row(t, v=3.0) for t in range(10)])
        assert not compute_metrics(tr).settled


def test_sim_config_validation():
    with pytest.raises(ValueError):
        SimConfig(dt=0.0)
    with pytest.raises(ValueError):
        SimConfig(duration=-1.0)
    with pytest.raises(ValueError):
        SimConfig(log_decimation=0)
    with pytest.raises(ValueError):
        SimConfig(integrator="rk45")
