#!/usr/bin/env python3
"""Cruise at 10 m/s over the hill profile with and without the grade
feedforward, and print the peak speed-error comparison."""

import dataclasses

from roversim.sim import (
    ControllerSet,
    RobotParams,
    Scenario,
    SimConfig,
    compute_metrics,
    hill_profile,
    run_scenario,
)


def main():
    robot = RobotParams()
    controllers = ControllerSet()
    cfg = SimConfig(dt=0.002, duration=45.0)
    base = Scenario(
        reference_speed=10.0,
        initial_speed=10.0,
        start_at_trim=True,
        disturbance=hill_profile(),
    )
    for label, sc in (("FF on ", base), ("FF off", dataclasses.replace(base, ff_on=False))):
        m = compute_metrics(run_scenario(sc, robot, controllers, cfg))
        print(f"{label}: peak |e_v| = {m.max_speed_error:.4f} m/s, "
              f"rmse = {m.speed_rmse:.4f} m/s, settled = {m.settled}")


if __name__ == "__main__":
    main()
