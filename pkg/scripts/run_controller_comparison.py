#!/usr/bin/env python3
"""Cruise at 2.5 m/s with steering pulses, with and without the speed
controller, and report whether each run settles."""

import dataclasses

from roversim.sim import (
    ControllerSet,
    RobotParams,
    Scenario,
    SimConfig,
    compute_metrics,
    run_scenario,
)


def main():
    robot = RobotParams()
    controllers = ControllerSet()
    cfg = SimConfig(dt=0.002, duration=30.0)
    base = Scenario(
        reference_speed=2.5,
        ff_on=False,
        steering_events=((2.0, 4.0, 0.5), (8.0, 10.0, -0.5)),
    )
    for label, sc in (
        ("controllers on ", base),
        ("controllers off", dataclasses.replace(base, pid_on=False)),
    ):
        tr = run_scenario(sc, robot, controllers, cfg)
        m = compute_metrics(tr)
        print(f"{label}: final v = {tr['v'][-1]:.3f} m/s "
              f"(ref {sc.reference_speed}), settled = {m.settled}")


if __name__ == "__main__":
    main()
