#!/usr/bin/env python3
"""Print the ultimate gain/period of the default plant and the resulting
controller gains for every row of the tuning table."""

from roversim.control import critical_params, zn_tune
from roversim.dynamics import LongitudinalParams


def main():
    k_u, t_u = critical_params(LongitudinalParams())
    print(f"k_U = {k_u:.4f}, T_U = {t_u:.4f} s")
    for kind in ("P", "PI", "PD", "PID"):
        t = zn_tune(k_u, t_u, kind)
        extras = []
        if t.t_i is not None:
            extras.append(f"T_I = {t.t_i:.4f}")
        if t.t_d is not None:
            extras.append(f"T_D = {t.t_d:.4f}")
        suffix = f" ({', '.join(extras)})" if extras else ""
        print(f"{kind:>3}: kp = {t.gains.kp:.4f}, ki = {t.gains.ki:.4f}, "
              f"kd = {t.gains.kd:.4f}{suffix}")


if __name__ == "__main__":
    main()
