"""
The lead-lag power controller at 40 microseconds
================================================

The power controller ``(K_pp s + K_ip) / (s + K_gp)`` runs on hardware at a
40 us sample time, discretized with the trapezoidal rule. Here it is compared
with the continuous controller on a unit step.
"""

import math

from gfcsync.control import ControllerState, derive_gains, steady_state_output, trapezoidal_step

w_b = 2 * math.pi * 50
gains = derive_gains(h=10.0, r_droop=0.05, zeta=0.4, omega_base=w_b, p_max=2.0)
print(gains)

# a unit step present from t = 0 is represented by last_error = 1
state = ControllerState(0.0, 1.0)
t_s = 40e-6
b = gains.k_ip - gains.k_pp * gains.k_gp
for n in range(1, 250_001):
    state, dw = trapezoidal_step(state, gains, 1.0, t_s)
    if n in (1, 1000, 25_000, 250_000):
        t = n * t_s
        exact = b / gains.k_gp * (1 - math.exp(-gains.k_gp * t)) + gains.k_pp
        print(f"t = {t:6.3f} s: discrete {dw:.9f} rad/s, continuous {exact:.9f} rad/s")

###############################################################################
# The droop gain fixes where the output settles: ``r_droop`` pu of speed per
# pu of power error.

print(f"settled: {steady_state_output(gains, 1.0) / w_b:.4f} pu speed per pu power")
