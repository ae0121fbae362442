"""
Power-angle curves with a circular current limit
=================================================

A grid-forming converter behind 0.5 pu of total reactance can push 2 pu
towards a stiff grid when nothing limits its current. A circular limiter at
1.1 pu cuts that curve down hard, and the peak moves to the angle where the
limiter first engages.
"""

import math

import numpy as np

from gfcsync import FeedbackMode, GfcParams, NetworkParams
from gfcsync.analysis import find_equilibria
from gfcsync.electrical import sweep_curves

params, net = GfcParams(), NetworkParams()
curve = sweep_curves(params, net)

###############################################################################
# The limiter engages where the chord between the two voltage phasors reaches
# ``i_lim * X_T``. Beyond that angle the measured power follows
# ``i_lim * E * cos(delta / 2)`` and falls off.

print(f"limiter engages at {math.degrees(curve.activation_delta):.2f} deg")
for name, p in (("unlimited", curve.p_unlimited), ("limited", curve.p_limited), ("virtual", curve.p_virtual)):
    k = int(np.argmax(p))
    print(f"{name:>9}: peak {p[k]:.4f} pu at {math.degrees(curve.deltas[k]):6.2f} deg")

###############################################################################
# At 0.9 pu loading the unstable equilibrium on the limited curve sits close
# to the stable one. The virtual-power curve keeps rising past the limit, so
# its unstable point moves far out.

for mode in FeedbackMode:
    s, u = find_equilibria(0.9, params, net, mode)
    print(f"{mode.value:>9}: stable {math.degrees(s):6.2f} deg, unstable {math.degrees(u):6.2f} deg")

###############################################################################
# A grid voltage of 0.5 pu halves the unlimited curve, and the limited
# curve shrinks with it.

dip = sweep_curves(params, net, vg=0.5)
print(f"vg = 0.5: unlimited peak {dip.p_unlimited.max():.3f} pu, limited peak {dip.p_limited.max():.3f} pu")
