"""
Three grid events, two feedback choices
=======================================

The converter runs at 0.8 or 0.9 pu and meets a 1 Hz/s frequency ramp, a
40 degree phase jump and a 0.3 s dip to half voltage. Feeding back the
measured power loses synchronism every time. Feeding back the power computed
from the unsaturated current reference rides through.
"""

import math

import numpy as np

from gfcsync import FeedbackMode
from gfcsync.cases import REFERENCE_CASES

for case in REFERENCE_CASES:
    for mode in FeedbackMode:
        traj = case.run(mode)
        peak = math.degrees(np.max(traj.delta))
        frac = traj.limited.mean()
        print(f"{case.name:<12} {mode.value:<9} {str(traj.verdict):<22} "
              f"peak angle {peak:8.1f} deg, limited {100 * frac:5.1f} % of the time")

###############################################################################
# During the ramp the virtual rotor has to shed 2 H / f_n per Hz/s of
# frequency slope, 0.4 pu here. With virtual feedback that extra power is
# "available" because the virtual curve is not capped by the limiter.

traj = REFERENCE_CASES[0].run(FeedbackMode.VIRTUAL)
k = np.searchsorted(traj.t, 2.9)
print(f"virtual power near the end of the ramp: {traj.p_virt[k]:.3f} pu "
      f"(measured {traj.p_pcc[k]:.3f} pu, limiter factor {traj.kc_lim[k]:.2f})")
