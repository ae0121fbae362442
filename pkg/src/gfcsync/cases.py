"""The three reference grid events and the verdict expected in each feedback mode."""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

from .core import FeedbackMode, GfcParams, NetworkParams
from .scenario import PhaseJump, RocofRamp, VoltageDip, build_signal
from .simulator import SimConfig, Trajectory, run


@dataclass(frozen=True)
class ReferenceCase:
    name: str
    events: tuple
    p_set: float
    # expected verdict per mode: True = stays in synchronism
    expected_stable: dict

    def run(self, mode: FeedbackMode, params: GfcParams | None = None, network: NetworkParams | None = None,
            sim: SimConfig | None = None) -> Trajectory:
        params = GfcParams() if params is None else params
        network = NetworkParams() if network is None else network
        params = dataclasses.replace(params, p_set=self.p_set, feedback_mode=mode)
        signal = build_signal(self.events, network.f_nominal, network.vg_nominal)
        return run(signal, params, network, SimConfig(t_end=10.0) if sim is None else sim)


_LIMITED_FAILS = {FeedbackMode.MEASURED: False, FeedbackMode.VIRTUAL: True}

REFERENCE_CASES = (
    ReferenceCase("rocof", (RocofRamp(1.0, -1.0, 48.0),), 0.8, _LIMITED_FAILS),
    ReferenceCase("phase_jump", (PhaseJump(1.0, math.radians(40.0)),), 0.9, _LIMITED_FAILS),
    ReferenceCase("voltage_dip", (VoltageDip(1.0, 0.3, 0.5),), 0.8, _LIMITED_FAILS),
)
