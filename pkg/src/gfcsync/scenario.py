"""Infinite-bus signals built from event lists.

The grid angle ``theta_g`` is measured in the frame rotating at nominal
frequency, so a grid at nominal frequency with no phase jump has
``theta_g = 0``. Every quantity is evaluated in closed form.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from typing import Sequence, Union


@dataclass(frozen=True)
class RocofRamp:
    """Linear frequency ramp at ``rate`` Hz/s from the present value to ``f_end`` Hz, then hold."""

    t_start: float
    rate: float
    f_end: float

    @property
    def time(self) -> float:
        return self.t_start


@dataclass(frozen=True)
class PhaseJump:
    """Grid phase step at ``t``. A positive ``delta_theta`` (rad) increases delta."""

    t: float
    delta_theta: float

    @property
    def time(self) -> float:
        return self.t


@dataclass(frozen=True)
class VoltageDip:
    t_start: float
    duration: float
    v_dip: float

    @property
    def time(self) -> float:
        return self.t_start


@dataclass(frozen=True)
class SetpointStep:
    t: float
    p_set_new: float

    @property
    def time(self) -> float:
        return self.t


Event = Union[RocofRamp, PhaseJump, VoltageDip, SetpointStep]


@dataclass(frozen=True)
class GridState:
    vg: float
    omega_g: float
    theta_g: float


class GridSignal:
    """Immutable map ``t -> (vg, omega_g [pu], theta_g [rad])`` plus setpoint steps.

    ``left=True`` evaluates the left limit at an event instant; the default is
    the right-continuous value.
    """

    def __init__(self, events: Sequence[Event], f_nominal: float = 50.0, vg_nominal: float = 1.0):
        if not f_nominal > 0:
            raise ValueError("f_nominal must be positive")
        self.f_nominal = f_nominal
        self.vg_nominal = vg_nominal
        self.events = tuple(sorted(events, key=lambda ev: ev.time))
        for ev in self.events:
            _validate(ev)

        # frequency: piecewise linear segments (t0, t1, f0, rate)
        self._ramps = []
        f_now = f_nominal
        t_free = -math.inf
        for ev in self.events:
            if not isinstance(ev, RocofRamp):
                continue
            if ev.t_start < t_free:
                raise ValueError(f"RoCoF ramp at t={ev.t_start} overlaps the previous ramp")
            df = ev.f_end - f_now
            if df != 0 and (ev.rate == 0 or math.copysign(1, df) != math.copysign(1, ev.rate)):
                raise ValueError(f"ramp rate {ev.rate} Hz/s never reaches f_end={ev.f_end} Hz from {f_now} Hz")
            dur = df / ev.rate if df != 0 else 0.0
            self._ramps.append((ev.t_start, ev.t_start + dur, f_now, ev.rate))
            f_now = ev.f_end
            t_free = ev.t_start + dur

        # angle at the start of each ramp and at its end, for closed-form evaluation
        self._ramp_theta = []
        theta = 0.0
        t_prev, f_prev = 0.0, f_nominal
        for t0, t1, f0, rate in self._ramps:
            theta += 2.0 * math.pi * (f_prev - f_nominal) * (t0 - t_prev)
            theta_end = theta + 2.0 * math.pi * ((f0 - f_nominal) * (t1 - t0) + 0.5 * rate * (t1 - t0) ** 2)
            self._ramp_theta.append((theta, theta_end))
            theta, t_prev, f_prev = theta_end, t1, f0 + rate * (t1 - t0)
        self._ramp_starts = [r[0] for r in self._ramps]

        self._jumps = [(ev.t, ev.delta_theta) for ev in self.events if isinstance(ev, PhaseJump)]
        self._dips = [(ev.t_start, ev.t_start + ev.duration, ev.v_dip) for ev in self.events if isinstance(ev, VoltageDip)]
        for (a0, a1, _), (b0, _, _) in zip(self._dips, self._dips[1:]):
            if b0 < a1:
                raise ValueError(f"voltage dips at t={a0} and t={b0} overlap")
        self._steps = [(ev.t, ev.p_set_new) for ev in self.events if isinstance(ev, SetpointStep)]

    @property
    def breakpoints(self) -> list[float]:
        """Instants where some signal is discontinuous or has a kink."""
        pts = set()
        for t0, t1, _, _ in self._ramps:
            pts.update((t0, t1))
        pts.update(t for t, _ in self._jumps)
        for t0, t1, _ in self._dips:
            pts.update((t0, t1))
        pts.update(t for t, _ in self._steps)
        return sorted(pts)

    def _freq_and_smooth_angle(self, t: float) -> tuple[float, float]:
        k = bisect.bisect_right(self._ramp_starts, t) - 1
        if k < 0:
            return self.f_nominal, 0.0
        t0, t1, f0, rate = self._ramps[k]
        th0, th1 = self._ramp_theta[k]
        if t <= t1:
            tau = t - t0
            return f0 + rate * tau, th0 + 2.0 * math.pi * ((f0 - self.f_nominal) * tau + 0.5 * rate * tau * tau)
        f1 = f0 + rate * (t1 - t0)
        return f1, th1 + 2.0 * math.pi * (f1 - self.f_nominal) * (t - t1)

    def at(self, t: float, left: bool = False) -> GridState:
        f, theta = self._freq_and_smooth_angle(t)
        for tj, dth in self._jumps:
            if tj < t or (tj == t and not left):
                theta -= dth
        vg = self.vg_nominal
        for t0, t1, v in self._dips:
            if (t0 <= t < t1) if not left else (t0 < t <= t1):
                vg = v
        return GridState(vg, f / self.f_nominal, theta)

    def __call__(self, t: float, left: bool = False) -> tuple[float, float, float]:
        s = self.at(t, left)
        return s.vg, s.omega_g, s.theta_g

    def setpoint(self, t: float, p_default: float, left: bool = False) -> float:
        p = p_default
        for ts, pn in self._steps:
            if ts < t or (ts == t and not left):
                p = pn
        return p


def _validate(ev: Event) -> None:
    if ev.time < 0:
        raise ValueError(f"event time must be non-negative: {ev!r}")
    if isinstance(ev, VoltageDip):
        if not ev.duration > 0:
            raise ValueError(f"dip duration must be positive: {ev!r}")
        if ev.v_dip < 0:
            raise ValueError(f"dip voltage must be non-negative: {ev!r}")


def build_signal(events: Sequence[Event], f_nominal: float = 50.0, vg_nominal: float = 1.0) -> GridSignal:
    return GridSignal(events, f_nominal, vg_nominal)
