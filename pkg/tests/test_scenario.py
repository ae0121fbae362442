import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import trapezoid

from gfcsync.scenario import PhaseJump, RocofRamp, SetpointStep, VoltageDip, build_signal

W_B = 2 * math.pi * 50


def test_empty_signal():
    sig = build_signal([])
    for t in (0.0, 1.0, 123.4):
        assert sig(t) == (1.0, 1.0, 0.0)
    assert sig.breakpoints == []


def test_rocof_reference():
    sig = build_signal([RocofRamp(0.0, -1.0, 48.0)])
    assert sig.at(1.0).omega_g == pytest.approx(0.98, abs=1e-15)
    assert sig.at(2.0).omega_g == pytest.approx(0.96, abs=1e-15)
    assert sig.at(5.0).omega_g == pytest.approx(0.96, abs=1e-15)
    assert sig.breakpoints == [0.0, 2.0]
    # within the ramp: theta = w_B * (rate_pu t^2 / 2) in the nominal frame
    assert sig.at(1.5).theta_g == pytest.approx(W_B * (-0.02 * 1.5 ** 2 / 2), abs=1e-12)


def test_phase_jump_reference():
    sig = build_signal([PhaseJump(1.0, math.radians(40))])
    before, after = sig.at(1.0, left=True).theta_g, sig.at(1.0).theta_g
    assert before - after == pytest.approx(0.6981, abs=1e-4)
    assert before - after == pytest.approx(math.radians(40), abs=1e-15)
    assert sig.at(0.999).theta_g == 0.0


def test_voltage_dip_left_and_right_limits():
    sig = build_signal([VoltageDip(1.0, 0.3, 0.5)], vg_nominal=1.0)
    assert sig.at(1.0, left=True).vg == 1.0
    assert sig.at(1.0).vg == 0.5
    assert sig.at(1.3, left=True).vg == 0.5
    assert sig.at(1.3).vg == 1.0
    assert sig.breakpoints == pytest.approx([1.0, 1.3])


def test_setpoint_step():
    sig = build_signal([SetpointStep(2.0, 0.5)])
    assert sig.setpoint(1.9, 0.8) == 0.8
    assert sig.setpoint(2.0, 0.8, left=True) == 0.8
    assert sig.setpoint(2.0, 0.8) == 0.5


@pytest.mark.parametrize(
    "events",
    [
        [VoltageDip(1.0, 0.3, 0.5), VoltageDip(1.2, 0.3, 0.7)],
        [VoltageDip(1.0, 0.0, 0.5)],
        [PhaseJump(-0.1, 0.1)],
        [RocofRamp(1.0, -1.0, 48.0), RocofRamp(2.0, 1.0, 50.0)],
        [RocofRamp(1.0, 1.0, 48.0)],
    ],
)
def test_invalid_event_lists(events):
    with pytest.raises(ValueError):
        build_signal(events)


def test_events_are_sorted():
    sig = build_signal([PhaseJump(2.0, 0.1), PhaseJump(1.0, 0.2)])
    assert [ev.time for ev in sig.events] == [1.0, 2.0]


ramp = st.tuples(st.floats(0.0, 3.0), st.floats(0.2, 3.0), st.floats(-2.0, 2.0).filter(lambda x: abs(x) > 0.05))


@settings(max_examples=40, deadline=None)
@given(ramp, st.floats(0.0, 4.0), st.floats(0.1, 4.0))
def test_theta_is_integral_of_frequency(r, t1, span):
    t_start, rate, df = r
    sig = build_signal([RocofRamp(t_start, math.copysign(rate, df), 50.0 + df), PhaseJump(100.0, 1.0)])
    t2 = t1 + span
    # include the kinks so the trapezoid rule is exact up to rounding
    grid = np.union1d(np.linspace(t1, t2, 4001), [b for b in sig.breakpoints if t1 < b < t2])
    w = np.array([sig.at(t).omega_g for t in grid])
    expected = W_B * trapezoid(w - 1.0, grid)
    assert sig.at(t2).theta_g - sig.at(t1).theta_g == pytest.approx(expected, abs=1e-9)


def test_theta_continuous_without_jumps():
    sig = build_signal([RocofRamp(1.0, -1.0, 48.0), VoltageDip(4.0, 0.3, 0.5)])
    for b in sig.breakpoints:
        assert sig.at(b, left=True).theta_g == pytest.approx(sig.at(b).theta_g, abs=1e-12)
