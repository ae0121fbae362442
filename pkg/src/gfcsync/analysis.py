"""Stability margins: phase jump, RoCoF, critical clearing time, equal-area diagnostics.

Static margins come from the closed-form power-angle curves (virtual
resistance neglected). Dynamic margins come from bisection over full
simulations of the dq model. Bisection probes are independent runs evaluated
in a fixed order, so results are deterministic.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from typing import Callable, Optional

from scipy.integrate import quad
from scipy.optimize import brentq

from .core import FeedbackMode, GfcParams, NetworkParams
from .electrical import InfeasibleSetpoint, curve_peak, solve_equilibria, static_curve
from .scenario import PhaseJump, RocofRamp, VoltageDip, build_signal
from .simulator import SimConfig, run

EVENT_TIME = 1.0
PROBE_HORIZON = 5.0


@dataclass(frozen=True)
class EqualAreaResult:
    a_accelerating: float
    a_decelerating: float
    delta0: float
    delta_unstable: float

    @property
    def stable(self) -> bool:
        return self.a_decelerating >= self.a_accelerating


@dataclass(frozen=True)
class CctResult:
    """Critical clearing time. ``status`` is ``"ok"``, ``"sustained"`` (stable for
    every probed duration, ``cct = inf``) or ``"unstable_at_zero"`` (``cct = 0``)."""

    cct: float
    status: str = "ok"


@dataclass(frozen=True)
class MarginReport:
    mode: FeedbackMode
    p_set: float
    delta_margin_static: float
    delta_margin_dynamic: Optional[float]
    rocof_max_static: float
    rocof_max_dynamic: Optional[float]
    cct: Optional[CctResult]
    eac: Optional[EqualAreaResult]

    def rows(self) -> list[tuple[str, str, float, str]]:
        """``(mode, margin, value, unit)`` rows, angles in degrees."""
        m = self.mode.value
        out = [(m, "phase_jump_static", math.degrees(self.delta_margin_static), "deg")]
        if self.delta_margin_dynamic is not None:
            out.append((m, "phase_jump_dynamic", math.degrees(self.delta_margin_dynamic), "deg"))
        out.append((m, "rocof_static", self.rocof_max_static, "Hz/s"))
        if self.rocof_max_dynamic is not None:
            out.append((m, "rocof_dynamic", self.rocof_max_dynamic, "Hz/s"))
        if self.cct is not None:
            out.append((m, "cct", self.cct.cct, "s"))
        if self.eac is not None:
            out.append((m, "eac_accelerating_area", self.eac.a_accelerating, "pu*rad"))
            out.append((m, "eac_decelerating_area", self.eac.a_decelerating, "pu*rad"))
        return out


def _mode(params: GfcParams, mode) -> FeedbackMode:
    return params.feedback_mode if mode is None else FeedbackMode(mode)


def deceleration_power(h: float, f_nominal: float, rocof: float, r_droop: float = 0.0, delta_omega_pu: float = 0.0) -> float:
    """Extra output (pu) the virtual rotor needs to follow a grid ramp of ``rocof`` Hz/s.

    The droop share is ``-delta_omega_pu / r_droop``: a falling frequency raises
    the output, as the lead-lag settles to ``delta_omega = r_droop * error``.
    """
    p = -2.0 * h / f_nominal * rocof
    if r_droop > 0:
        p -= delta_omega_pu / r_droop
    return p


def find_equilibria(
    p_set: float, params: GfcParams, network: NetworkParams, mode=None, vg: float | None = None, limited: bool = True
) -> tuple[float, Optional[float]]:
    """Stable and unstable equilibria of the static curve; ``limited=False`` drops the limiter."""
    mode = _mode(params, mode)
    if not limited:
        params = dataclasses.replace(params, i_lim=math.inf)
    power, cands = static_curve(params, network, mode, vg)
    stable, unstable, _ = solve_equilibria(power, p_set, cands, context=f"{mode.value} static curve")
    return stable, unstable


def static_peak(params: GfcParams, network: NetworkParams, mode=None, vg: float | None = None) -> float:
    power, cands = static_curve(params, network, _mode(params, mode), vg)
    return curve_peak(power, cands)[1]


def _bisect(is_stable: Callable[[float], bool], lo: float, hi: float, resolution: float) -> float:
    """Largest value in ``[lo, hi]`` known stable, to ``resolution``; ``hi`` if stable there."""
    if is_stable(hi):
        return hi
    while hi - lo > resolution:
        mid = 0.5 * (lo + hi)
        if is_stable(mid):
            lo = mid
        else:
            hi = mid
    return lo


def _probe(events, params, network, mode, t_end, dt):
    t_end = math.ceil(t_end / dt) * dt
    sim = SimConfig(t_end=round(t_end, 9), dt=dt, mode=mode, stop_on_loss=True)
    signal = build_signal(events, network.f_nominal, network.vg_nominal)
    return run(signal, params, network, sim).verdict.stable


def max_phase_jump(
    p_set: float,
    params: GfcParams,
    network: NetworkParams,
    mode=None,
    use_simulation: bool = False,
    resolution: float = math.radians(0.1),
    dt: float = 1e-3,
) -> float:
    """Largest grid phase jump (rad) that keeps synchronism.

    The static value is the distance from the stable to the unstable
    equilibrium. The dynamic value bisects the jump size over simulations.
    """
    mode = _mode(params, mode)
    params = dataclasses.replace(params, p_set=p_set)
    if not use_simulation:
        stable, unstable = find_equilibria(p_set, params, network, mode)
        return (math.pi if unstable is None else unstable) - stable

    def ok(jump):
        return _probe([PhaseJump(EVENT_TIME, jump)], params, network, mode, EVENT_TIME + PROBE_HORIZON, dt)

    return _bisect(ok, 0.0, math.pi, resolution)


def max_rocof(
    p_set: float,
    params: GfcParams,
    network: NetworkParams,
    mode=None,
    h: float | None = None,
    r_droop: float | None = None,
    delta_f_hz: float = 2.0,
    use_simulation: bool = False,
    resolution: float = 0.01,
    rocof_upper: float = 10.0,
    dt: float = 1e-3,
) -> tuple[float, Optional[float]]:
    """Largest falling-frequency RoCoF magnitude (Hz/s) kept in synchronism.

    Returns ``(static, dynamic)``. The static value requires
    ``p_set + P_dec <= curve maximum``, with the droop share taken at the end
    of a ``delta_f_hz`` excursion. The dynamic value bisects the ramp rate of a
    simulated ``f_n -> f_n - delta_f_hz`` ramp; ``None`` unless requested.
    """
    mode = _mode(params, mode)
    overrides = {"p_set": p_set}
    if h is not None:
        overrides["h_inertia"] = h
    if r_droop is not None:
        overrides["r_droop"] = r_droop
    params = dataclasses.replace(params, **overrides)
    f_n = network.f_nominal

    droop_share = deceleration_power(params.h_inertia, f_n, 0.0, params.r_droop, -delta_f_hz / f_n)
    headroom = static_peak(params, network, mode) - p_set - droop_share
    static = max(0.0, headroom * f_n / (2.0 * params.h_inertia))
    if not use_simulation:
        return static, None

    def ok(rate):
        if rate <= 0:
            return True
        ramp = RocofRamp(EVENT_TIME, -rate, f_n - delta_f_hz)
        return _probe([ramp], params, network, mode, EVENT_TIME + delta_f_hz / rate + PROBE_HORIZON, dt)

    return static, _bisect(ok, 0.0, rocof_upper, resolution)


def critical_clearing_time(
    p_set: float,
    v_dip: float,
    params: GfcParams,
    network: NetworkParams,
    mode=None,
    t_max: float = 3.0,
    resolution: float = 1e-3,
    dt: float = 1e-3,
) -> CctResult:
    """Longest dip to ``v_dip`` after which synchronism is regained (bisection over simulations)."""
    if not 0.0 <= v_dip < network.vg_nominal:
        raise ValueError(f"v_dip must lie in [0, {network.vg_nominal}), got {v_dip}")
    mode = _mode(params, mode)
    params = dataclasses.replace(params, p_set=p_set)

    def ok(duration):
        events = [VoltageDip(EVENT_TIME, duration, v_dip)]
        return _probe(events, params, network, mode, EVENT_TIME + duration + PROBE_HORIZON, dt)

    try:
        if not ok(resolution):
            return CctResult(0.0, "unstable_at_zero")
    except InfeasibleSetpoint:
        return CctResult(0.0, "unstable_at_zero")
    if ok(t_max):
        return CctResult(math.inf, "sustained")
    return CctResult(_bisect(ok, resolution, t_max, resolution))


def equal_area(
    p_set: float,
    pre_curve: Callable[[float], float],
    fault_curve: Callable[[float], float],
    post_curve: Callable[[float], float],
    clearing_delta: float,
    breakpoints=(),
) -> EqualAreaResult:
    """Accelerating area under the fault curve versus decelerating area under the post-fault curve."""
    delta0, _, _ = solve_equilibria(pre_curve, p_set)
    _, delta_u, _ = solve_equilibria(post_curve, p_set)
    delta_u = math.pi if delta_u is None else delta_u
    if not delta0 - 1e-12 <= clearing_delta <= delta_u + 1e-12:
        raise ValueError(
            f"clearing angle {clearing_delta:.6g} outside [{delta0:.6g}, {delta_u:.6g}]"
        )

    def area(f, a, b):
        pts = [p for p in breakpoints if p is not None and a < p < b]
        return quad(f, a, b, points=pts or None, epsabs=1e-11, epsrel=1e-10, limit=200)[0] if b > a else 0.0

    a_acc = area(lambda d: p_set - fault_curve(d), delta0, clearing_delta)
    a_dec = area(lambda d: post_curve(d) - p_set, clearing_delta, delta_u)
    return EqualAreaResult(a_acc, a_dec, delta0, delta_u)


def critical_clearing_angle(
    p_set: float, pre_curve, fault_curve, post_curve, breakpoints=()
) -> float:
    """Clearing angle at which accelerating and decelerating areas are equal."""
    delta0, _, _ = solve_equilibria(pre_curve, p_set)
    _, delta_u, _ = solve_equilibria(post_curve, p_set)
    delta_u = math.pi if delta_u is None else delta_u

    def g(dc):
        r = equal_area(p_set, pre_curve, fault_curve, post_curve, dc, breakpoints)
        return r.a_decelerating - r.a_accelerating

    if g(delta0) < 0:
        return delta0
    return brentq(g, delta0, delta_u, xtol=1e-12)


def dip_equal_area(
    p_set: float, v_dip: float, clearing_delta: float, params: GfcParams, network: NetworkParams, mode=None
) -> EqualAreaResult:
    """Equal-area bookkeeping for a dip on the static curves of ``mode``."""
    mode = _mode(params, mode)
    pre, c_pre = static_curve(params, network, mode)
    fault, c_fault = static_curve(params, network, mode, v_dip)
    return equal_area(p_set, pre, fault, pre, clearing_delta, breakpoints=(*c_pre, *c_fault))


def margin_report(
    p_set: float,
    params: GfcParams,
    network: NetworkParams,
    mode=None,
    v_dip: float = 0.5,
    dip_duration: float = 0.3,
    delta_f_hz: float = 2.0,
    use_simulation: bool = True,
) -> MarginReport:
    mode = _mode(params, mode)
    params = dataclasses.replace(params, p_set=p_set, feedback_mode=mode)
    static_jump = max_phase_jump(p_set, params, network, mode)
    rocof_static, rocof_dyn = max_rocof(p_set, params, network, mode, delta_f_hz=delta_f_hz, use_simulation=use_simulation)
    dyn_jump = cct = eac = None
    if use_simulation:
        dyn_jump = max_phase_jump(p_set, params, network, mode, use_simulation=True)
        cct = critical_clearing_time(p_set, v_dip, params, network, mode)
        # clearing angle reached by the simulated converter at the end of the dip
        sig = build_signal([VoltageDip(EVENT_TIME, dip_duration, v_dip)], network.f_nominal, network.vg_nominal)
        t_clear = EVENT_TIME + dip_duration
        traj = run(sig, params, network, SimConfig(t_end=round(math.ceil(t_clear / 1e-3) * 1e-3, 9), mode=mode))
        try:
            eac = dip_equal_area(p_set, v_dip, float(traj.delta[-1]), params, network, mode)
        except ValueError:
            eac = None  # rotor already past the post-fault unstable equilibrium
    return MarginReport(mode, p_set, static_jump, dyn_jump, rocof_static, rocof_dyn, cct, eac)
