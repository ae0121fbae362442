"""Quasi-static electrical layer: virtual admittance, circular current limiter, power-angle curves.

Two evaluation paths are provided.

* Closed forms (``measured_power``, ``virtual_power``, ``sweep_curves``,
  ``static_power``) neglect the virtual resistance. They are the power-angle
  algebra used for static margins and equal-area diagnostics.
* ``operating_point`` solves the dq virtual-admittance / limiter loop with the
  virtual resistance included. The simulator uses it. For ``r_v = 0`` it
  reproduces the closed forms to rounding.

In the virtual-power closed forms, ``x_ext`` is the reactance outside the
virtual impedance (transformer plus grid); ``x_total = x_v + x_ext``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .core import DqVector, FeedbackMode, GfcParams, NetworkParams, chord_length, magnitude


class InfeasibleSetpoint(ValueError):
    """Setpoint above the maximum of the power-angle curve."""

    def __init__(self, p_set: float, p_max: float, context: str = ""):
        self.p_set = p_set
        self.p_max = p_max
        msg = f"setpoint {p_set:.6g} pu exceeds the curve maximum {p_max:.6g} pu"
        super().__init__(f"{msg} ({context})" if context else msg)


@dataclass(frozen=True)
class OperatingPoint:
    delta: float
    p_pcc: float
    q_pcc: float
    p_virt: float
    i_mag_unsat: float
    i_mag_actual: float
    kc_lim: float
    limited: bool

    def feedback(self, mode: FeedbackMode) -> float:
        return self.p_virt if FeedbackMode(mode) is FeedbackMode.VIRTUAL else self.p_pcc


@dataclass(frozen=True)
class PowerAngleCurve:
    deltas: np.ndarray
    p_unlimited: np.ndarray
    p_limited: np.ndarray
    p_virtual: np.ndarray
    activation_delta: float | None


# --- dq-level building blocks ---------------------------------------------------


def unsaturated_current(e_mag: float, v_pcc: DqVector, r_v: float, x_v: float) -> DqVector:
    """Current reference ``(E - v_pcc) / (r_v + j x_v)`` with E on the d-axis."""
    z = complex(r_v, x_v)
    if z == 0:
        raise ValueError("virtual impedance must be non-zero")
    return DqVector.from_complex((e_mag - complex(v_pcc)) / z)


def apply_current_limit(i_ref: DqVector, i_lim: float) -> tuple[DqVector, float]:
    """Circular limiter: scale the reference down to ``i_lim``, keeping its angle."""
    if not i_lim > 0:
        raise ValueError(f"i_lim must be positive, got {i_lim}")
    kc = max(1.0, magnitude(i_ref) / i_lim)
    return DqVector(i_ref.d / kc, i_ref.q / kc), kc


def internal_impedance(kc_lim: float, r_v: float, x_v: float) -> tuple[float, float]:
    """Impedance seen behind the EMF while the limiter scales the reference by ``kc_lim``."""
    if kc_lim < 1:
        raise ValueError(f"kc_lim must be >= 1, got {kc_lim}")
    return kc_lim * r_v, kc_lim * x_v


def _solve(delta, vg, e, r_v, x_v, x_ext, i_lim):
    # converter frame: EMF on the d-axis, grid voltage at -delta
    cd = math.cos(delta)
    sd = math.sin(delta)
    g = complex(vg * cd, -vg * sd)
    dv = e - g
    i = dv / complex(r_v, x_v + x_ext)
    kc = 1.0
    if abs(i) > i_lim:
        # |dv| = i_lim * |kc (r_v + j x_v) + j x_ext|, quadratic in kc
        m = abs(dv) / i_lim
        a = r_v * r_v + x_v * x_v
        kc = (-x_v * x_ext + math.sqrt(x_v * x_v * x_ext * x_ext - a * (x_ext * x_ext - m * m))) / a
        i = dv / complex(kc * r_v, kc * x_v + x_ext)
    s = (g + 1j * x_ext * i) * i.conjugate()
    return s.real, s.imag, kc * s.real, kc, abs(i)


def operating_point(delta: float, vg: float, params: GfcParams, network: NetworkParams) -> OperatingPoint:
    """Solve the limiter/virtual-admittance loop at angle ``delta`` (r_v included).

    The saturated current and the PCC voltage are found together: the reference
    is computed from the PCC voltage, which itself depends on the injected
    current through ``x_ext``.
    """
    p, q, pv, kc, i_mag = _solve(delta, vg, params.e_mag, params.r_v, params.x_v, network.x_ext, params.i_lim)
    limited = kc > 1.0
    return OperatingPoint(
        delta=delta,
        p_pcc=p,
        q_pcc=q,
        p_virt=pv,
        i_mag_unsat=kc * i_mag,
        i_mag_actual=i_mag,
        kc_lim=kc,
        limited=limited,
    )


def feedback_function(params: GfcParams, network: NetworkParams, mode: FeedbackMode) -> Callable[[float, float], float]:
    """Fast ``(delta, vg) -> feedback power`` closure over the dq solve."""
    e, r_v, x_v, x_ext, i_lim = params.e_mag, params.r_v, params.x_v, network.x_ext, params.i_lim
    idx = 2 if FeedbackMode(mode) is FeedbackMode.VIRTUAL else 0

    def power(delta: float, vg: float) -> float:
        return _solve(delta, vg, e, r_v, x_v, x_ext, i_lim)[idx]

    return power


# --- closed-form power-angle algebra (r_v neglected) ------------------------------


def measured_power(delta: float, e: float, vg: float, x_total: float, i_lim: float) -> tuple[float, float, bool]:
    """Active and reactive power at the EMF with the circular limiter.

    Returns ``(p, q, limited)``. Under the limit both components are scaled by
    the same factor, since the limiter shrinks the whole current vector.
    """
    if not x_total > 0:
        raise ValueError(f"x_total must be positive, got {x_total}")
    sd = math.sin(delta)
    cd = math.cos(delta)
    mv = chord_length(e, vg, delta)
    if mv / x_total <= i_lim:
        return e * vg * sd / x_total, (e * e - e * vg * cd) / x_total, False
    return e * vg * sd / mv * i_lim, (e * e - e * vg * cd) / mv * i_lim, True


def limiter_activation_angle(e: float, vg: float, x_total: float, i_lim: float) -> float | None:
    """Smallest angle at which the unlimited current reaches ``i_lim``.

    Returns ``None`` when the limit is never reached on ``[0, pi]`` and ``0.0``
    when the current exceeds the limit already at ``delta = 0``.
    """
    if e <= 0 or vg <= 0:
        raise ValueError("voltages must be positive")
    c = (e * e + vg * vg - (i_lim * x_total) ** 2) / (2.0 * e * vg)
    if c < -1.0:
        return None
    if c > 1.0:
        return 0.0
    return math.acos(c)


def virtual_power(
    delta: float, e: float, vg: float, x_v: float, x_ext: float, i_lim: float
) -> tuple[float, float]:
    """Power computed from the unsaturated current reference; returns ``(p_virt, kc_lim)``."""
    if not (x_v > 0 and x_ext > 0):
        raise ValueError("x_v and x_ext must be positive")
    x_total = x_v + x_ext
    mv = chord_length(e, vg, delta)
    num = e * vg * math.sin(delta)
    if mv / x_total <= i_lim:
        return num / x_total, 1.0
    kc = (mv / i_lim - x_ext) / x_v
    if kc < 1.0:
        raise ValueError(f"inconsistent limiter state: saturated but kc_lim = {kc!r} < 1")
    return num / (x_v + x_ext / kc), kc


def virtual_power_saturated(delta: float, e: float, vg: float, x_v: float, x_ext: float, i_lim: float) -> float:
    """Saturated-branch virtual power written without the scaling factor."""
    mv = chord_length(e, vg, delta)
    return e * vg * math.sin(delta) * (1.0 - x_ext * i_lim / mv) / x_v


def static_power(delta: float, vg: float, params: GfcParams, network: NetworkParams, mode: FeedbackMode) -> float:
    """Closed-form feedback power of the chosen mode (r_v neglected)."""
    if FeedbackMode(mode) is FeedbackMode.VIRTUAL:
        return virtual_power(delta, params.e_mag, vg, params.x_v, network.x_ext, params.i_lim)[0]
    return measured_power(delta, params.e_mag, vg, network.x_total(params.x_v), params.i_lim)[0]


def sweep_curves(params: GfcParams, network: NetworkParams, vg: float | None = None, n_points: int = 721) -> PowerAngleCurve:
    """Unlimited, limited and virtual power-angle curves over ``[0, pi]``."""
    if n_points < 2:
        raise ValueError("n_points must be >= 2")
    vg = network.vg_nominal if vg is None else vg
    e = params.e_mag
    x_total = network.x_total(params.x_v)
    deltas = np.linspace(0.0, math.pi, n_points)
    p_unl = e * vg * np.sin(deltas) / x_total
    p_lim = np.array([measured_power(d, e, vg, x_total, params.i_lim)[0] for d in deltas])
    p_vir = np.array([virtual_power(d, e, vg, params.x_v, network.x_ext, params.i_lim)[0] for d in deltas])
    return PowerAngleCurve(deltas, p_unl, p_lim, p_vir, limiter_activation_angle(e, vg, x_total, params.i_lim))


# --- equilibria on a power-angle curve ------------------------------------------


def curve_peak(power: Callable[[float], float], extra_candidates=()) -> tuple[float, float]:
    """Location and value of the maximum of ``power`` on ``[0, pi]``."""
    grid = np.linspace(0.0, math.pi, 2049)
    values = np.array([power(d) for d in grid])
    k = int(np.argmax(values))
    lo, hi = grid[max(k - 1, 0)], grid[min(k + 1, len(grid) - 1)]
    res = minimize_scalar(lambda d: -power(d), bounds=(lo, hi), method="bounded", options={"xatol": 1e-12})
    best = (grid[k], values[k])
    for d in (res.x, *extra_candidates):
        if d is not None and 0.0 <= d <= math.pi:
            v = power(d)
            if v > best[1]:
                best = (d, v)
    return float(best[0]), float(best[1])


def solve_equilibria(
    power: Callable[[float], float], p_set: float, extra_candidates=(), context: str = ""
) -> tuple[float, float | None, float]:
    """Stable (rising-branch) and unstable (falling-branch) crossings of ``p_set``.

    Returns ``(delta_stable, delta_unstable, p_peak)``; ``delta_unstable`` is
    ``None`` when the falling branch never drops to ``p_set`` before ``pi``.
    """
    d_peak, p_peak = curve_peak(power, extra_candidates)
    if p_set > p_peak:
        raise InfeasibleSetpoint(p_set, p_peak, context)

    def f(d):
        return power(d) - p_set

    if p_set == p_peak:
        return d_peak, d_peak, p_peak
    lo = 0.0 if f(0.0) <= 0 else -0.5 * math.pi
    if f(lo) > 0:
        raise InfeasibleSetpoint(p_set, p_peak, "no rising-branch crossing")
    stable = lo if f(lo) == 0 else brentq(f, lo, d_peak, xtol=1e-15, rtol=4 * np.finfo(float).eps)
    if f(math.pi) >= 0:
        unstable = math.pi if abs(f(math.pi)) < 1e-12 else None
    else:
        unstable = brentq(f, d_peak, math.pi, xtol=1e-15, rtol=4 * np.finfo(float).eps)
    return float(stable), (None if unstable is None else float(unstable)), p_peak


def static_curve(params: GfcParams, network: NetworkParams, mode: FeedbackMode, vg: float | None = None):
    """``(power, activation_candidates)`` for the closed-form curve of ``mode``."""
    vg = network.vg_nominal if vg is None else vg
    act = limiter_activation_angle(params.e_mag, vg, network.x_total(params.x_v), params.i_lim)

    def power(d: float) -> float:
        return static_power(d, vg, params, network, mode)

    return power, (act,)
