"""Fixed-step RK4 simulation of a grid-forming converter against an infinite bus.

States are the converter angle ``phi`` in the nominal rotating frame and the
controller state ``x``. ``delta = phi - theta_g`` is never wrapped, so a pole
slip shows up as monotone growth. The electrical layer is algebraic and is
re-solved at every RK stage.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .control import gains_for
from .core import FeedbackMode, GfcParams, NetworkParams
from .electrical import (
    InfeasibleSetpoint,
    feedback_function,
    limiter_activation_angle,
    operating_point,
    solve_equilibria,
)
from .scenario import GridSignal


class SimulationError(RuntimeError):
    pass


@dataclass(frozen=True)
class SimConfig:
    t_end: float = 10.0
    dt: float = 1e-3
    record_every: int = 1
    los_threshold: float = math.pi
    mode: Optional[FeedbackMode] = None
    stop_on_loss: bool = False

    def __post_init__(self):
        if not self.t_end > 0:
            raise ValueError("t_end must be positive")
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if self.record_every < 1:
            raise ValueError("record_every must be >= 1")


@dataclass(frozen=True)
class Verdict:
    lost_sync: bool
    t_loss: Optional[float] = None

    @property
    def stable(self) -> bool:
        return not self.lost_sync

    def __str__(self) -> str:
        return f"LossOfSync(t={self.t_loss:.4f} s)" if self.lost_sync else "Stable"


STABLE = Verdict(False)


@dataclass
class Trajectory:
    t: np.ndarray
    delta: np.ndarray
    omega_vsc_pu: np.ndarray
    omega_g_pu: np.ndarray
    p_pcc: np.ndarray
    q_pcc: np.ndarray
    p_virt: np.ndarray
    i_mag_actual: np.ndarray
    kc_lim: np.ndarray
    vg: np.ndarray
    limited: np.ndarray
    verdict: Verdict = STABLE
    delta_ref: float = 0.0
    omega_base: float = 100.0 * math.pi
    mode: FeedbackMode = FeedbackMode.MEASURED
    extras: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.t)


def find_equilibrium(
    p_set: float, vg: float, params: GfcParams, network: NetworkParams, mode: FeedbackMode | None = None
) -> float:
    """Stable equilibrium angle of the simulated (dq) model for setpoint ``p_set``."""
    mode = params.feedback_mode if mode is None else FeedbackMode(mode)
    fb = feedback_function(params, network, mode)
    act = limiter_activation_angle(params.e_mag, vg, network.x_total(params.x_v), params.i_lim) if vg > 0 else None
    stable, _, _ = solve_equilibria(lambda d: fb(d, vg), p_set, (act,), context=f"{mode.value} feedback, vg={vg:g}")
    return stable


def _crossed(dev: float, rate: float, threshold: float) -> bool:
    return abs(dev) > threshold and dev * rate > 0


def detect_loss_of_sync(traj: Trajectory, threshold: float = math.pi) -> Verdict:
    """Pole-slip verdict from recorded samples: the first sample past ``threshold``
    from ``delta_ref`` while still moving away from it."""
    rate = traj.omega_base * (np.asarray(traj.omega_vsc_pu) - np.asarray(traj.omega_g_pu))
    dev = np.asarray(traj.delta) - traj.delta_ref
    hit = (np.abs(dev) > threshold) & (dev * rate > 0)
    if not hit.any():
        return STABLE
    return Verdict(True, float(traj.t[int(np.argmax(hit))]))


def _step_boundaries(t_end: float, dt: float, breakpoints) -> list[tuple[float, bool]]:
    n = int(round(t_end / dt))
    if abs(n * dt - t_end) > 1e-9 * dt:
        raise ValueError("t_end must be an integer multiple of dt")
    times = {k: k * dt for k in range(n + 1)}
    extra = []
    tol = 1e-9 * dt
    for bp in breakpoints:
        if not 0.0 < bp < t_end:
            continue
        k = int(round(bp / dt))
        if abs(bp - k * dt) <= tol:
            times[k] = bp  # snap the grid node onto the exact event time
        else:
            extra.append(bp)
    out = [(t, True) for t in times.values()] + [(t, False) for t in extra]
    out.sort()
    return out


def run(
    signal: GridSignal, params: GfcParams, network: NetworkParams, sim: SimConfig | None = None
) -> Trajectory:
    sim = SimConfig() if sim is None else sim
    mode = params.feedback_mode if sim.mode is None else FeedbackMode(sim.mode)
    gains = gains_for(params, network)
    k_pp, k_gp = gains.k_pp, gains.k_gp
    b = gains.k_ip - gains.k_pp * gains.k_gp
    w_b = network.omega_base
    fb = feedback_function(params, network, mode)
    p_default = params.p_set

    vg0, wg0, th0 = signal(0.0, left=True)
    p0 = signal.setpoint(0.0, p_default, left=True)
    delta0 = find_equilibrium(p0, vg0, params, network, mode)

    # reference for the pole-slip test: post-event equilibrium if one exists
    vg_end, wg_end, _ = signal(sim.t_end)
    p_end = signal.setpoint(sim.t_end, p_default)
    p_target = p_end - gains.k_droop * (wg_end - 1.0)
    try:
        delta_ref = find_equilibrium(p_target, vg_end, params, network, mode)
    except (InfeasibleSetpoint, ValueError):
        delta_ref = delta0

    def deriv(t, phi, x, left):
        vg, wg, th = signal(t, left)
        e = signal.setpoint(t, p_default, left) - fb(phi - th, vg)
        return x + k_pp * e, -k_gp * x + b * e

    phi = delta0 + th0
    x = w_b * (wg0 - 1.0)  # no initial transient when the grid starts off-nominal

    boundaries = _step_boundaries(sim.t_end, sim.dt, signal.breakpoints)
    rec_t, rec_phi, rec_x = [], [], []
    verdict = STABLE
    grid_count = 0
    threshold = sim.los_threshold

    def record(t):
        rec_t.append(t)
        rec_phi.append(phi)
        rec_x.append(x)

    record(0.0)
    for (ta, _), (tb, on_grid) in zip(boundaries, boundaries[1:]):
        h = tb - ta
        k1p, k1x = deriv(ta, phi, x, False)
        tm = ta + 0.5 * h
        k2p, k2x = deriv(tm, phi + 0.5 * h * k1p, x + 0.5 * h * k1x, False)
        k3p, k3x = deriv(tm, phi + 0.5 * h * k2p, x + 0.5 * h * k2x, False)
        k4p, k4x = deriv(tb, phi + h * k3p, x + h * k3x, True)
        phi += h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p)
        x += h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x)
        if not (math.isfinite(phi) and math.isfinite(x)):
            raise SimulationError(f"non-finite state at t={tb:.6g} s (phi={phi}, x={x})")

        if verdict.stable:
            vg, wg, th = signal(tb)
            dw, _ = deriv(tb, phi, x, False)
            if _crossed(phi - th - delta_ref, dw - w_b * (wg - 1.0), threshold):
                verdict = Verdict(True, tb)

        if on_grid:
            grid_count += 1
            if grid_count % sim.record_every == 0:
                record(tb)
        if verdict.lost_sync and sim.stop_on_loss:
            if not rec_t or rec_t[-1] != tb:
                record(tb)
            break

    traj = _assemble(rec_t, rec_phi, rec_x, signal, params, network, mode, gains, p_default)
    traj.verdict = verdict
    traj.delta_ref = delta_ref
    return traj


def _assemble(ts, phis, xs, signal, params, network, mode, gains, p_default) -> Trajectory:
    n = len(ts)
    cols = {name: np.empty(n) for name in ("delta", "omega_vsc_pu", "omega_g_pu", "p_pcc", "q_pcc", "p_virt", "i_mag", "kc", "vg")}
    limited = np.zeros(n, dtype=bool)
    w_b = network.omega_base
    for k, (t, phi, x) in enumerate(zip(ts, phis, xs)):
        vg, wg, th = signal(t)
        delta = phi - th
        op = operating_point(delta, vg, params, network)
        e = signal.setpoint(t, p_default) - op.feedback(mode)
        cols["delta"][k] = delta
        cols["omega_vsc_pu"][k] = 1.0 + (x + gains.k_pp * e) / w_b
        cols["omega_g_pu"][k] = wg
        cols["p_pcc"][k] = op.p_pcc
        cols["q_pcc"][k] = op.q_pcc
        cols["p_virt"][k] = op.p_virt
        cols["i_mag"][k] = op.i_mag_actual
        cols["kc"][k] = op.kc_lim
        cols["vg"][k] = vg
        limited[k] = op.limited
    return Trajectory(
        t=np.asarray(ts, dtype=float),
        delta=cols["delta"],
        omega_vsc_pu=cols["omega_vsc_pu"],
        omega_g_pu=cols["omega_g_pu"],
        p_pcc=cols["p_pcc"],
        q_pcc=cols["q_pcc"],
        p_virt=cols["p_virt"],
        i_mag_actual=cols["i_mag"],
        kc_lim=cols["kc"],
        vg=cols["vg"],
        limited=limited,
        omega_base=w_b,
        mode=mode,
    )
