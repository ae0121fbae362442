"""Lead-lag power-synchronization controller.

The controller maps the active power error ``e = p_set - p_fb`` (pu) to the
frequency deviation of the virtual rotor through

    (k_pp * s + k_ip) / (s + k_gp)

The output is in rad/s. With ``k_ip = omega_B / (2 H)`` this is the swing
equation in electrical rad/s, so dividing by ``omega_B`` gives the deviation
in pu. The realization used here keeps a single state::

    dx/dt = -k_gp * x + (k_ip - k_pp * k_gp) * e
    d_omega = x + k_pp * e
"""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class ControllerGains:
    k_pp: float
    k_ip: float
    k_gp: float
    k_droop: float = 0.0

    def __post_init__(self):
        if not self.k_ip > 0:
            raise ValueError(f"k_ip must be positive, got {self.k_ip}")
        if self.k_gp < 0:
            raise ValueError(f"k_gp must be non-negative, got {self.k_gp}")


@dataclass(frozen=True)
class ControllerState:
    x: float = 0.0
    last_error: float = 0.0


def derive_gains(h: float, r_droop: float, zeta: float, omega_base: float, p_max: float) -> ControllerGains:
    """Gains giving inertia ``h``, droop ``r_droop`` and damping ratio ``zeta``.

    ``p_max`` is the synchronizing power of the unlimited power-angle curve
    (``E * Vg / X_T``). ``r_droop = 0`` means no droop.
    """
    if not h > 0:
        raise ValueError(f"inertia constant must be positive, got {h}")
    if not p_max > 0:
        raise ValueError(f"p_max must be positive, got {p_max}")
    if r_droop < 0:
        raise ValueError(f"r_droop must be non-negative, got {r_droop}")
    k_droop = 1.0 / r_droop if r_droop > 0 else 0.0
    k_ip = omega_base / (2.0 * h)
    k_gp = k_droop / (2.0 * h)
    k_pp = zeta * math.sqrt(2.0 * omega_base / (p_max * h)) - k_droop / (2.0 * h * p_max)
    if k_pp < 0:
        raise ValueError(
            f"derived k_pp = {k_pp:.4g} < 0: droop gain {k_droop:.4g} is too large for "
            f"damping ratio {zeta}; increase zeta or r_droop"
        )
    return ControllerGains(k_pp=k_pp, k_ip=k_ip, k_gp=k_gp, k_droop=k_droop)


def continuous_derivative(state: ControllerState, gains: ControllerGains, e: float) -> tuple[float, float]:
    """Return ``(dx/dt, d_omega)`` for power error ``e``; ``d_omega`` in rad/s."""
    dx = -gains.k_gp * state.x + (gains.k_ip - gains.k_pp * gains.k_gp) * e
    return dx, state.x + gains.k_pp * e


def trapezoidal_step(
    state: ControllerState, gains: ControllerGains, e_now: float, t_s: float
) -> tuple[ControllerState, float]:
    """Advance one sample with the bilinear (Tustin) rule.

    ``state.last_error`` is the previous sample of the error. A step applied at
    ``t = 0`` is represented by starting from ``ControllerState(0.0, 1.0)``.
    """
    if not t_s > 0:
        raise ValueError(f"sampling time must be positive, got {t_s}")
    a = 0.5 * gains.k_gp * t_s
    b = gains.k_ip - gains.k_pp * gains.k_gp
    x_new = ((1.0 - a) * state.x + 0.5 * t_s * b * (state.last_error + e_now)) / (1.0 + a)
    return ControllerState(x_new, e_now), x_new + gains.k_pp * e_now


def steady_state_output(gains: ControllerGains, e: float) -> float:
    """Settled output for a constant error; infinite for a pure PI."""
    if gains.k_gp == 0:
        return math.copysign(math.inf, e) if e else 0.0
    return e * gains.k_ip / gains.k_gp


def gains_for(params, network) -> ControllerGains:
    """Gains for a converter on ``network``, using the unlimited curve peak ``E * Vg / X_T``."""
    p_max = params.e_mag * network.vg_nominal / network.x_total(params.x_v)
    return derive_gains(params.h_inertia, params.r_droop, params.zeta, network.omega_base, p_max)
