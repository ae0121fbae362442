"""Per-unit conventions, dq vectors and the parameter records shared by the package.

Everything inside the package is per-unit on a peak-value base, angles are in
radians, and the angle ``delta`` is the internal-EMF angle minus the grid angle.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass


class FeedbackMode(str, enum.Enum):
    """Which active power closes the synchronization loop."""

    MEASURED = "measured"
    VIRTUAL = "virtual"


@dataclass(frozen=True)
class PerUnitBase:
    """Peak-value per-unit base.

    ``v_base`` is the peak phase voltage, so ``s_base = 3/2 * v_base * i_base``
    and the 3/2 factor of the dq power expression disappears in per-unit.
    """

    s_base: float = 100e6
    v_base: float = 12.3e3 * math.sqrt(2.0 / 3.0)
    f_base: float = 50.0

    def __post_init__(self):
        for name in ("s_base", "v_base", "f_base"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")

    @property
    def omega_base(self) -> float:
        return 2.0 * math.pi * self.f_base

    @property
    def i_base(self) -> float:
        return 2.0 * self.s_base / (3.0 * self.v_base)

    @property
    def z_base(self) -> float:
        return self.v_base / self.i_base

    def _unit(self, quantity: str) -> float:
        try:
            return {
                "power": self.s_base,
                "voltage": self.v_base,
                "current": self.i_base,
                "impedance": self.z_base,
                "frequency": self.f_base,
            }[quantity]
        except KeyError:
            raise ValueError(f"unknown quantity {quantity!r}") from None

    def to_pu(self, value: float, quantity: str) -> float:
        return value / self._unit(quantity)

    def to_si(self, value: float, quantity: str) -> float:
        return value * self._unit(quantity)


@dataclass(frozen=True)
class DqVector:
    d: float
    q: float

    def __complex__(self) -> complex:
        return complex(self.d, self.q)

    @classmethod
    def from_complex(cls, z: complex) -> "DqVector":
        return cls(z.real, z.imag)


def magnitude(v: DqVector) -> float:
    return math.hypot(v.d, v.q)


def chord_length(e: float, vg: float, delta: float) -> float:
    """Distance between the EMF and grid phasors, ``sqrt(vg^2 + e^2 - 2 vg e cos(delta))``."""
    # same quantity written as (e - vg)^2 + 4 e vg sin^2(delta/2), which avoids
    # the cancellation of the cosine form for small angles
    s = math.sin(0.5 * delta)
    m2 = (e - vg) ** 2 + 4.0 * e * vg * s * s
    return math.sqrt(m2) if m2 > 0.0 else 0.0


@dataclass(frozen=True)
class GfcParams:
    """Converter control and virtual-impedance parameters (per-unit, seconds).

    ``r_droop = 0`` disables droop. ``r_v`` defaults to ``x_v / 10``.
    """

    h_inertia: float = 10.0
    zeta: float = 0.4
    r_droop: float = 0.0
    r_v: float = 0.03
    x_v: float = 0.3
    i_lim: float = 1.1
    e_mag: float = 1.0
    p_set: float = 0.8
    feedback_mode: FeedbackMode = FeedbackMode.MEASURED

    def __post_init__(self):
        if not self.h_inertia > 0:
            raise ValueError(f"h_inertia must be positive, got {self.h_inertia}")
        if not self.i_lim > 0:
            raise ValueError(f"i_lim must be positive, got {self.i_lim}")
        if not self.e_mag > 0:
            raise ValueError(f"e_mag must be positive, got {self.e_mag}")
        if not self.x_v > 0:
            raise ValueError(f"x_v must be positive, got {self.x_v}")
        if self.r_v < 0:
            raise ValueError(f"r_v must be non-negative, got {self.r_v}")
        if self.r_v > 0 and self.x_v / self.r_v < 1:
            raise ValueError("virtual impedance must be predominantly inductive (x_v/r_v >= 1)")
        if self.r_droop < 0:
            raise ValueError(f"r_droop must be non-negative, got {self.r_droop}")
        object.__setattr__(self, "feedback_mode", FeedbackMode(self.feedback_mode))


@dataclass(frozen=True)
class NetworkParams:
    """Grid-side reactances between the converter terminal and the infinite bus."""

    x_tf: float = 0.1
    x_g: float = 0.1
    vg_nominal: float = 1.0
    f_nominal: float = 50.0

    def __post_init__(self):
        if not self.x_ext > 0:
            raise ValueError(f"external reactance must be positive, got {self.x_ext}")
        if not self.f_nominal > 0:
            raise ValueError(f"f_nominal must be positive, got {self.f_nominal}")

    @property
    def omega_base(self) -> float:
        return 2.0 * math.pi * self.f_nominal

    @property
    def x_ext(self) -> float:
        return self.x_tf + self.x_g

    def x_total(self, x_v: float) -> float:
        return x_v + self.x_ext
