"""Transient synchronization stability of a current-limited grid-forming converter."""

from .core import DqVector, FeedbackMode, GfcParams, NetworkParams, PerUnitBase, chord_length, magnitude
from .electrical import InfeasibleSetpoint, OperatingPoint, PowerAngleCurve, operating_point, sweep_curves
from .scenario import GridSignal, PhaseJump, RocofRamp, SetpointStep, VoltageDip, build_signal
from .simulator import SimConfig, Trajectory, Verdict, find_equilibrium, run

__all__ = [
    "DqVector", "FeedbackMode", "GfcParams", "NetworkParams", "PerUnitBase", "chord_length", "magnitude",
    "InfeasibleSetpoint", "OperatingPoint", "PowerAngleCurve", "operating_point", "sweep_curves",
    "GridSignal", "PhaseJump", "RocofRamp", "SetpointStep", "VoltageDip", "build_signal",
    "SimConfig", "Trajectory", "Verdict", "find_equilibrium", "run",
]
__version__ = "0.1.0"
