"""Sectioned ``key = value`` scenario files.

Example::

    [gfc]
    p_set_pu = 0.8
    feedback = virtual

    [network]
    vg_pu = 1.0

    [events]
    rocof t=1.0 rate=-1.0 f_end=48
    phase_jump t=1.0 deg=40
    voltage_dip t=1.0 dur=0.3 v=0.5
    setpoint t=2.0 p=0.5

    [sim]
    t_end_s = 10

Missing keys take the defaults of the converter studied in the examples
(E = Vg = 1 pu, X_v = 0.3 pu, X_tf + X_g = 0.2 pu, I_lim = 1.1 pu, H = 10 s,
zeta = 0.4). Angles in the file are in degrees.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from pathlib import Path

from .core import FeedbackMode, GfcParams, NetworkParams
from .scenario import Event, PhaseJump, RocofRamp, SetpointStep, VoltageDip, build_signal
from .simulator import SimConfig


class ConfigError(ValueError):
    def __init__(self, msg: str, source: str = "<config>", line: int | None = None):
        self.line = line
        where = f"{source}:{line}" if line is not None else source
        super().__init__(f"{where}: {msg}")


# file key -> (record, attribute, parser)
_GFC_KEYS = {
    "h_s": "h_inertia",
    "zeta": "zeta",
    "r_droop_pu": "r_droop",
    "r_v_pu": "r_v",
    "x_v_pu": "x_v",
    "i_lim_pu": "i_lim",
    "e_pu": "e_mag",
    "p_set_pu": "p_set",
    "feedback": "feedback_mode",
}
_NETWORK_KEYS = {"x_tf_pu": "x_tf", "x_g_pu": "x_g", "vg_pu": "vg_nominal", "f_nominal_hz": "f_nominal"}
_SIM_KEYS = {"t_end_s": "t_end", "dt_s": "dt", "record_every": "record_every"}
_SECTIONS = {"gfc": _GFC_KEYS, "network": _NETWORK_KEYS, "sim": _SIM_KEYS}

_EVENT_FIELDS = {
    "rocof": ("t", "rate", "f_end"),
    "phase_jump": ("t", "deg"),
    "voltage_dip": ("t", "dur", "v"),
    "setpoint": ("t", "p"),
}


@dataclass
class ScenarioConfig:
    gfc: GfcParams = field(default_factory=GfcParams)
    network: NetworkParams = field(default_factory=NetworkParams)
    events: list = field(default_factory=list)
    sim: SimConfig = field(default_factory=SimConfig)

    def signal(self):
        return build_signal(self.events, self.network.f_nominal, self.network.vg_nominal)

    def dumps(self) -> str:
        lines = []
        for section, keys in _SECTIONS.items():
            rec = getattr(self, section)
            lines.append(f"[{section}]")
            for key, attr in keys.items():
                v = getattr(rec, attr)
                lines.append(f"{key} = {v.value if isinstance(v, FeedbackMode) else repr(v)}")
            lines.append("")
        lines.append("[events]")
        lines.extend(format_event(ev) for ev in self.events)
        return "\n".join(lines) + "\n"

    def with_overrides(self, overrides) -> "ScenarioConfig":
        cfg = self
        for item in overrides:
            if "=" not in item:
                raise ConfigError(f"override {item!r} is not key=value", "--override")
            key, value = (s.strip() for s in item.split("=", 1))
            section, _, name = key.rpartition(".")
            if not section:
                owners = [s for s, keys in _SECTIONS.items() if name in keys]
                if len(owners) != 1:
                    raise ConfigError(f"unknown or ambiguous key {key!r}; use section.key", "--override")
                section = owners[0]
            cfg = _set(cfg, section, name, value, "--override", None)
        return cfg


def _convert(attr: str, value: str):
    if attr == "feedback_mode":
        return FeedbackMode(value.lower())
    if attr == "record_every":
        return int(value)
    return float(value)


def _set(cfg: ScenarioConfig, section: str, key: str, value: str, source: str, line) -> ScenarioConfig:
    keys = _SECTIONS.get(section)
    if keys is None:
        raise ConfigError(f"unknown section [{section}]", source, line)
    if key not in keys:
        raise ConfigError(f"unknown key {key!r} in [{section}]", source, line)
    attr = keys[key]
    try:
        new = dataclasses.replace(getattr(cfg, section), **{attr: _convert(attr, value)})
    except ValueError as exc:
        raise ConfigError(f"bad value for {key}: {exc}", source, line) from None
    return dataclasses.replace(cfg, **{section: new})


def parse_event(text: str) -> Event:
    kind, *pairs = text.split()
    if kind not in _EVENT_FIELDS:
        raise ValueError(f"unknown event type {kind!r}")
    args = {}
    for pair in pairs:
        k, sep, v = pair.partition("=")
        if not sep:
            raise ValueError(f"expected key=value, got {pair!r}")
        args[k] = float(v)
    missing = set(_EVENT_FIELDS[kind]) - set(args)
    extra = set(args) - set(_EVENT_FIELDS[kind])
    if missing or extra:
        raise ValueError(f"{kind} needs fields {', '.join(_EVENT_FIELDS[kind])}")
    if kind == "rocof":
        return RocofRamp(args["t"], args["rate"], args["f_end"])
    if kind == "phase_jump":
        return PhaseJump(args["t"], math.radians(args["deg"]))
    if kind == "voltage_dip":
        return VoltageDip(args["t"], args["dur"], args["v"])
    return SetpointStep(args["t"], args["p"])


def format_event(ev: Event) -> str:
    if isinstance(ev, RocofRamp):
        return f"rocof t={ev.t_start!r} rate={ev.rate!r} f_end={ev.f_end!r}"
    if isinstance(ev, PhaseJump):
        return f"phase_jump t={ev.t!r} deg={math.degrees(ev.delta_theta)!r}"
    if isinstance(ev, VoltageDip):
        return f"voltage_dip t={ev.t_start!r} dur={ev.duration!r} v={ev.v_dip!r}"
    return f"setpoint t={ev.t!r} p={ev.p_set_new!r}"


def parse_config(text: str, source: str = "<config>") -> ScenarioConfig:
    cfg = ScenarioConfig()
    section = None
    events = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].split(";", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise ConfigError(f"malformed section header {raw.strip()!r}", source, lineno)
            section = line[1:-1].strip().lower()
            if section != "events" and section not in _SECTIONS:
                raise ConfigError(f"unknown section [{section}]", source, lineno)
            continue
        if section is None:
            raise ConfigError("entry before the first section header", source, lineno)
        if section == "events":
            try:
                events.append(parse_event(line))
            except ValueError as exc:
                raise ConfigError(str(exc), source, lineno) from None
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigError(f"expected key = value, got {line!r}", source, lineno)
        cfg = _set(cfg, section, key.strip(), value.strip(), source, lineno)
    cfg.events = events
    try:
        cfg.signal()
    except ValueError as exc:
        raise ConfigError(f"invalid event list: {exc}", source) from None
    return cfg


def load_config(path) -> ScenarioConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc.strerror}", str(path)) from None
    return parse_config(text, str(path))
