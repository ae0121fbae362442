"""CSV writers. Files are written to a temporary sibling and renamed into place."""

from __future__ import annotations

import csv
import io
import math
import os
import tempfile
from pathlib import Path
from typing import Iterable, Sequence

from .electrical import PowerAngleCurve
from .simulator import Trajectory

CURVE_COLUMNS = ("delta_deg", "p_unlimited_pu", "p_limited_pu", "p_virtual_pu")
TRAJECTORY_COLUMNS = (
    "t_s", "delta_deg", "omega_vsc_pu", "omega_g_pu", "p_pcc_pu", "q_pcc_pu",
    "p_virt_pu", "i_mag_pu", "kc_lim", "vg_pu", "limited",
)
MARGIN_COLUMNS = ("mode", "p_set_pu", "margin", "value", "unit")


def fmt(v) -> str:
    if isinstance(v, (bool,)):
        return "1" if v else "0"
    if isinstance(v, float):
        return "inf" if math.isinf(v) else f"{v:.12g}"
    return str(v)


def atomic_write_text(path: os.PathLike | str, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def _csv_text(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    return buf.getvalue()


def write_curve_csv(curve: PowerAngleCurve, path) -> Path:
    rows = zip(
        (math.degrees(d) for d in curve.deltas),
        map(float, curve.p_unlimited),
        map(float, curve.p_limited),
        map(float, curve.p_virtual),
    )
    return atomic_write_text(path, _csv_text(CURVE_COLUMNS, rows))


def write_trajectory_csv(traj: Trajectory, path) -> Path:
    rows = zip(
        map(float, traj.t),
        (math.degrees(d) for d in traj.delta),
        map(float, traj.omega_vsc_pu),
        map(float, traj.omega_g_pu),
        map(float, traj.p_pcc),
        map(float, traj.q_pcc),
        map(float, traj.p_virt),
        map(float, traj.i_mag_actual),
        map(float, traj.kc_lim),
        map(float, traj.vg),
        map(bool, traj.limited),
    )
    return atomic_write_text(path, _csv_text(TRAJECTORY_COLUMNS, rows))


def write_margin_csv(reports, path) -> Path:
    rows = []
    for rep in reports:
        for mode, margin, value, unit in rep.rows():
            rows.append((mode, float(rep.p_set), margin, float(value), unit))
    return atomic_write_text(path, _csv_text(MARGIN_COLUMNS, rows))


def read_csv(path) -> list[dict[str, str]]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))
