"""Command-line front end.

Exit codes: 0 success / stable run, 1 error, 2 loss of synchronism,
3 reference-suite mismatch.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
import time
from pathlib import Path

from . import analysis
from .cases import REFERENCE_CASES
from .config import ConfigError, ScenarioConfig, load_config
from .core import FeedbackMode
from .electrical import InfeasibleSetpoint, sweep_curves
from .io import atomic_write_text, write_curve_csv, write_margin_csv, write_trajectory_csv
from .simulator import SimulationError, run

OUT_DIR_ENV = "GFCSYNC_OUT_DIR"
EXIT_OK, EXIT_ERROR, EXIT_LOSS, EXIT_MISMATCH = 0, 1, 2, 3


def _out_path(arg: str | None, default_name: str) -> Path:
    if arg:
        return Path(arg)
    return Path(os.environ.get(OUT_DIR_ENV, ".")) / default_name


def _load(args) -> ScenarioConfig:
    cfg = load_config(args.config) if args.config else ScenarioConfig()
    return cfg.with_overrides(args.override or [])


def cmd_simulate(args) -> int:
    cfg = _load(args)
    traj = run(cfg.signal(), cfg.gfc, cfg.network, cfg.sim)
    path = write_trajectory_csv(traj, _out_path(args.out, "trajectory.csv"))
    print(f"{cfg.gfc.feedback_mode.value} feedback: {traj.verdict}  ->  {path}")
    return EXIT_OK if traj.verdict.stable else EXIT_LOSS


def cmd_curve(args) -> int:
    cfg = _load(args)
    curve = sweep_curves(cfg.gfc, cfg.network, n_points=args.points)
    path = write_curve_csv(curve, _out_path(args.out, "curve.csv"))
    act = curve.activation_delta
    print(f"limiter activation: {'never' if act is None else f'{math.degrees(act):.2f} deg'}")
    print(f"max limited power: {curve.p_limited.max():.4f} pu  ->  {path}")
    return EXIT_OK


def _format_reports(reports) -> str:
    lines = [f"{'mode':<9} {'p_set':>6}  {'margin':<24} {'value':>10}  unit"]
    for rep in reports:
        for mode, margin, value, unit in rep.rows():
            lines.append(f"{mode:<9} {rep.p_set:>6.3f}  {margin:<24} {value:>10.4f}  {unit}")
    return "\n".join(lines)


def cmd_margin(args) -> int:
    cfg = _load(args)
    reports = [
        analysis.margin_report(cfg.gfc.p_set, cfg.gfc, cfg.network, mode, use_simulation=not args.static_only)
        for mode in FeedbackMode
    ]
    print(_format_reports(reports))
    if args.out:
        write_margin_csv(reports, args.out)
    return EXIT_OK


def cmd_reproduce(args) -> int:
    out = _out_path(args.out, "reference")
    out.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    cfg = ScenarioConfig()
    rows, mismatches = [], []
    for case in REFERENCE_CASES:
        for mode in FeedbackMode:
            traj = case.run(mode, cfg.gfc, cfg.network, cfg.sim)
            write_trajectory_csv(traj, out / f"{case.name}_{mode.value}.csv")
            expected = "Stable" if case.expected_stable[mode] else "LossOfSync"
            observed = "Stable" if traj.verdict.stable else "LossOfSync"
            rows.append((case.name, mode.value, expected, observed))
            if expected != observed:
                mismatches.append(rows[-1])
    for vg in (cfg.network.vg_nominal, 0.5):
        write_curve_csv(sweep_curves(cfg.gfc, cfg.network, vg=vg), out / f"curves_vg{vg:g}.csv")
    reports = []
    for p_set in (0.8, 0.9):
        for mode in FeedbackMode:
            reports.append(analysis.margin_report(p_set, cfg.gfc, cfg.network, mode, use_simulation=not args.static_only))
    write_margin_csv(reports, out / "margins.csv")

    lines = ["event,mode,expected,observed,match"]
    lines += [f"{e},{m},{x},{o},{int(x == o)}" for e, m, x, o in rows]
    atomic_write_text(out / "verdicts.csv", "\n".join(lines) + "\n")
    print(f"{'event':<12} {'mode':<9} {'expected':<11} observed")
    for e, m, x, o in rows:
        print(f"{e:<12} {m:<9} {x:<11} {o}{'' if x == o else '   <-- MISMATCH'}")
    print(f"{len(rows) - len(mismatches)}/{len(rows)} verdicts match ({time.perf_counter() - t0:.1f} s)  ->  {out}")
    return EXIT_MISMATCH if mismatches else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gfcsync", description="Grid-forming converter synchronization stability")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, out_help):
        sp.add_argument("--config", help="scenario file (defaults used when omitted)")
        sp.add_argument("--out", help=out_help)
        sp.add_argument("--override", action="append", metavar="KEY=VALUE",
                        help="override a config entry, e.g. gfc.feedback=virtual (repeatable)")

    sp = sub.add_parser("simulate", help="run one scenario and write the trajectory CSV")
    common(sp, f"trajectory CSV (default ${OUT_DIR_ENV}/trajectory.csv)")
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("curve", help="write power-angle curves")
    common(sp, f"curve CSV (default ${OUT_DIR_ENV}/curve.csv)")
    sp.add_argument("--points", type=int, default=721)
    sp.set_defaults(func=cmd_curve)

    sp = sub.add_parser("margin", help="stability margins for both feedback modes")
    common(sp, "optional margin CSV")
    sp.add_argument("--static-only", action="store_true", help="skip the simulation-based margins")
    sp.set_defaults(func=cmd_margin)

    sp = sub.add_parser("reproduce-paper", help="run the reference RoCoF / phase-jump / dip suite")
    sp.add_argument("--out", help=f"output directory (default ${OUT_DIR_ENV}/reference)")
    sp.add_argument("--static-only", action="store_true", help="static margins only in the margin table")
    sp.set_defaults(func=cmd_reproduce)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, InfeasibleSetpoint, SimulationError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
