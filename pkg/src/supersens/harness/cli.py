"""Command-line entry point.

::

    supersens list-presets [--nightly]
    supersens run <preset|config.json> [--workers N] [--out DIR] [--dt DT] [--max-steps N]
    supersens sweep <table_id> [--workers N] [--out DIR] [--dt DT] [--max-steps N] [--nightly]
    supersens export <preset>

The output directory defaults to ``$SUPERSENS_OUT`` or ``./results``.
The exit status is 0 only if every run converged.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .config import ConfigError, ExperimentConfig
from .output import OutputError, emit_csv, emit_plot_script, emit_snapshot
from .presets import TABLE_IDS, UnknownPresetError, all_presets, preset, table
from .runner import all_converged, run, sweep

OUT_ENV = "SUPERSENS_OUT"
DEFAULT_OUT = "results"


def _out_dir(arg):
    return Path(arg or os.environ.get(OUT_ENV) or DEFAULT_OUT)


def _load(target: str) -> ExperimentConfig:
    p = Path(target)
    if p.suffix == ".json":
        try:
            return ExperimentConfig.from_json(p.read_text())
        except OSError as exc:
            raise ConfigError(f"cannot read {p}: {exc.strerror}") from exc
    return preset(target)


def _summary(rec) -> str:
    state = "converged" if rec.converged else "NOT converged"
    if rec.error:
        state = f"failed ({rec.error})"
    if rec.x_star_inf is not None:
        val = f"x*={rec.x_star_inf:.6f}"
    elif rec.mean_x_star is not None:
        val = f"<x*>={rec.mean_x_star:.6f} dev={rec.max_dev:.4e} spread={rec.spread:.4e}"
    else:
        val = "-"
    return f"{rec.config.name:<34} {val:<52} steps={rec.steps:<9} {rec.wall_s:8.1f}s  {state}"


def _write(records, out, stem, snapshots=True):
    csv_path = emit_csv(records, out / f"{stem}.csv")
    snaps = []
    if snapshots:
        for rec in records:
            if rec.result is not None and getattr(rec.result, "state", None) is not None:
                stride = rec.config.output.sample_stride
                snaps.append(emit_snapshot(rec, out / f"{rec.config.name}.dat", stride))
    if any(r.config.output.plot_script for r in records):
        emit_plot_script(records, csv_path, out / f"{stem}.gp", snaps)
    return csv_path


def cmd_list(args) -> int:
    for name, cfg in all_presets().items():
        if cfg.nightly and not args.nightly:
            continue
        tag = "  [nightly]" if cfg.nightly else ""
        print(f"{name:<34} {cfg.scheme:<16} dt={cfg.discretization.dt:g}{tag}")
    return 0


def cmd_export(args) -> int:
    sys.stdout.write(_load(args.target).to_json())
    return 0


def cmd_run(args) -> int:
    cfg = _load(args.target).with_overrides(dt=args.dt, max_steps=args.max_steps, workers=args.workers)
    rec = run(cfg)
    print(_summary(rec))
    for w in rec.warnings:
        print(f"  warning: {w}")
    out = _out_dir(args.out)
    path = _write([rec], out, cfg.name)
    print(f"wrote {path}")
    return 0 if all_converged([rec]) else 1


def cmd_sweep(args) -> int:
    cells = table(args.table_id, nightly=args.nightly)
    cells = [c.with_overrides(dt=args.dt, max_steps=args.max_steps) for c in cells]
    records = sweep(cells, workers=args.workers or 1)
    for rec in records:
        print(_summary(rec))
    path = _write(records, _out_dir(args.out), args.table_id, snapshots=False)
    print(f"wrote {path}")
    return 0 if all_converged(records) else 1


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--workers", type=int, default=None,
                        help="threads per 2D run (run) or concurrent runs (sweep)")
    common.add_argument("--out", metavar="DIR", default=None,
                        help=f"output directory (default ${OUT_ENV} or ./{DEFAULT_OUT})")
    common.add_argument("--dt", type=float, default=None, help="override the time step")
    common.add_argument("--max-steps", type=int, default=None, help="override the step budget")

    ap = argparse.ArgumentParser(prog="supersens", description=__doc__.split("\n\n")[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("list-presets", help="list compiled-in experiment cells")
    p.add_argument("--nightly", action="store_true", help="include the slow cells")
    p.set_defaults(func=cmd_list)

    p = sub.add_parser("export", help="print a preset as JSON")
    p.add_argument("target")
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("run", parents=[common], help="run one preset or JSON config")
    p.add_argument("target", help="preset name (or unique prefix) or path to a .json config")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep", parents=[common], help="run every cell of a table")
    p.add_argument("table_id", choices=TABLE_IDS)
    p.add_argument("--nightly", action="store_true", help="include the slow cells")
    p.set_defaults(func=cmd_sweep)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, UnknownPresetError, OutputError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
