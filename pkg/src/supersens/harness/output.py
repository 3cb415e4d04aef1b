"""CSV, gnuplot and snapshot writers."""

from __future__ import annotations

import csv
import math
from pathlib import Path

import numpy as np

from ..burgers2d import YGrid
from .config import Dimension

CSV_FIELDS = (
    "config_hash", "name", "scheme", "eps", "delta", "delta0", "delta_amp", "beta",
    "n_pts", "n_y", "dt", "converged", "x_star_inf", "mean_x_star", "max_dev", "spread",
    "x_star_as", "steps", "wall_s", "error",
)


class OutputError(OSError):
    pass


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v) if math.isfinite(v) else str(v)
    return str(v)


def _open(path, mode="w"):
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        return path.open(mode, newline="")
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc.strerror or exc}") from exc


def emit_csv(records, path) -> Path:
    """One row per record with the fields of :data:`CSV_FIELDS`."""
    records = list(records)
    if not records:
        raise ValueError("no records to write")
    with _open(path) as fh:
        w = csv.writer(fh)
        w.writerow(CSV_FIELDS)
        for rec in records:
            row = rec.row()
            w.writerow([_fmt(row[k]) for k in CSV_FIELDS])
    return Path(path)


def emit_plot_script(records, csv_path, path, snapshots=()) -> Path:
    """Gnuplot script plotting the CSV (and any snapshot files)."""
    records = list(records)
    if not records:
        raise ValueError("no records to plot")
    csv_name = Path(csv_path).name
    two_d = records[0].config.dimension is Dimension.TWO_D
    lines = [
        "# gnuplot script; run from the directory holding the CSV",
        'set datafile separator ","',
        "set key autotitle columnhead",
        "set grid",
    ]
    if two_d:
        lines += [
            'set xlabel "delta_amp"',
            'set ylabel "layer position"',
            f'plot "{csv_name}" using (column("delta_amp")):(column("mean_x_star")) '
            'with linespoints title "mean x*", \\',
            f'     "" using (column("delta_amp")):(column("x_star_as")) '
            'with lines title "asymptotic"',
        ]
    else:
        lines += [
            "set logscale x",
            'set xlabel "delta"',
            'set ylabel "x*"',
            f'plot "{csv_name}" using (column("delta")):(column("x_star_inf")) '
            'with linespoints title "computed", \\',
            f'     "" using (column("delta")):(column("x_star_as")) '
            'with lines title "asymptotic"',
        ]
    for snap in snapshots:
        snap = Path(snap)
        lines += ["", "pause -1", 'set datafile separator whitespace', "unset logscale"]
        if two_d:
            lines += ['set xlabel "x"', 'set ylabel "y"', "set hidden3d",
                      f'splot "{snap.name}" using 1:2:3 with lines title "{snap.stem}"']
        else:
            lines += ['set xlabel "x"', 'set ylabel "u"',
                      f'plot "{snap.name}" using 1:2 with linespoints title "{snap.stem}"']
    with _open(path) as fh:
        fh.write("\n".join(lines) + "\n")
    return Path(path)


def emit_snapshot(record, path, stride: int = 1) -> Path:
    """Final state as ``x u`` pairs (1D) or ``x y u`` triples in gnuplot grid blocks (2D)."""
    res = record.result
    if res is None or res.state is None:
        raise ValueError(f"record {record.config.name!r} carries no final state")
    x = res.layout.nodes
    U = np.asarray(res.state)
    with _open(path) as fh:
        fh.write(f"# {record.config.name} {record.config_hash}\n")
        if U.ndim == 1:
            for xi, ui in zip(x[::stride], U[::stride]):
                fh.write(f"{xi!r} {ui!r}\n")
        else:
            y = YGrid(U.shape[1]).y
            for j in range(0, U.shape[1], stride):
                for i in range(0, x.size, stride):
                    fh.write(f"{x[i]!r} {y[j]!r} {U[i, j]!r}\n")
                fh.write("\n")
    return Path(path)
