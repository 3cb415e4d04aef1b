"""Wall time and bitwise agreement of the threaded 2D stepper.

    python scripts/worker_scaling.py [--ny 128] [--nx 49] [--steps 1000] [--workers 1 2 4]
"""

import argparse
import os
import time
from dataclasses import replace

import numpy as np

from supersens.burgers2d import BoundaryData2D, SolverConfig2D, run_2d


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--ny", type=int, default=128)
    ap.add_argument("--nx", type=int, default=49)
    ap.add_argument("--steps", type=int, default=1000)
    ap.add_argument("--workers", type=int, nargs="+", default=[1, 2, 4])
    args = ap.parse_args()

    cfg = SolverConfig2D(0.1, 1.0, BoundaryData2D("Step", 1e-2, 1e-2), n_pts=args.nx,
                         n_y=args.ny, max_steps=args.steps, check_interval=100,
                         drift_window=100 * max(1, args.steps // 100))
    cfg = replace(cfg, dt=min(cfg.dt, 0.5 * cfg.explicit_dt_limit))
    run_2d(replace(cfg, max_steps=100, drift_window=100))

    print(f"{os.cpu_count()} cpu(s), n_y={args.ny}, n_x={args.nx}, {args.steps} steps, dt={cfg.dt:.3g}")
    ref = None
    base = None
    for w in args.workers:
        t0 = time.perf_counter()
        res = run_2d(replace(cfg, workers=w))
        wall = time.perf_counter() - t0
        ref = res.state if ref is None else ref
        base = wall if base is None else base
        same = np.array_equal(ref, res.state)
        print(f"workers={w:<3} {wall:8.2f}s  speedup {base / wall:5.2f}  identical={same}")


if __name__ == "__main__":
    main()
