"""Run experiments and collect flat records."""

from __future__ import annotations

import time
import traceback
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from ..asympt import x_star_as
from ..burgers1d import Scheme, run_to_steady
from ..burgers2d import Scheme2D, run_2d
from .config import Dimension, ExperimentConfig


@dataclass
class RunRecord:
    config: ExperimentConfig
    config_hash: str
    converged: bool = False
    x_star_inf: float | None = None
    mean_x_star: float | None = None
    max_dev: float | None = None
    spread: float | None = None
    x_star_as: float | None = None
    steps: int = 0
    wall_s: float = 0.0
    warnings: list = field(default_factory=list)
    error: str | None = None
    result: object = field(default=None, repr=False, compare=False)

    def row(self) -> dict:
        c = self.config
        p, q = c.physics, c.discretization
        return {
            "config_hash": self.config_hash,
            "name": c.name,
            "scheme": c.scheme,
            "eps": p.eps,
            "delta": p.delta,
            "delta0": p.delta0,
            "delta_amp": p.delta_amp if c.dimension is Dimension.TWO_D else None,
            "beta": p.beta if c.dimension is Dimension.TWO_D else None,
            "n_pts": q.n_pts,
            "n_y": q.n_y,
            "dt": q.dt,
            "converged": int(self.converged),
            "x_star_inf": self.x_star_inf,
            "mean_x_star": self.mean_x_star,
            "max_dev": self.max_dev,
            "spread": self.spread,
            "x_star_as": self.x_star_as,
            "steps": self.steps,
            "wall_s": round(self.wall_s, 3),
            "error": self.error,
        }


def _asymptotic(eps, delta):
    try:
        return x_star_as(eps, delta)
    except ValueError:
        return None


def run(config: ExperimentConfig) -> RunRecord:
    """Execute one experiment; any exception ends up in ``record.error``."""
    rec = RunRecord(config, config.config_hash())
    t0 = time.perf_counter()
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        try:
            if config.dimension is Dimension.ONE_D:
                _run_1d(config, rec)
            else:
                _run_2d(config, rec)
        except Exception as exc:  # isolate failures per run
            rec.error = f"{type(exc).__name__}: {exc}"
            rec.converged = False
            rec.warnings.append(traceback.format_exc(limit=2).strip().splitlines()[-1])
    rec.wall_s = time.perf_counter() - t0
    for w in caught:
        msg = f"{w.category.__name__}: {w.message}"
        if msg not in rec.warnings:
            rec.warnings.append(msg)
    return rec


def _run_1d(config, rec):
    cfg = config.solver_1d()
    res = run_to_steady(cfg, Scheme(config.scheme), cutoff=config.cutoff())
    rec.result = res
    rec.converged = res.converged
    rec.x_star_inf = res.x_star_inf
    rec.steps = res.steps
    rec.x_star_as = _asymptotic(cfg.eps, cfg.delta)
    rec.warnings.extend(res.warnings)


def _run_2d(config, rec):
    cfg = config.solver_2d()
    res = run_2d(cfg, Scheme2D(config.scheme))
    rec.result = res
    rec.converged = res.converged
    rec.mean_x_star = res.mean_x_star
    rec.max_dev = res.max_dev
    rec.spread = res.spread
    rec.steps = res.steps
    rec.x_star_as = _asymptotic(cfg.eps, cfg.delta0)
    rec.warnings.extend(res.warnings)


def _run_detached(config):
    rec = run(config)
    rec.result = None  # large arrays stay in the worker process
    return rec


def sweep(configs, workers: int = 1) -> list[RunRecord]:
    """Run every config; records come back sorted by config name."""
    configs = sorted(configs, key=lambda c: c.name)
    if workers <= 1 or len(configs) <= 1:
        return [run(c) for c in configs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_run_detached, configs))


def all_converged(records) -> bool:
    return bool(records) and all(r.converged and r.error is None for r in records)
