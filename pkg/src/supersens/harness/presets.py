"""Compiled-in experiment presets, grouped by table id.

Cell names carry a zero-padded index, so sorting by name keeps the table
order.
"""

from __future__ import annotations

from .config import Control, Discretization, ExperimentConfig, Physics

TABLE_IDS = ("T1", "T2", "T3", "T4", "T5", "T6", "T7", "T9")


class UnknownPresetError(KeyError):
    def __str__(self):
        return str(self.args[0])


def _one_d(name, scheme, eps, delta, *, n_pts=39, dt=0.02, nightly=False, **control):
    return ExperimentConfig(
        name=name, dimension="OneD", scheme=scheme,
        physics=Physics(eps=eps, delta=delta),
        discretization=Discretization(n_pts=n_pts, dt=dt),
        control=Control(**control), nightly=nightly,
    )


def _two_d(name, scheme, eps, beta, kind, delta0, delta_amp, *, n_pts=39, n_y=32, dt=0.02,
           nightly=False, **control):
    return ExperimentConfig(
        name=name, dimension="TwoD", scheme=scheme,
        physics=Physics(eps=eps, delta0=delta0, delta_amp=delta_amp, boundary_kind=kind, beta=beta),
        discretization=Discretization(n_pts=n_pts, n_y=n_y, dt=dt),
        control=Control(**control), nightly=nightly,
    )


def _t1():
    cells = [(e, d) for e in (0.1, 0.05) for d in (1e-1, 1e-2, 1e-3, 1e-4, 1e-5)]
    return [_one_d(f"T1-{i:02d}-eps{e:g}-delta{d:.0e}", "Alg", e, d)
            for i, (e, d) in enumerate(cells)]


def _t2():
    return [_one_d(f"T2-{i:02d}-N{n}", "Alg", 0.1, 1e-3, n_pts=n)
            for i, n in enumerate((15, 19, 29, 39, 49, 59))]


def _t3():
    # explicit inviscid zones make dt = 0.02 unstable; 1e-3 is stable for all widths
    out = [_one_d(f"T3-{i:02d}-hw{hw:g}", "Qui", 0.1, 1e-2, dt=1e-3,
                  cutoff_half_width=hw, cutoff_sharpness=200.0)
           for i, hw in enumerate((0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7))]
    # explicit Chebyshev diffusion bounds dt near 1e-4 at N = 39
    out.append(_one_d("T3-07-newqui-hw0.5", "NewQui", 0.1, 1e-2, dt=1e-4,
                      cutoff_half_width=0.5, cutoff_sharpness=200.0))
    return out


T4_CELLS = {
    0.1: (1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6),
    0.05: (1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6),
    0.02: (1e-2, 1e-3, 1e-4, 1e-5, 1e-6),
    0.01: (1e-3, 1e-4, 1e-5, 1e-6, 1e-7),
}


def _t4():
    out = []
    i = 0
    for eps, deltas in T4_CELLS.items():
        # slow drift at small eps: larger steps and a looser profile refresh
        dt, refresh = (1.0, 1e3) if eps >= 0.05 else (20.0, 1e5)
        for d in deltas:
            out.append(_one_d(f"T4-{i:02d}-eps{eps:g}-delta{d:.0e}", "AlgV", eps, d, dt=dt,
                              refresh_factor=refresh, nightly=eps <= 0.01))
            i += 1
    return out


def _t5():
    return [_two_d(f"T5-{i:02d}-dd{dd:.2e}", "TwoDAlg", 0.1, 1.0, "Step", 1e-2, dd)
            for i, dd in enumerate((0.25e-2, 0.5e-2, 1e-2, 1.5e-2, 2e-2, 3e-2))]


def _t6():
    return [_two_d(f"T6-{i:02d}-dd{dd:.2e}", "TwoDAlg", 0.1, 1.0, "Peaked", 5e-3, dd)
            for i, dd in enumerate((0.25e-2, 0.5e-2, 1e-2, 2e-2, 3e-2))]


def _t7():
    cells = [(ny, nx) for ny in (8, 16, 32, 64) for nx in (19, 29, 39, 49, 59)]
    return [_two_d(f"T7-{i:02d}-Ny{ny}-Nx{nx}", "TwoDAlg", 0.1, 1.0, "Step", 1e-2, 1e-2,
                   n_pts=nx, n_y=ny)
            for i, (ny, nx) in enumerate(cells)]


def _t9():
    return [_two_d(f"T9-{i:02d}-dd{dd:.1e}", "TwoDProfileBeta", 0.02, 1.0, "Step", 1e-6, dd,
                   n_y=16, dt=0.4, nightly=True)
            for i, dd in enumerate((1e-6, 1e-5, 1e-4, 0.5e-3, 1e-3))]


_BUILDERS = {"T1": _t1, "T2": _t2, "T3": _t3, "T4": _t4, "T5": _t5, "T6": _t6,
             "T7": _t7, "T9": _t9}


def table(table_id: str, *, nightly: bool = True) -> list[ExperimentConfig]:
    """All cells of a table, in table order; ``nightly=False`` drops the slow ones."""
    if table_id not in _BUILDERS:
        raise UnknownPresetError(f"unknown table {table_id!r}; valid: {', '.join(TABLE_IDS)}")
    cells = _BUILDERS[table_id]()
    return [c for c in cells if nightly or not c.nightly]


def all_presets() -> dict[str, ExperimentConfig]:
    return {c.name: c for t in TABLE_IDS for c in table(t)}


def preset(name: str) -> ExperimentConfig:
    """Look up a cell by its full name or by a unique prefix."""
    presets = all_presets()
    if name in presets:
        return presets[name]
    hits = [k for k in presets if k.startswith(name)]
    if len(hits) == 1:
        return presets[hits[0]]
    tid = name.split("-")[0]
    valid = [k for k in presets if k.startswith(tid)] or list(presets)
    kind = "ambiguous" if hits else "unknown"
    raise UnknownPresetError(f"{kind} preset {name!r}; valid cells:\n  " + "\n  ".join(valid))
