"""Line-implicit solvers for ``-eps Lap u + u_t + u u_x + beta u u_y = 0``.

The domain is ``(-1, 1) x (-pi, pi)``, periodic in ``y``, with
``u(-1, y) = 1 + delta(y)`` and ``u(1, y) = -1``.  Each y-line carries the
1D two-domain Chebyshev layout in ``x``; ``y`` derivatives use sixth-order
central differences and are always explicit, so every line is an
independent implicit solve.  Fields are stored as ``(n_global, n_y)``
arrays.

Schemes
-------
``TwoDAlg``          direct marching of ``u``
``TwoDProfile``      correction about the tanh profile, ``beta = 0``
``TwoDProfileBeta``  same with the ``beta`` terms explicit
``TwoDFourier``      correction in Fourier modes, implicit in ``y``
"""

from __future__ import annotations

import enum
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .burgers1d import BlowUpError, Profile
from .decomp import (
    NoLayerError,
    TwoDomainLayout,
    assemble,
    build_layout,
    locate_zero,
    propagator,
    relocate,
)

__all__ = [
    "YGrid",
    "BoundaryKind",
    "BoundaryData2D",
    "Scheme2D",
    "SolverConfig2D",
    "FrontStats",
    "Result2D",
    "StabilityWarning",
    "HermitianError",
    "FD6_D1",
    "FD6_D2",
    "fd6_d1",
    "fd6_d2",
    "make_boundary",
    "linear_initial_2d",
    "step_2d",
    "step_2d_profile",
    "step_2d_profile_beta",
    "step_2d_fourier",
    "to_modes",
    "from_modes",
    "front_stats",
    "run_2d",
]


class StabilityWarning(RuntimeWarning):
    pass


class HermitianError(ArithmeticError):
    pass


# --------------------------------------------------------------------------
# y discretisation


@dataclass(frozen=True)
class YGrid:
    """Uniform periodic grid ``y_j = -pi + j h``, ``h = 2 pi / n_y``."""

    n_y: int

    def __post_init__(self):
        if self.n_y < 8 or self.n_y % 4:
            raise ValueError(f"n_y must be a multiple of 4 and at least 8, got {self.n_y}")

    @property
    def h(self) -> float:
        return 2.0 * math.pi / self.n_y

    @property
    def y(self) -> np.ndarray:
        return -math.pi + self.h * np.arange(self.n_y)


def _central_weights(deriv: int, half: int = 3) -> np.ndarray:
    """Weights of the ``2 half + 1`` point central stencil, from Taylor matching."""
    m = np.arange(-half, half + 1, dtype=float)
    A = m[None, :] ** np.arange(2 * half + 1)[:, None]
    b = np.zeros(2 * half + 1)
    b[deriv] = math.factorial(deriv)
    return np.linalg.solve(A, b)


def _fd6_tables():
    w1, w2 = _central_weights(1), _central_weights(2)
    m = np.arange(4)
    # symmetrise so the stencils are exactly (anti)symmetric
    d1 = 0.5 * (w1[3 + m] - w1[3 - m])
    d2 = 0.5 * (w2[3 + m] + w2[3 - m])
    d2[0] = -2.0 * d2[1:].sum()
    for arr in (d1, d2):
        arr.setflags(write=False)
    return d1, d2


# one-sided halves: FD6_D1[m] multiplies (u_{j+m} - u_{j-m}), FD6_D2[m] (u_{j+m} + u_{j-m})
FD6_D1, FD6_D2 = _fd6_tables()


def fd6_d1(values, h):
    """Periodic sixth-order first derivative along the last axis."""
    v = np.asarray(values, dtype=float)
    out = np.zeros_like(v)
    for m in range(1, 4):
        out += FD6_D1[m] * (np.roll(v, -m, axis=-1) - np.roll(v, m, axis=-1))
    return out / h


def fd6_d2(values, h):
    """Periodic sixth-order second derivative along the last axis."""
    v = np.asarray(values, dtype=float)
    out = FD6_D2[0] * v
    for m in range(1, 4):
        out = out + FD6_D2[m] * (np.roll(v, -m, axis=-1) + np.roll(v, m, axis=-1))
    return out / h**2


# --------------------------------------------------------------------------
# boundary data


class BoundaryKind(str, enum.Enum):
    STEP = "Step"
    PEAKED = "Peaked"
    FOURIER = "FourierCoeffs"


PEAK_SHARPNESS = 20.0


@dataclass(frozen=True)
class BoundaryData2D:
    """Left boundary data ``u(-1, y) = 1 + delta(y)``.

    ``Step``:   ``1 + level -+ delta_amp`` on the outer and middle half of
                the period.
    ``Peaked``: ``1 + level + delta_amp exp(-20 (1 - cos y))``.
    ``FourierCoeffs``: ``1 + level (1 + 2 Re sum_k eta_k e^{iky})``, with
                ``eta = (eta_1, eta_2, ...)``.
    """

    kind: BoundaryKind
    level: float
    delta_amp: float = 0.0
    eta: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "kind", BoundaryKind(self.kind))
        object.__setattr__(self, "eta", tuple(complex(e) for e in self.eta))

    def delta0(self, ygrid: YGrid) -> float:
        """Grid average of ``delta(y)``."""
        return float(np.mean(make_boundary(self, ygrid)) - 1.0)


def make_boundary(data: BoundaryData2D, ygrid: YGrid) -> np.ndarray:
    y = ygrid.y
    if data.kind is BoundaryKind.STEP:
        if ygrid.n_y % 4:
            raise ValueError("step data need n_y divisible by 4")
        q = ygrid.n_y // 4
        row = np.full(ygrid.n_y, data.level - data.delta_amp)
        row[q : 3 * q] = data.level + data.delta_amp
        return 1.0 + row
    if data.kind is BoundaryKind.PEAKED:
        return 1.0 + data.level + data.delta_amp * np.exp(-PEAK_SHARPNESS * (1.0 - np.cos(y)))
    series = np.ones_like(y)
    if data.eta:
        k = np.arange(1, len(data.eta) + 1)
        series += 2.0 * np.real(np.exp(1j * np.outer(y, k)) @ np.asarray(data.eta))
    return 1.0 + data.level * series


# --------------------------------------------------------------------------
# configuration and results


class Scheme2D(str, enum.Enum):
    ALG = "TwoDAlg"
    PROFILE = "TwoDProfile"
    PROFILE_BETA = "TwoDProfileBeta"
    FOURIER = "TwoDFourier"


@dataclass(frozen=True)
class SolverConfig2D:
    eps: float
    beta: float
    boundary: BoundaryData2D
    n_pts: int = 39
    n_y: int = 32
    dt: float = 0.02
    alpha: float | None = None
    relocation_distance: float | None = None
    steady_tol: float = 1e-10
    max_steps: int = 5_000_000
    refresh_factor: float = 10.0
    drift_window: int = 1000
    drift_tol: float = 1e-6
    check_interval: int = 100
    stability_constant: float = 0.4
    workers: int = 1

    def __post_init__(self):
        if not 0 < self.eps < 1:
            raise ValueError(f"eps must lie in (0, 1), got {self.eps}")
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if self.workers < 1:
            raise ValueError("workers must be positive")
        if self.drift_window % self.check_interval:
            raise ValueError("drift_window must be a multiple of check_interval")
        YGrid(self.n_y)

    @property
    def ygrid(self) -> YGrid:
        return YGrid(self.n_y)

    @property
    def stretch(self) -> float:
        return math.sqrt(self.eps) if self.alpha is None else self.alpha

    @property
    def reloc(self) -> float:
        return self.eps if self.relocation_distance is None else self.relocation_distance

    @property
    def delta0(self) -> float:
        return self.boundary.delta0(self.ygrid)

    @property
    def scale(self) -> float:
        """Amplitude ``delta0 / eps^2`` of the profile correction."""
        return self.delta0 / self.eps**2

    @property
    def explicit_dt_limit(self) -> float:
        return self.stability_constant * self.ygrid.h**2 / self.eps


@dataclass(frozen=True)
class FrontStats:
    """Per-line zeros; ``spread`` is the full range ``max - min``."""

    per_y_zero: np.ndarray = field(repr=False)
    mean_x_star: float
    max_dev: float
    spread: float


@dataclass
class Result2D:
    front: FrontStats
    steps: int
    converged: bool
    time: float = 0.0
    residual: float = math.inf
    trajectory: list = field(default_factory=list)
    layout: TwoDomainLayout | None = field(default=None, repr=False)
    state: np.ndarray | None = field(default=None, repr=False)
    profile: Profile | None = None
    warnings: list = field(default_factory=list)

    @property
    def mean_x_star(self) -> float:
        return self.front.mean_x_star

    @property
    def max_dev(self) -> float:
        return self.front.max_dev

    @property
    def spread(self) -> float:
        return self.front.spread


def front_stats(layout: TwoDomainLayout, state2d) -> FrontStats:
    """Zero of every y-line, their mean and the largest deviation from it."""
    U = np.asarray(state2d, dtype=float)
    zeros = np.empty(U.shape[1])
    for j in range(U.shape[1]):
        try:
            zeros[j] = locate_zero(layout, U[:, j], near=layout.x_star)
        except NoLayerError as exc:
            raise NoLayerError(f"y-line {j}: {exc}") from exc
    mean = float(np.mean(zeros))
    return FrontStats(zeros, mean, float(np.max(np.abs(zeros - mean))), float(np.ptp(zeros)))


def _rough_mean_zero(layout, U, near):
    """Mean over lines of the linearly interpolated zero (cheap watch)."""
    x = layout.nodes
    return float(np.mean([_kernels.linear_zero(x, U[:, j], near) for j in range(U.shape[1])]))


# --------------------------------------------------------------------------
# line-implicit steppers


class _LineStepper:
    """Frozen per-line propagator plus the explicit right-side coefficients.

    On interior rows::

        rhs = a U + nl_x U DxU + visc_y DyyU - adv_y u0 DyU + nl_y U DyU
    """

    def __init__(self, layout, eps, dt, bvals, *, nl_x, visc_y, adv_y=0.0, nl_y=0.0,
                 profile=None):
        x = layout.nodes
        adv = None if profile is None else profile(x)
        rea = None if profile is None else profile.deriv(x)
        self.layout = layout
        self.dt = dt
        self.P = np.ascontiguousarray(propagator(assemble(layout, eps, dt, adv, rea)))
        self.G1 = np.ascontiguousarray(layout.g1)
        self.mask = layout.interior.astype(float)
        self.bvals = np.ascontiguousarray(bvals, dtype=float)
        self.a = 1.0 / dt
        self.nl_x, self.visc_y, self.adv_y, self.nl_y = float(nl_x), float(visc_y), float(adv_y), float(nl_y)
        self.u0 = np.zeros(x.size) if profile is None else np.ascontiguousarray(profile(x))

    def _args(self, h):
        return (self.a, self.nl_x, self.visc_y, self.adv_y, self.nl_y, self.u0,
                FD6_D1, FD6_D2, 1.0 / h, 1.0 / h**2)

    def step(self, U, h, executor=None, workers=1):
        U = np.ascontiguousarray(U, dtype=float)
        out = np.empty_like(U)
        ny = U.shape[1]
        args = self._args(h)
        if executor is None or workers == 1:
            _kernels.step_columns_2d(self.P, self.G1, self.mask, self.bvals, U, out, 0, ny, *args)
        else:
            futs = [executor.submit(_kernels.step_columns_2d, self.P, self.G1, self.mask,
                                    self.bvals, U, out, j0, j1, *args)
                    for j0, j1 in _strips(ny, workers)]
            for f in futs:
                f.result()
        return out

    def advance(self, U, nsteps, h, bound, executor=None, workers=1):
        """``nsteps`` steps in place; returns ``(code, steps, residual)``."""
        if executor is None or workers == 1:
            return _kernels.advance_2d(self.P, self.G1, self.mask, self.bvals, U, nsteps,
                                       *self._args(h), self.dt, bound)
        ny = U.shape[1]
        res, mx = np.empty(ny), np.empty(ny)
        r = math.inf
        for k in range(nsteps):
            new = self.step(U, h, executor, workers)
            _kernels.column_stats(new, U, 0, ny, self.dt, res, mx)
            r = res.max()
            U[:, :] = new
            if not np.isfinite(r) or mx.max() > bound:
                return _kernels.BLOWUP, k + 1, r
        return _kernels.DONE, nsteps, r


def _strips(ny, workers):
    """Contiguous column ranges, one per worker."""
    edges = np.linspace(0, ny, min(workers, ny) + 1).round().astype(int)
    return [(int(a), int(b)) for a, b in zip(edges[:-1], edges[1:]) if b > a]


def _alg_line_stepper(layout, config, brow):
    bvals = np.vstack([brow, np.full(brow.size, -1.0)])
    return _LineStepper(layout, config.eps, config.dt, bvals, nl_x=-1.0,
                        visc_y=config.eps, nl_y=-config.beta)


def _profile_bvals(profile, brow, scale):
    left = (brow - profile(-1.0)) / scale
    right = np.full(brow.size, (-1.0 - profile(1.0)) / scale)
    return np.vstack([left, right])


def _profile_line_stepper(layout, config, brow, profile, beta):
    s = config.scale
    return _LineStepper(layout, config.eps, config.dt, _profile_bvals(profile, brow, s),
                        nl_x=-s, visc_y=config.eps, adv_y=beta, nl_y=-beta * s,
                        profile=profile)


def step_2d(layout, state2d, config: SolverConfig2D, executor=None):
    """``(I/dt - eps Dxx) U^n = U/dt + eps Dyy U - U DxU - beta U DyU`` per line."""
    brow = make_boundary(config.boundary, config.ygrid)
    st = _alg_line_stepper(layout, config, brow)
    return _checked(st.step(state2d, config.ygrid.h, executor, config.workers))


def step_2d_profile(layout, v2d, profile: Profile, config: SolverConfig2D, executor=None):
    """Correction step with ``u0 Dx + u0'`` implicit; requires ``beta = 0``."""
    if config.beta != 0.0:
        raise ValueError("step_2d_profile needs beta = 0; use step_2d_profile_beta")
    return step_2d_profile_beta(layout, v2d, profile, config, executor)


def step_2d_profile_beta(layout, v2d, profile: Profile, config: SolverConfig2D, executor=None):
    """As :func:`step_2d_profile` plus explicit ``-beta u0 DyV - beta s V DyV``."""
    _check_explicit_dt(config)
    brow = make_boundary(config.boundary, config.ygrid)
    st = _profile_line_stepper(layout, config, brow, profile, config.beta)
    return _checked(st.step(v2d, config.ygrid.h, executor, config.workers),
                    _v_bound(config.scale))


def _check_explicit_dt(config, notes=None):
    lim = config.explicit_dt_limit
    if config.dt > lim:
        msg = f"dt = {config.dt} exceeds the explicit y-diffusion limit {lim:.3g}"
        warnings.warn(msg, StabilityWarning, stacklevel=3)
        if notes is not None:
            notes.append(msg)


def _v_bound(scale):
    return (_kernels.BLOWUP_LIMIT + 1.0) / abs(scale)


def _checked(U, bound=_kernels.BLOWUP_LIMIT):
    if not np.all(np.isfinite(U)) or np.max(np.abs(U)) > bound:
        raise BlowUpError("solution blew up; time step likely violates the CFL limit")
    return U


def linear_initial_2d(layout, config: SolverConfig2D) -> np.ndarray:
    """1D linear interpolation of the mean data on every line, exact boundary rows."""
    x = layout.nodes
    left = 1.0 + config.delta0
    col = left + (-1.0 - left) * 0.5 * (x + 1.0)
    U = np.repeat(col[:, None], config.n_y, axis=1)
    U[0] = make_boundary(config.boundary, config.ygrid)
    U[-1] = -1.0
    return U


# --------------------------------------------------------------------------
# Fourier-mode correction scheme


def to_modes(v2d) -> np.ndarray:
    """Real-field y-modes ``k = 0 .. n_y/2`` (unnormalised ``rfft``)."""
    return np.fft.rfft(np.asarray(v2d, dtype=float), axis=-1)


def from_modes(modes, n_y) -> np.ndarray:
    return np.fft.irfft(modes, n=n_y, axis=-1)


class _FourierStepper:
    """One complex propagator per mode ``k`` of the correction.

    Implicit: ``1/dt - eps Dxx + u0 Dx + u0' + eps k^2 + i beta k u0``.
    The ``i beta k`` part is dropped for the Nyquist mode, whose derivative
    is not representable on a real grid.
    """

    def __init__(self, layout, config, brow, profile):
        self.layout = layout
        self.dt = config.dt
        self.n_y = config.n_y
        self.scale = config.scale
        self.beta = config.beta
        x = layout.nodes
        u0, du0 = profile(x), profile.deriv(x)
        self.k = np.arange(self.n_y // 2 + 1)
        self.k_odd = self.k.astype(float)
        self.k_odd[-1] = 0.0
        self.P = np.stack([
            propagator(assemble(layout, config.eps, config.dt, u0,
                                du0 + config.eps * k**2 + 1j * config.beta * ko * u0))
            for k, ko in zip(self.k, self.k_odd)
        ])
        self.G1 = layout.g1
        self.mask = layout.interior.astype(float)
        self.bmodes = to_modes(_profile_bvals(profile, brow, config.scale))

    def nonlinear_modes(self, modes):
        v = from_modes(modes, self.n_y)
        vx = self.G1 @ v
        w = v * vx
        if self.beta != 0.0:
            vy = from_modes(1j * self.k_odd * modes, self.n_y)
            w = w + self.beta * v * vy
        return to_modes(w)

    def step(self, modes, executor=None, workers=1):
        rhs = modes / self.dt - self.scale * self.nonlinear_modes(modes)
        rhs *= self.mask[:, None]
        rhs[0], rhs[-1] = self.bmodes
        out = np.empty_like(rhs)

        def block(k0, k1):
            out[:, k0:k1] = np.einsum("kij,jk->ik", self.P[k0:k1], rhs[:, k0:k1])

        nk = self.k.size
        if executor is None or workers == 1:
            block(0, nk)
        else:
            for f in [executor.submit(block, a, b) for a, b in _strips(nk, workers)]:
                f.result()
        _check_hermitian(out)
        return out


def _check_hermitian(modes, tol=1e-10):
    scale = max(float(np.max(np.abs(modes))), 1e-300)
    defect = max(float(np.max(np.abs(modes[:, 0].imag))), float(np.max(np.abs(modes[:, -1].imag))))
    if defect > tol * scale:
        raise HermitianError(f"real-field symmetry lost: defect {defect / scale:.2e}")


def step_2d_fourier(layout, v_modes, profile: Profile, config: SolverConfig2D, executor=None):
    """Mode-wise correction step; ``v_modes`` as returned by :func:`to_modes`."""
    brow = make_boundary(config.boundary, config.ygrid)
    st = _FourierStepper(layout, config, brow, profile)
    return st.step(np.asarray(v_modes, dtype=complex), executor, config.workers)


# --------------------------------------------------------------------------
# drivers


@dataclass
class _Run2D:
    config: SolverConfig2D
    layout: TwoDomainLayout
    steps: int = 0
    time: float = 0.0
    trajectory: list = field(default_factory=list)
    notes: list = field(default_factory=list)


def run_2d(config: SolverConfig2D, scheme=Scheme2D.ALG, initial=None) -> Result2D:
    """March a 2D problem to steady state.

    ``initial`` is ``None`` (linear data replicated over ``y``) or a
    ``(layout, U)`` pair.  The shared interface follows the y-averaged zero.
    Steady state: ``max|dU|/dt < steady_tol`` and the mean zero moved less
    than ``drift_tol`` over ``drift_window`` steps.
    """
    scheme = Scheme2D(scheme)
    if scheme is Scheme2D.PROFILE and config.beta != 0.0:
        raise ValueError("TwoDProfile needs beta = 0")
    if initial is None:
        left = 1.0 + config.delta0
        layout = build_layout(-1.0 + 2.0 * left / (left + 1.0), config.stretch, config.n_pts)
        U = linear_initial_2d(layout, config)
        from_linear = True
    else:
        layout, U = initial
        U = np.array(U, dtype=float)
        from_linear = False
    run = _Run2D(config, layout)
    executor = ThreadPoolExecutor(config.workers) if config.workers > 1 else None
    try:
        if scheme is Scheme2D.ALG:
            return _run_direct_2d(run, U, executor)
        return _run_profile_2d(run, U, from_linear, scheme, executor)
    finally:
        if executor is not None:
            executor.shutdown()


def _blowup(run):
    cfg = run.config
    return BlowUpError(f"blow-up after {run.steps} steps (t = {run.time:.4g}); "
                       f"dt = {cfg.dt} likely violates the CFL limit")


def _finish(run, U, converged, residual, profile=None):
    if not converged:
        run.notes.append(f"no steady state within {run.config.max_steps} steps")
    return Result2D(front_stats(run.layout, U), run.steps, converged, run.time, float(residual),
                    run.trajectory, run.layout, U, profile, list(run.notes))


def _run_direct_2d(run, U, executor):
    cfg = run.config
    h = cfg.ygrid.h
    brow = make_boundary(cfg.boundary, cfg.ygrid)
    st = _alg_line_stepper(run.layout, cfg, brow)
    z_prev = front_stats(run.layout, U).mean_x_star
    run.trajectory.append((0.0, z_prev))
    residual = math.inf
    while run.steps < cfg.max_steps:
        window = 0
        while window < cfg.drift_window and run.steps < cfg.max_steps:
            n = min(cfg.check_interval, cfg.max_steps - run.steps)
            code, taken, residual = st.advance(U, n, h, _kernels.BLOWUP_LIMIT, executor, cfg.workers)
            run.steps += taken
            run.time += taken * cfg.dt
            window += taken
            if code == _kernels.BLOWUP:
                raise _blowup(run)
            z = _rough_mean_zero(run.layout, U, run.layout.x_star)
            if not abs(z - run.layout.x_star) <= cfg.reloc:
                z = front_stats(run.layout, U).mean_x_star
                run.layout, U = relocate(run.layout, U, z)
                st = _alg_line_stepper(run.layout, cfg, brow)
        z = front_stats(run.layout, U).mean_x_star
        run.trajectory.append((run.time, z))
        if residual < cfg.steady_tol and abs(z - z_prev) < cfg.drift_tol:
            return _finish(run, U, True, residual)
        z_prev = z
    return _finish(run, U, False, residual)


def _run_profile_2d(run, U, from_linear, scheme, executor):
    """Correction schemes with profile refresh.

    The profile is re-centred on the y-averaged zero once the y-average of
    ``V`` at the profile centre exceeds ``refresh_factor``; this isolates
    the translation of the layer from its steady y-modulation.
    """
    cfg = run.config
    h = cfg.ygrid.h
    s = cfg.scale
    beta = cfg.beta
    fourier = scheme is Scheme2D.FOURIER
    if not fourier:
        _check_explicit_dt(cfg, run.notes)
    brow = make_boundary(cfg.boundary, cfg.ygrid)
    x_p = front_stats(run.layout, U).mean_x_star
    if from_linear:
        U = np.repeat(Profile(x_p, cfg.eps)(run.layout.nodes)[:, None], cfg.n_y, axis=1)
        U[0], U[-1] = brow, -1.0
    bound = _v_bound(s)

    def rebuild(U, x_p):
        if abs(x_p - run.layout.x_star) > cfg.reloc:
            run.layout, U = relocate(run.layout, U, x_p)
        profile = Profile(x_p, cfg.eps)
        V = (U - profile(run.layout.nodes)[:, None]) / s
        bv = _profile_bvals(profile, brow, s)
        V[0], V[-1] = bv
        if fourier:
            st = _FourierStepper(run.layout, cfg, brow, profile)
        else:
            st = _profile_line_stepper(run.layout, cfg, brow, profile, beta)
        row = run.layout.evaluation_row(x_p)
        return profile, V, st, row

    profile, V, st, row = rebuild(U, x_p)
    modes = to_modes(V) if fourier else None
    run.trajectory.append((0.0, x_p))
    z_prev = x_p
    residual = math.inf
    while run.steps < cfg.max_steps:
        window = 0
        while window < cfg.drift_window and run.steps < cfg.max_steps:
            n = min(cfg.check_interval, cfg.max_steps - run.steps)
            if fourier:
                code, taken, res_v, modes = _advance_fourier(st, modes, n, bound, executor, cfg.workers)
                V = from_modes(modes, cfg.n_y)
            else:
                code, taken, res_v = st.advance(V, n, h, bound, executor, cfg.workers)
            residual = abs(s) * res_v
            run.steps += taken
            run.time += taken * cfg.dt
            window += taken
            if code == _kernels.BLOWUP:
                raise _blowup(run)
            if abs(float(np.mean(row @ V))) > cfg.refresh_factor:
                U = profile(run.layout.nodes)[:, None] + s * V
                x_p = front_stats(run.layout, U).mean_x_star
                profile, V, st, row = rebuild(U, x_p)
                if fourier:
                    modes = to_modes(V)
        U = profile(run.layout.nodes)[:, None] + s * V
        z = front_stats(run.layout, U).mean_x_star
        run.trajectory.append((run.time, z))
        if residual < cfg.steady_tol and abs(z - z_prev) < cfg.drift_tol:
            return _finish(run, U, True, residual, profile)
        z_prev = z
    U = profile(run.layout.nodes)[:, None] + s * V
    return _finish(run, U, False, residual, profile)


def _advance_fourier(st, modes, nsteps, bound, executor, workers):
    prev = modes
    for k in range(nsteps):
        prev, modes = modes, st.step(modes, executor, workers)
        if not np.all(np.isfinite(modes)):
            return _kernels.BLOWUP, k + 1, math.inf, modes
    dv = from_modes(modes - prev, st.n_y)
    v = from_modes(modes, st.n_y)
    code = _kernels.BLOWUP if np.max(np.abs(v)) > bound else _kernels.DONE
    return code, nsteps, float(np.max(np.abs(dv))) / st.dt, modes
