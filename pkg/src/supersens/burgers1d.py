"""Time-marching solvers for ``-eps u_xx + u_t + u u_x = 0`` on ``(-1, 1)``.

Boundary data are ``u(-1) = 1 + delta`` and ``u(1) = -1``.  Four schemes are
provided, all with the diffusion (or its cutoff part) implicit and the
convection explicit:

``alg``     plain semi-implicit Euler
``qui``     diffusion multiplied by a cutoff ``H`` around the layer, the
            ``(1 - H)`` part dropped
``newqui``  as ``qui`` but with the ``(1 - H)`` part kept explicitly
``alg_v``   correction ``V`` about the tanh profile, ``U = u0 + delta V``,
            with the linearised convection implicit

:func:`run_to_steady` drives any of them to steady state, moving the
two-domain interface along with the layer, and :func:`steady_oracle` gives
the exact steady state for comparison.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from . import _kernels
from .decomp import (
    TwoDomainLayout,
    assemble,
    build_layout,
    locate_zero,
    propagator,
    relocate,
)
from .spectral import CONDITION_LIMIT, condition_estimate

__all__ = [
    "Scheme",
    "SolverConfig1D",
    "Profile",
    "CutoffConfig",
    "SteadyResult",
    "BlowUpError",
    "OracleError",
    "ConditioningWarning",
    "step_alg",
    "step_qui",
    "step_newqui",
    "step_alg_v",
    "compose_u",
    "locate_zero",
    "linear_initial",
    "run_to_steady",
    "steady_oracle",
]


class BlowUpError(FloatingPointError):
    pass


class OracleError(RuntimeError):
    pass


class ConditioningWarning(RuntimeWarning):
    pass


class Scheme(str, enum.Enum):
    ALG = "Alg"
    QUI = "Qui"
    NEWQUI = "NewQui"
    ALGV = "AlgV"


@dataclass(frozen=True)
class CutoffConfig:
    """Smooth cutoff ``H`` centred on the layer.

    ``H = 1`` for ``|x - x*| < half_width / 2`` and ``H = 0`` beyond
    ``3 half_width / 2``; in between ``H = (1 + tanh(sharpness (half_width -
    |x - x*|))) / 2``.
    """

    half_width: float
    sharpness: float = 200.0

    def __call__(self, x, x_star):
        d = np.abs(np.asarray(x, dtype=float) - x_star)
        H = 0.5 * (1.0 + np.tanh(self.sharpness * (self.half_width - d)))
        H = np.where(d < 0.5 * self.half_width, 1.0, H)
        return np.where(d > 1.5 * self.half_width, 0.0, H)


@dataclass(frozen=True)
class SolverConfig1D:
    eps: float
    delta: float
    n_pts: int = 39
    dt: float = 0.02
    alpha: float | None = None
    relocation_distance: float | None = None
    steady_tol: float = 1e-10
    max_steps: int = 20_000_000
    refresh_factor: float = 10.0
    drift_window: int = 1000
    drift_tol: float = 1e-6

    def __post_init__(self):
        if not 0 < self.eps < 1:
            raise ValueError(f"eps must lie in (0, 1), got {self.eps}")
        if not -1 < self.delta < 1:
            raise ValueError(f"delta must be below 1, got {self.delta}")
        if not self.dt > 0:
            raise ValueError("dt must be positive")

    @property
    def stretch(self) -> float:
        return math.sqrt(self.eps) if self.alpha is None else self.alpha

    @property
    def reloc(self) -> float:
        return self.eps if self.relocation_distance is None else self.relocation_distance

    @property
    def left_value(self) -> float:
        return 1.0 + self.delta

    @property
    def right_value(self) -> float:
        return -1.0


@dataclass(frozen=True)
class Profile:
    """Reference state ``u0(x) = -tanh((x - x_star) / (2 eps))``."""

    x_star: float
    eps: float

    def __call__(self, x):
        return -np.tanh((np.asarray(x, dtype=float) - self.x_star) / (2.0 * self.eps))

    def deriv(self, x):
        z = (np.asarray(x, dtype=float) - self.x_star) / (2.0 * self.eps)
        return -0.5 / self.eps / np.cosh(z) ** 2

    def deriv2(self, x):
        z = (np.asarray(x, dtype=float) - self.x_star) / (2.0 * self.eps)
        return 0.5 / self.eps**2 * np.tanh(z) / np.cosh(z) ** 2


@dataclass
class SteadyResult:
    x_star_inf: float
    steps: int
    converged: bool
    trajectory: list = field(default_factory=list)
    time: float = 0.0
    residual: float = math.inf
    layout: TwoDomainLayout | None = field(default=None, repr=False)
    state: np.ndarray | None = field(default=None, repr=False)
    profile: Profile | None = None
    warnings: list = field(default_factory=list)


# --------------------------------------------------------------------------
# single steps


class _Stepper:
    """Frozen implicit operator plus the explicit-rhs coefficients.

    ``rhs = mask (a U + nl U G1U + w2 G2U) + bvec`` and ``U_new = P rhs``.
    """

    def __init__(self, layout, eps, dt, bvals, nl=-1.0, viscosity=None, w2=None,
                 advection=None, reaction=None):
        self.layout = layout
        self.dt = dt
        self.system = assemble(layout, eps, dt, advection, reaction, viscosity)
        self.P = np.ascontiguousarray(propagator(self.system))
        self.G1 = np.ascontiguousarray(layout.g1)
        self.G2 = np.ascontiguousarray(layout.g2)
        self.mask = layout.interior.astype(float)
        self.a = 1.0 / dt
        self.nl = float(nl)
        self.w2 = np.zeros(layout.n_global) if w2 is None else np.asarray(w2, dtype=float)
        self.bvec = np.zeros(layout.n_global)
        self.bvec[0], self.bvec[-1] = bvals

    def rhs(self, U):
        r = self.a * U + self.nl * U * (self.G1 @ U) + self.w2 * (self.G2 @ U)
        return self.mask * r + self.bvec

    def step(self, U, bound=_kernels.BLOWUP_LIMIT):
        new = self.P @ self.rhs(U)
        _check_blowup(new, bound)
        return new

    def anchor(self, U, near):
        """Reference for the in-loop zero watch (same estimator as the loop)."""
        return _kernels.linear_zero(self.layout.nodes, U, near)

    def advance(self, U, nsteps, *, zero_tol=0.0, zero_ref=0.0, row=None, row_limit=0.0,
                bound=_kernels.BLOWUP_LIMIT, steady_tol=0.0):
        """Compiled multi-step loop on ``U`` in place; see ``_kernels.advance_1d``."""
        if row is None:
            row = np.zeros(U.size)
        return _kernels.advance_1d(
            self.P, self.G1, self.G2, self.a, self.nl, self.w2, self.mask, self.bvec,
            U, int(nsteps), self.dt, self.layout.nodes, zero_tol, zero_ref, row,
            row_limit, bound, steady_tol,
        )

    def condition(self):
        return condition_estimate(self.system.dense())


def _check_blowup(U, bound):
    if not np.all(np.isfinite(U)) or np.max(np.abs(U)) > bound:
        raise BlowUpError("solution blew up; time step likely violates the CFL limit")


def _alg_stepper(layout, config):
    return _Stepper(layout, config.eps, config.dt, (config.left_value, config.right_value))


def _cutoff_stepper(layout, config, cutoff, x_star_now, explicit_rest):
    H = cutoff(layout.nodes, x_star_now)
    w2 = config.eps * (1.0 - H) if explicit_rest else None
    return _Stepper(layout, config.eps, config.dt, (config.left_value, config.right_value),
                    viscosity=H, w2=w2)


def _profile_bvals(profile, delta, left, right):
    return ((left - profile(-1.0)) / delta, (right - profile(1.0)) / delta)


def _profile_stepper(layout, profile, config):
    x = layout.nodes
    bvals = _profile_bvals(profile, config.delta, config.left_value, config.right_value)
    return _Stepper(layout, config.eps, config.dt, bvals, nl=-config.delta,
                    advection=profile(x), reaction=profile.deriv(x))


def step_alg(layout, state, config: SolverConfig1D):
    """``(I/dt - eps D2) U^n = U^{n-1}/dt - U^{n-1} D U^{n-1}``."""
    return _alg_stepper(layout, config).step(np.asarray(state, dtype=float))


def step_qui(layout, state, config, cutoff: CutoffConfig, x_star_now: float):
    """Cutoff viscosity ``eps H D2`` implicit, the rest of the diffusion dropped."""
    return _cutoff_stepper(layout, config, cutoff, x_star_now, False).step(np.asarray(state, float))


def step_newqui(layout, state, config, cutoff: CutoffConfig, x_star_now: float):
    """``eps H D2`` implicit and ``eps (1 - H) D2`` explicit."""
    return _cutoff_stepper(layout, config, cutoff, x_star_now, True).step(np.asarray(state, float))


def step_alg_v(layout, v_state, profile: Profile, config):
    """Correction step, linearised convection ``u0 D + u0'`` implicit.

    The bound check is applied to ``U = u0 + delta V``.
    """
    st = _profile_stepper(layout, profile, config)
    return st.step(np.asarray(v_state, float), bound=_v_bound(config.delta))


def _v_bound(delta):
    return (_kernels.BLOWUP_LIMIT + 1.0) / abs(delta)


def compose_u(profile: Profile, v_state, delta, x):
    """``U = u0 + delta V`` at nodes ``x``."""
    return profile(x) + delta * np.asarray(v_state)


def linear_initial(layout, config) -> np.ndarray:
    x = layout.nodes
    return config.left_value + (config.right_value - config.left_value) * 0.5 * (x + 1.0)


# --------------------------------------------------------------------------
# steady-state driver


@dataclass
class _Run:
    config: SolverConfig1D
    layout: TwoDomainLayout
    state: np.ndarray
    steps: int = 0
    time: float = 0.0
    trajectory: list = field(default_factory=list)
    notes: list = field(default_factory=list)


def _initial_layout_state(config, initial):
    if initial is None or (isinstance(initial, str) and initial == "LinearInterp"):
        layout = build_layout(_zero_of_linear(config), config.stretch, config.n_pts)
        return layout, linear_initial(layout, config), True
    layout, state = initial
    return layout, np.array(state, dtype=float), False


def _zero_of_linear(config):
    l, r = config.left_value, config.right_value
    return -1.0 + 2.0 * l / (l - r)


def run_to_steady(config: SolverConfig1D, scheme=Scheme.ALG, initial=None,
                  cutoff: CutoffConfig | None = None) -> SteadyResult:
    """March to steady state.

    ``initial`` is ``None``/``"LinearInterp"`` (linear interpolation of the
    boundary data) or a ``(layout, values)`` pair.  The interface follows the
    layer whenever the zero moves more than ``config.reloc``.  Steady state is
    declared when ``max|U^n - U^{n-1}| / dt < steady_tol`` and the zero moved
    less than ``drift_tol`` over the last ``drift_window`` steps.
    """
    scheme = Scheme(scheme)
    if scheme in (Scheme.QUI, Scheme.NEWQUI) and cutoff is None:
        raise ValueError(f"{scheme.value} needs a CutoffConfig")
    layout, state, from_linear = _initial_layout_state(config, initial)
    run = _Run(config, layout, state)
    if scheme is Scheme.ALGV:
        return _run_profile(run, from_linear)
    return _run_direct(run, scheme, cutoff)


def _make_direct(run, scheme, cutoff):
    if scheme is Scheme.ALG:
        return _alg_stepper(run.layout, run.config)
    # the cutoff follows the interface, i.e. it moves only on relocation
    x_c = run.layout.x_star
    return _cutoff_stepper(run.layout, run.config, cutoff, x_c, scheme is Scheme.NEWQUI)


def _check_conditioning(run, stepper):
    kappa = stepper.condition()
    if kappa > CONDITION_LIMIT:
        msg = f"implicit operator condition estimate {kappa:.2e} exceeds {CONDITION_LIMIT:.0e}"
        warnings.warn(msg, ConditioningWarning, stacklevel=3)
        run.notes.append(msg)


def _run_direct(run, scheme, cutoff):
    cfg = run.config
    center = locate_zero(run.layout, run.state)
    stepper = _make_direct(run, scheme, cutoff)
    _check_conditioning(run, stepper)
    ref = stepper.anchor(run.state, center)
    z_prev = center
    run.trajectory.append((0.0, center))
    residual = math.inf
    window_steps = 0
    while run.steps < cfg.max_steps:
        n = min(cfg.drift_window - window_steps, cfg.max_steps - run.steps)
        code, taken, residual = stepper.advance(run.state, n, zero_tol=cfg.reloc, zero_ref=ref)
        run.steps += taken
        run.time += taken * cfg.dt
        window_steps += taken
        if code == _kernels.BLOWUP:
            raise BlowUpError(
                f"blow-up after {run.steps} steps (t = {run.time:.4g}); "
                f"dt = {cfg.dt} likely violates the CFL limit"
            )
        if code == _kernels.WATCH:
            center = locate_zero(run.layout, run.state, near=center)
            run.layout, run.state = relocate(run.layout, run.state, center)
            stepper = _make_direct(run, scheme, cutoff)
            ref = stepper.anchor(run.state, center)
            if window_steps < cfg.drift_window:
                continue
        z = locate_zero(run.layout, run.state, near=center)
        run.trajectory.append((run.time, z))
        window_steps = 0
        if residual < cfg.steady_tol and abs(z - z_prev) < cfg.drift_tol:
            return _result(run, z, True, residual)
        z_prev = z
    return _result(run, locate_zero(run.layout, run.state), False, residual)


def _result(run, z, converged, residual, profile=None, state=None):
    if not converged:
        run.notes.append(f"no steady state within {run.config.max_steps} steps")
    return SteadyResult(
        x_star_inf=float(z), steps=run.steps, converged=converged,
        trajectory=run.trajectory, time=run.time, residual=float(residual),
        layout=run.layout, state=run.state if state is None else state,
        profile=profile, warnings=list(run.notes),
    )


def _run_profile(run, from_linear):
    """Profile-corrected marching (``alg_v``) with profile refresh.

    Starting from linear data, the state is first replaced by the tanh
    profile through the zero of that data.  The profile is re-centred on the zero of ``U`` whenever
    ``|U(x_p)| = delta |V(x_p)|`` at the current profile centre ``x_p``
    exceeds ``refresh_factor * delta``.  The interface is moved only when the
    profile centre drifts more than ``config.reloc`` away from it, so most
    refreshes need no interpolation.
    """
    cfg = run.config
    delta = cfg.delta
    U = run.state
    x_p = locate_zero(run.layout, U)
    if from_linear:
        U = Profile(x_p, cfg.eps)(run.layout.nodes)
        U[0], U[-1] = cfg.left_value, cfg.right_value
    bound = _v_bound(delta)

    def rebuild(U, x_p):
        if abs(x_p - run.layout.x_star) > cfg.reloc:
            run.layout, U = relocate(run.layout, U, x_p)
        profile = Profile(x_p, cfg.eps)
        V = (U - profile(run.layout.nodes)) / delta
        V[0], V[-1] = _profile_bvals(profile, delta, cfg.left_value, cfg.right_value)
        stepper = _profile_stepper(run.layout, profile, cfg)
        row = np.ascontiguousarray(run.layout.evaluation_row(x_p))
        return profile, V, stepper, row

    profile, V, stepper, row = rebuild(U, x_p)
    _check_conditioning(run, stepper)
    run.trajectory.append((0.0, x_p))
    z_prev = x_p
    residual = math.inf
    window_steps = 0
    while run.steps < cfg.max_steps:
        n = min(cfg.drift_window - window_steps, cfg.max_steps - run.steps)
        code, taken, res_v = stepper.advance(V, n, row=row, row_limit=cfg.refresh_factor,
                                             bound=bound)
        residual = abs(delta) * res_v
        run.steps += taken
        run.time += taken * cfg.dt
        window_steps += taken
        if code == _kernels.BLOWUP:
            raise BlowUpError(
                f"blow-up after {run.steps} steps (t = {run.time:.4g}); "
                f"dt = {cfg.dt} likely violates the CFL limit"
            )
        U = compose_u(profile, V, delta, run.layout.nodes)
        if code == _kernels.WATCH:
            x_p = locate_zero(run.layout, U, near=profile.x_star)
            profile, V, stepper, row = rebuild(U, x_p)
            if window_steps < cfg.drift_window:
                continue
        z = locate_zero(run.layout, U, near=profile.x_star)
        run.trajectory.append((run.time, z))
        window_steps = 0
        if residual < cfg.steady_tol and abs(z - z_prev) < cfg.drift_tol:
            run.state = V
            return _result(run, z, True, residual, profile=profile, state=U)
        z_prev = z
    run.state = V
    U = compose_u(profile, V, delta, run.layout.nodes)
    return _result(run, locate_zero(run.layout, U), False, residual, profile=profile, state=U)


# --------------------------------------------------------------------------
# exact steady state


def _sech2(z):
    e = np.exp(-2.0 * np.abs(z))
    return 4.0 * e / (1.0 + e) ** 2


def steady_oracle(eps: float, delta: float, tol: float = 1e-13, max_iter: int = 200):
    """Exact steady state ``u = -c tanh(c (x - x*) / (2 eps))``.

    Solves ``c tanh(c (1 + x*) / (2 eps)) = 1 + delta`` and
    ``c tanh(c (1 - x*) / (2 eps)) = 1`` by damped Newton, falling back to
    bisection on ``c`` (with ``x*`` eliminated through the second equation).
    Returns ``(c, x_star, u)`` with ``u`` a callable.
    """
    if eps <= 0 or delta < 0:
        raise ValueError("need eps > 0 and delta >= 0")
    k = 0.5 / eps

    def F(c, x):
        return np.array([c * np.tanh(c * (1 + x) * k) - (1 + delta),
                         c * np.tanh(c * (1 - x) * k) - 1.0])

    if delta == 0.0:
        c = brentq(lambda c: c * np.tanh(c * k) - 1.0, 1.0, 2.0, xtol=1e-16, rtol=1e-15)
        x = 0.0
    else:
        c, x = _oracle_newton(F, k, delta, eps, tol, max_iter)
        if c is None:
            c, x = _oracle_bisect(F, k, delta, tol)
    r = F(c, x)
    if np.max(np.abs(r)) > tol:
        raise OracleError(f"oracle residual {np.max(np.abs(r)):.2e} above {tol:.0e}")

    def u(xx):
        return -c * np.tanh(c * (np.asarray(xx, dtype=float) - x) * k)

    return float(c), float(x), u


def _oracle_newton(F, k, delta, eps, tol, max_iter):
    c = 1.0 + 0.5 * delta
    x = 1.0 - eps * math.log(2.0 / delta)
    x = min(max(x, -0.99), 0.99)
    r = F(c, x)
    for _ in range(max_iter):
        if np.max(np.abs(r)) <= tol:
            return c, x
        z1, z2 = c * (1 + x) * k, c * (1 - x) * k
        s1, s2 = _sech2(z1), _sech2(z2)
        J = np.array([
            [np.tanh(z1) + c * s1 * (1 + x) * k, c * c * s1 * k],
            [np.tanh(z2) + c * s2 * (1 - x) * k, -c * c * s2 * k],
        ])
        try:
            dc, dx = np.linalg.solve(J, -r)
        except np.linalg.LinAlgError:
            return None, None
        lam = 1.0
        while lam > 1e-6:
            cn, xn = c + lam * dc, x + lam * dx
            if cn > 0 and abs(xn) < 1:
                rn = F(cn, xn)
                if np.max(np.abs(rn)) < np.max(np.abs(r)):
                    break
            lam *= 0.5
        else:
            return None, None
        c, x, r = cn, xn, rn
    return (c, x) if np.max(np.abs(r)) <= tol else (None, None)


def _oracle_bisect(F, k, delta, tol):
    def x_of(c):
        return 1.0 - np.arctanh(1.0 / c) / (c * k)

    def g(c):
        return c * np.tanh(c * (1 + x_of(c)) * k) - (1 + delta)

    lo, hi = np.nextafter(1.0, 2.0), 1.0 + delta
    try:
        c = brentq(g, lo, hi, xtol=1e-16, rtol=1e-15, maxiter=500)
    except ValueError as exc:
        raise OracleError(f"no steady state bracket: {exc}") from exc
    return c, x_of(c)
