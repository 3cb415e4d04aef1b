"""Two-subdomain layout around a moving interface and its block solver.

Global node vectors are stored in ascending ``x``: ``2 n_pts - 1`` values
running from ``x = -1`` through the interface ``x_star`` to ``x = 1``.  The
interface node is shared by both subdomains, which gives value continuity
for free; derivative continuity is imposed by one extra row.

With both Dirichlet values eliminated the linear system has
``2 (n_pts - 2) + 1`` unknowns ordered ``[left interior | interface | right
interior]``.  The left and right interior blocks couple only through the
interface unknown, so a solve needs two independent block eliminations and
one scalar Schur complement.
"""

from __future__ import annotations

import warnings
from concurrent.futures import Executor
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import lu_factor, lu_solve
from scipy.optimize import brentq

from .spectral import (
    CollocationGrid,
    barycentric_interp,
    Side,
    StretchedMap,
    build_grid,
    interp_matrix,
)

__all__ = [
    "TwoDomainLayout",
    "BlockSystem",
    "LayoutError",
    "AssemblyError",
    "SingularSystemError",
    "NoLayerError",
    "MultipleCrossingsWarning",
    "build_layout",
    "assemble",
    "solve",
    "relocate",
    "locate_zero",
    "sign_changes",
]

X_STAR_LIMIT = 0.999


class LayoutError(ValueError):
    pass


class AssemblyError(ValueError):
    pass


class SingularSystemError(ArithmeticError):
    pass


class NoLayerError(ValueError):
    pass


class MultipleCrossingsWarning(RuntimeWarning):
    pass


@dataclass(frozen=True, eq=False)
class TwoDomainLayout:
    x_star: float
    alpha: float
    n_pts: int
    left: CollocationGrid = field(repr=False)
    right: CollocationGrid = field(repr=False)

    @property
    def n_global(self) -> int:
        return 2 * self.n_pts - 1

    @property
    def interface(self) -> int:
        return self.n_pts - 1

    @property
    def left_idx(self) -> np.ndarray:
        # local node j of the left grid (j = 0 is x_star) -> global index
        return self.n_pts - 1 - np.arange(self.n_pts)

    @property
    def right_idx(self) -> np.ndarray:
        # local node j of the right grid (j = 0 is x = 1) -> global index
        return 2 * self.n_pts - 2 - np.arange(self.n_pts)

    @property
    def nodes(self) -> np.ndarray:
        return self._cache["nodes"]

    @property
    def interior(self) -> np.ndarray:
        """Boolean mask of nodes where the PDE is collocated."""
        return self._cache["interior"]

    @property
    def g1(self) -> np.ndarray:
        """Global first-derivative operator (rows from the owning subdomain)."""
        return self._cache["g1"]

    @property
    def g2(self) -> np.ndarray:
        return self._cache["g2"]

    @property
    def interface_row(self) -> np.ndarray:
        """Derivative jump ``U_x(x*-) - U_x(x*+)`` as a row on global nodes."""
        return self._cache["jump"]

    @property
    def _cache(self) -> dict:
        cache = self.__dict__.get("_arrays")
        if cache is None:
            cache = _global_arrays(self)
            object.__setattr__(self, "_arrays", cache)
        return cache

    def evaluate(self, values, x) -> np.ndarray:
        """Piecewise-Chebyshev interpolant of global ``values`` at points ``x``.

        ``values`` has the global node count as its leading dimension.
        """
        values = np.asarray(values)
        x = np.atleast_1d(np.asarray(x, dtype=float))
        if np.any(np.abs(x) > 1.0 + 1e-12):
            raise LayoutError("evaluation point outside [-1, 1]")
        out = np.empty((x.size,) + values.shape[1:], dtype=values.dtype)
        on_left = x <= self.x_star
        for mask, grid, idx in (
            (on_left, self.left, self.left_idx),
            (~on_left, self.right, self.right_idx),
        ):
            if np.any(mask):
                out[mask] = grid.interpolate(values[idx], x[mask])
        return out

    def evaluation_row(self, x: float) -> np.ndarray:
        """Row ``r`` with ``r @ values`` equal to the interpolant at ``x``."""
        row = np.zeros(self.n_global)
        grid, idx = (self.left, self.left_idx) if x <= self.x_star else (self.right, self.right_idx)
        row[idx] = interp_matrix(grid.ref_nodes, grid.map.inverse(x))[0]
        return row


def _global_arrays(layout: TwoDomainLayout) -> dict:
    n = layout.n_pts
    ng = layout.n_global
    li, ri = layout.left_idx, layout.right_idx
    nodes = np.empty(ng)
    nodes[li] = layout.left.phys_nodes
    nodes[ri] = layout.right.phys_nodes
    nodes[layout.interface] = layout.x_star

    interior = np.ones(ng, dtype=bool)
    interior[[0, ng - 1, layout.interface]] = False

    g1 = np.zeros((ng, ng))
    g2 = np.zeros((ng, ng))
    for grid, idx in ((layout.left, li), (layout.right, ri)):
        g1[np.ix_(idx, idx)] = grid.d1
        g2[np.ix_(idx, idx)] = grid.d2
    # interface rows: mean of the two one-sided values
    c = layout.interface
    for g, dl, dr in ((g1, layout.left.d1, layout.right.d1), (g2, layout.left.d2, layout.right.d2)):
        g[c] = 0.0
        g[c, li] += 0.5 * dl[0]
        g[c, ri] += 0.5 * dr[n - 1]

    jump = np.zeros(ng)
    jump[li] += layout.left.d1[0]
    jump[ri] -= layout.right.d1[n - 1]
    out = dict(nodes=nodes, interior=interior, g1=g1, g2=g2, jump=jump)
    for arr in out.values():
        arr.setflags(write=False)
    return out


def build_layout(x_star: float, alpha: float, n_pts: int) -> TwoDomainLayout:
    if not abs(x_star) < X_STAR_LIMIT:
        raise LayoutError(f"interface {x_star} too close to the boundary")
    left = build_grid(StretchedMap(Side.LEFT, alpha, -1.0, x_star), n_pts)
    right = build_grid(StretchedMap(Side.RIGHT, alpha, x_star, 1.0), n_pts)
    return TwoDomainLayout(float(x_star), float(alpha), int(n_pts), left, right)


# --------------------------------------------------------------------------
# block system


@dataclass(frozen=True, eq=False)
class BlockSystem:
    """Eliminated system ``A u = r`` with the arrow-shaped block structure

    ::

        [ A1     b1   0     ] [u_L]   [r_L]
        [ a1^T   c    b2^T  ] [u_c] = [r_c]
        [ 0      a2   A2    ] [u_R]   [r_R]

    ``boundary_cols`` holds the columns of the eliminated Dirichlet values
    (``x = -1`` and ``x = 1``), used to fold boundary data into the rhs.
    """

    a1: np.ndarray = field(repr=False)
    b1: np.ndarray = field(repr=False)
    a1_row: np.ndarray = field(repr=False)
    c: float
    b2_row: np.ndarray = field(repr=False)
    a2_col: np.ndarray = field(repr=False)
    a2: np.ndarray = field(repr=False)
    boundary_cols: np.ndarray = field(repr=False)

    @property
    def n_left(self) -> int:
        return self.a1.shape[0]

    @property
    def order(self) -> int:
        return self.a1.shape[0] + 1 + self.a2.shape[0]

    def dense(self) -> np.ndarray:
        nl, nr = self.n_left, self.a2.shape[0]
        A = np.zeros((self.order, self.order), dtype=np.result_type(self.a1, self.a2))
        A[:nl, :nl] = self.a1
        A[:nl, nl] = self.b1
        A[nl, :nl] = self.a1_row
        A[nl, nl] = self.c
        A[nl, nl + 1 :] = self.b2_row
        A[nl + 1 :, nl] = self.a2_col
        A[nl + 1 :, nl + 1 :] = self.a2
        return A

    @property
    def _factors(self):
        f = self.__dict__.get("_lu")
        if f is None:
            lu1 = lu_factor(self.a1, check_finite=True)
            lu2 = lu_factor(self.a2, check_finite=True)
            z1 = lu_solve(lu1, self.b1)
            z2 = lu_solve(lu2, self.a2_col)
            pivot = self.c - self.a1_row @ z1 - self.b2_row @ z2
            if abs(pivot) < 1e-14:
                raise SingularSystemError(f"interface pivot {pivot:.3e}")
            f = (lu1, lu2, z1, z2, pivot)
            object.__setattr__(self, "_lu", f)
        return f


def assemble(
    layout: TwoDomainLayout,
    eps: float,
    dt: float,
    advection=None,
    reaction=None,
    viscosity=None,
    shift=0.0,
) -> BlockSystem:
    """Assemble ``(1/dt) I - eps V D2 + a D1 + (r + shift) I`` at interior nodes.

    ``advection``/``reaction`` are per-node coefficients (``u0`` and ``u0'``
    for the profile-corrected schemes); ``viscosity`` multiplies the diffusion
    row-wise (the cutoff ``H``); ``shift`` adds a constant, possibly complex,
    diagonal term (Fourier-mode schemes).
    """
    if not eps >= 0 or not dt > 0:
        raise AssemblyError("need eps >= 0 and dt > 0")
    M = full_operator(layout, eps, dt, advection, reaction, viscosity, shift)
    jump = layout.interface_row
    if not np.any(jump[1:-1]):
        raise AssemblyError("interface row is identically zero")
    return split_blocks(layout, M)


def full_operator(layout, eps, dt, advection=None, reaction=None, viscosity=None, shift=0.0):
    """Operator on the full global node vector; Dirichlet rows are identity."""
    ng = layout.n_global
    dtype = np.result_type(float, shift, *(np.asarray(a) for a in (advection, reaction) if a is not None))
    M = np.zeros((ng, ng), dtype=dtype)
    diag = np.full(ng, 1.0 / dt, dtype=dtype) + shift
    if reaction is not None:
        diag = diag + np.asarray(reaction)
    visc = eps if viscosity is None else eps * np.asarray(viscosity)[:, None]
    M -= visc * layout.g2
    if advection is not None:
        M += np.asarray(advection)[:, None] * layout.g1
    M[np.diag_indices(ng)] += diag
    c = layout.interface
    M[c] = layout.interface_row
    M[0] = 0.0
    M[-1] = 0.0
    M[0, 0] = M[-1, -1] = 1.0
    return M


def split_blocks(layout: TwoDomainLayout, M: np.ndarray) -> BlockSystem:
    n = layout.n_pts
    c = layout.interface
    L = np.arange(1, c)
    R = np.arange(c + 1, 2 * n - 2)
    U = np.arange(1, 2 * n - 2)
    if np.any(M[np.ix_(L, R)]) or np.any(M[np.ix_(R, L)]):
        raise AssemblyError("subdomain blocks are coupled away from the interface")
    return BlockSystem(
        a1=M[np.ix_(L, L)],
        b1=M[L, c],
        a1_row=M[c, L],
        c=M[c, c],
        b2_row=M[c, R],
        a2_col=M[R, c],
        a2=M[np.ix_(R, R)],
        boundary_cols=M[np.ix_(U, [0, 2 * n - 2])],
    )


def solve(system: BlockSystem, rhs, executor: Executor | None = None) -> np.ndarray:
    """Two-ended block elimination followed by the scalar interface solve.

    ``rhs`` may be a vector or a matrix of right-hand sides (one per column).
    With an ``executor`` the two subdomain eliminations are submitted as
    independent tasks.
    """
    lu1, lu2, z1, z2, pivot = system._factors
    rhs = np.asarray(rhs)
    nl = system.n_left
    r1, rc, r2 = rhs[:nl], rhs[nl], rhs[nl + 1 :]
    if executor is None:
        y1 = lu_solve(lu1, r1)
        y2 = lu_solve(lu2, r2)
    else:
        f1 = executor.submit(lu_solve, lu1, r1)
        f2 = executor.submit(lu_solve, lu2, r2)
        y1, y2 = f1.result(), f2.result()
    uc = (rc - system.a1_row @ y1 - system.b2_row @ y2) / pivot
    uc = np.asarray(uc)[None]
    z1 = z1.reshape((-1,) + (1,) * (rhs.ndim - 1))
    z2 = z2.reshape((-1,) + (1,) * (rhs.ndim - 1))
    return np.concatenate([y1 - z1 * uc, uc, y2 - z2 * uc])


def solve_global(system: BlockSystem, rhs_full) -> np.ndarray:
    """Solve with a full-length rhs whose end entries are Dirichlet values."""
    rhs_full = np.asarray(rhs_full)
    bnd = rhs_full[[0, -1]]
    inner = rhs_full[1:-1] - system.boundary_cols @ bnd
    out = np.empty_like(rhs_full, dtype=np.result_type(rhs_full, system.a1))
    out[[0, -1]] = bnd
    out[1:-1] = solve(system, inner)
    return out


def propagator(system: BlockSystem) -> np.ndarray:
    """Dense ``P`` with ``solve_global(system, r) == P @ r`` for any ``r``."""
    n = system.order + 2
    return solve_global(system, np.eye(n))


# --------------------------------------------------------------------------
# relocation and layer tracking


def relocate(layout: TwoDomainLayout, values, new_x_star: float):
    """Move the interface to ``new_x_star`` and re-interpolate ``values``."""
    new = build_layout(new_x_star, layout.alpha, layout.n_pts)
    values = np.asarray(values)
    if new_x_star == layout.x_star:
        return new, values.copy()
    out = layout.evaluate(values, new.nodes)
    out[0] = values[0]
    out[-1] = values[-1]
    return new, out


def sign_changes(values) -> np.ndarray:
    """Indices ``i`` with a sign change between global nodes ``i`` and ``i+1``."""
    v = np.asarray(values)
    s = np.sign(v)
    return np.nonzero(s[:-1] * s[1:] < 0)[0]


def locate_zero(layout: TwoDomainLayout, values, near: float | None = None) -> float:
    """Zero of the piecewise-Chebyshev interpolant of ``values``.

    With several crossings the one nearest ``near`` (default: the interface)
    is returned and a :class:`MultipleCrossingsWarning` is issued.
    """
    v = np.asarray(values, dtype=float)
    x = layout.nodes
    exact = np.nonzero(v == 0.0)[0]
    brackets = sign_changes(v)
    if brackets.size == 0 and exact.size == 0:
        raise NoLayerError("solution does not change sign")
    cands = [(x[i], x[i + 1]) for i in brackets] + [(x[i], x[i]) for i in exact]
    target = layout.x_star if near is None else near
    if len(cands) > 1:
        warnings.warn(f"{len(cands)} sign changes; using the one nearest {target:.6f}",
                      MultipleCrossingsWarning, stacklevel=2)
        cands.sort(key=lambda ab: abs(0.5 * (ab[0] + ab[1]) - target))
    a, b = cands[0]
    if a == b:
        return float(a)
    grid, idx = (layout.left, layout.left_idx) if b <= layout.x_star else (layout.right, layout.right_idx)
    local = v[idx]
    sa, sb = grid.map.inverse(a), grid.map.inverse(b)

    def f(s):
        return float(barycentric_interp(grid.ref_nodes, local, s)[0])

    s0 = brentq(f, min(sa, sb), max(sa, sb), xtol=1e-15, rtol=4 * np.finfo(float).eps)
    return float(grid.map.forward(s0))

