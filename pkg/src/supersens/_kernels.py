"""Compiled inner loops for the semi-implicit steppers.

Every scheme in the package advances a global node vector (or one per
y-line) as::

    rhs   = mask * (a * U + nl * U * (G1 U) + w2 * (G2 U) + extra) + bvec
    U_new = P @ rhs

with ``P`` the dense propagator of the frozen implicit operator.  The
kernels below run that loop for many steps without returning to Python.
Each column of a 2D field is always computed by the same sequence of
floating-point operations, independent of how columns are split among
threads, which makes results bitwise reproducible for any worker count.
"""

import numpy as np
from numba import njit

BLOWUP_LIMIT = 10.0

# exit codes
DONE = 0
WATCH = 1
BLOWUP = 2
STEADY = 3


@njit(cache=True, fastmath=False)
def _matvec(A, x, out):
    n, m = A.shape
    for i in range(n):
        s = 0.0
        for j in range(m):
            s += A[i, j] * x[j]
        out[i] = s


@njit(cache=True, fastmath=False)
def linear_zero(x, u, guess):
    """Sign change of ``u`` nearest ``guess``, linearly interpolated."""
    best = np.nan
    bestd = np.inf
    for i in range(u.size - 1):
        if u[i] * u[i + 1] < 0.0:
            z = x[i] - u[i] * (x[i + 1] - x[i]) / (u[i + 1] - u[i])
            d = abs(z - guess)
            if d < bestd:
                bestd = d
                best = z
        elif u[i] == 0.0:
            d = abs(x[i] - guess)
            if d < bestd:
                bestd = d
                best = x[i]
    return best


@njit(cache=True, fastmath=False)
def advance_1d(P, G1, G2, a, nl, w2, mask, bvec, U, nsteps, dt,
               x, zero_tol, zero_ref, row, row_limit, bound, steady_tol):
    """Run up to ``nsteps`` steps in place on ``U``.

    Stops early when the tracked zero (linear interpolation between nodes)
    moves more than ``zero_tol`` from ``zero_ref``, when ``|row @ U| > row_limit``, on blow-up
    (``|U| > bound`` or non-finite), or when the step residual
    ``max|dU|/dt`` drops below ``steady_tol``.
    Returns ``(code, steps_taken, last_residual)``.
    """
    n = U.size
    g1u = np.empty(n)
    g2u = np.empty(n)
    rhs = np.empty(n)
    new = np.empty(n)
    use_g2 = np.any(w2 != 0.0)
    z0 = zero_ref
    res = np.inf
    for k in range(nsteps):
        _matvec(G1, U, g1u)
        if use_g2:
            _matvec(G2, U, g2u)
        for i in range(n):
            r = a * U[i] + nl * U[i] * g1u[i]
            if use_g2:
                r += w2[i] * g2u[i]
            rhs[i] = mask[i] * r + bvec[i]
        _matvec(P, rhs, new)
        res = 0.0
        bad = False
        for i in range(n):
            v = new[i]
            if not np.isfinite(v) or abs(v) > bound:
                bad = True
            d = abs(v - U[i])
            if d > res:
                res = d
            U[i] = v
        res /= dt
        if bad:
            return BLOWUP, k + 1, res
        if res < steady_tol:
            return STEADY, k + 1, res
        if zero_tol > 0.0:
            z = linear_zero(x, U, z0)
            if not np.isfinite(z) or abs(z - z0) > zero_tol:
                return WATCH, k + 1, res
        if row_limit > 0.0:
            s = 0.0
            for i in range(n):
                s += row[i] * U[i]
            if abs(s) > row_limit:
                return WATCH, k + 1, res
    return DONE, nsteps, res


@njit(cache=True, fastmath=False, nogil=True)
def fd6_column_terms(U, j, c1, c2, inv_h, inv_h2, out1, out2):
    """Sixth-order periodic y-derivatives of column ``j`` of ``U``."""
    nx, ny = U.shape
    for i in range(nx):
        s1 = 0.0
        s2 = c2[0] * U[i, j]
        for m in range(1, 4):
            up = U[i, (j + m) % ny]
            dn = U[i, (j - m) % ny]
            s1 += c1[m] * (up - dn)
            s2 += c2[m] * (up + dn)
        out1[i] = s1 * inv_h
        out2[i] = s2 * inv_h2


@njit(cache=True, fastmath=False, nogil=True)
def step_columns_2d(P, G1, mask, bvals, U, out, j0, j1,
                    a, nl_x, visc_y, adv_y, nl_y, u0,
                    c1, c2, inv_h, inv_h2):
    """One explicit-rhs/implicit-x step for columns ``j0 <= j < j1``.

    For each y-line::

        rhs = a U + nl_x U (Dx U) + visc_y (Dyy U) - adv_y u0 (Dy U)
              + nl_y U (Dy U)

    on interior rows, Dirichlet values from ``bvals[:, j]`` on the end rows,
    then ``out[:, j] = P @ rhs``.  Reads only columns ``j-3 .. j+3``.
    """
    nx, ny = U.shape
    g1u = np.empty(nx)
    dy = np.empty(nx)
    dyy = np.empty(nx)
    col = np.empty(nx)
    rhs = np.empty(nx)
    new = np.empty(nx)
    for j in range(j0, j1):
        for i in range(nx):
            col[i] = U[i, j]
        _matvec(G1, col, g1u)
        fd6_column_terms(U, j, c1, c2, inv_h, inv_h2, dy, dyy)
        for i in range(nx):
            r = (a * col[i] + nl_x * col[i] * g1u[i] + visc_y * dyy[i]
                 - adv_y * u0[i] * dy[i] + nl_y * col[i] * dy[i])
            rhs[i] = mask[i] * r
        rhs[0] = bvals[0, j]
        rhs[nx - 1] = bvals[1, j]
        _matvec(P, rhs, new)
        for i in range(nx):
            out[i, j] = new[i]


@njit(cache=True, fastmath=False, nogil=True)
def column_stats(U, V, j0, j1, dt, res_out, max_out):
    """Per-column ``max|U - V| / dt`` and ``max|U|`` (non-finite -> inf)."""
    nx = U.shape[0]
    for j in range(j0, j1):
        r = 0.0
        m = 0.0
        for i in range(nx):
            v = U[i, j]
            if not np.isfinite(v):
                m = np.inf
                r = np.inf
                break
            d = abs(v - V[i, j])
            if d > r:
                r = d
            if abs(v) > m:
                m = abs(v)
        res_out[j] = r / dt
        max_out[j] = m


@njit(cache=True, fastmath=False, nogil=True)
def advance_2d(P, G1, mask, bvals, U, nsteps, a, nl_x, visc_y, adv_y, nl_y, u0,
               c1, c2, inv_h, inv_h2, dt, bound):
    """Serial multi-step loop over all columns, in place on ``U``.

    Performs exactly the per-column arithmetic of :func:`step_columns_2d`.
    Returns ``(code, steps_taken, residual)`` with ``residual`` the last
    ``max|U^n - U^{n-1}| / dt``; stops early on blow-up.
    """
    nx, ny = U.shape
    out = np.empty_like(U)
    res = np.empty(ny)
    mx = np.empty(ny)
    r = np.inf
    for k in range(nsteps):
        step_columns_2d(P, G1, mask, bvals, U, out, 0, ny,
                        a, nl_x, visc_y, adv_y, nl_y, u0, c1, c2, inv_h, inv_h2)
        column_stats(out, U, 0, ny, dt, res, mx)
        r = res.max()
        U[:, :] = out
        if not np.isfinite(r) or mx.max() > bound:
            return BLOWUP, k + 1, r
    return DONE, nsteps, r
