"""Chebyshev Gauss-Lobatto collocation on stretched subdomains.

A subdomain ``[x_lo, x_hi]`` is parametrised by a reference coordinate
``s in [-1, 1]`` through ``x = g(f(s, alpha))``, where ``g`` is affine and
``f`` is an arctan/tan stretching that clusters nodes toward one end.
``Side.LEFT`` clusters toward ``x_hi`` (s = +1), ``Side.RIGHT`` toward
``x_lo`` (s = -1), so both subdomains of a two-domain layout concentrate
points at the shared interface.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Side",
    "StretchedMap",
    "CollocationGrid",
    "chebyshev_nodes",
    "diff_operator",
    "barycentric_weights",
    "barycentric_interp",
    "stretch_forward",
    "stretch_inverse",
    "stretch_deriv",
    "build_grid",
    "condition_estimate",
    "SingularMapError",
    "CONDITION_LIMIT",
]

CONDITION_LIMIT = 1e13


class SingularMapError(ValueError):
    pass


class Side(enum.Enum):
    LEFT = "left"
    RIGHT = "right"


def _check_unit(s):
    s = np.asarray(s, dtype=float)
    if np.any(s < -1.0 - 1e-14) or np.any(s > 1.0 + 1e-14):
        raise ValueError("reference coordinate outside [-1, 1]")
    return np.clip(s, -1.0, 1.0)


def _f1(s, alpha):
    theta = 0.25 * np.pi * (1.0 - s)
    # atan2 keeps the s = -1 endpoint (tan -> inf) exact
    return 1.0 - (4.0 / np.pi) * np.arctan2(alpha * np.sin(theta), np.cos(theta))


def _f1_deriv(s, alpha):
    theta = 0.25 * np.pi * (1.0 - s)
    c, sn = np.cos(theta), np.sin(theta)
    return alpha / (c * c + alpha * alpha * sn * sn)


def stretch_forward(side: Side, alpha: float, s):
    """Stretching ``f_i(s, alpha)``; ``alpha = 1`` is the identity."""
    s = _check_unit(s)
    if side is Side.LEFT:
        return _f1(s, alpha)
    return -_f1(-s, alpha)


def stretch_inverse(side: Side, alpha: float, y):
    """Exact inverse of :func:`stretch_forward` (same map with ``1/alpha``)."""
    return stretch_forward(side, 1.0 / alpha, y)


def stretch_deriv(side: Side, alpha: float, s):
    s = _check_unit(s)
    if side is Side.LEFT:
        return _f1_deriv(s, alpha)
    return _f1_deriv(-s, alpha)


@dataclass(frozen=True)
class StretchedMap:
    """Composite map ``h = g o f`` from ``[-1, 1]`` onto ``[x_lo, x_hi]``."""

    side: Side
    alpha: float
    x_lo: float
    x_hi: float

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        if not self.x_hi > self.x_lo:
            raise ValueError("empty subdomain")

    @property
    def half_length(self) -> float:
        return 0.5 * (self.x_hi - self.x_lo)

    def forward(self, s):
        y = stretch_forward(self.side, self.alpha, s)
        return self.x_lo + self.half_length * (y + 1.0)

    def inverse(self, x):
        y = (np.asarray(x, dtype=float) - self.x_lo) / self.half_length - 1.0
        return stretch_inverse(self.side, self.alpha, y)

    def deriv(self, s):
        return self.half_length * stretch_deriv(self.side, self.alpha, s)


def chebyshev_nodes(n_pts: int) -> np.ndarray:
    """Gauss-Lobatto points ``cos(j pi / (n_pts - 1))``, from +1 down to -1."""
    if n_pts < 3:
        raise ValueError(f"need at least 3 nodes, got {n_pts}")
    n = n_pts - 1
    # sin form is symmetric to round-off, unlike cos(j pi / n)
    return np.sin(np.pi * (n - 2.0 * np.arange(n_pts)) / (2.0 * n))


def diff_operator(nodes: np.ndarray) -> np.ndarray:
    """First-derivative collocation matrix on Gauss-Lobatto nodes.

    Off-diagonal entries follow the standard closed form; the diagonal is set
    by the negative-sum rule so constants are differentiated to zero.
    """
    x = np.asarray(nodes, dtype=float)
    n = x.size - 1
    c = np.ones(n + 1)
    c[0] = c[-1] = 2.0
    c *= (-1.0) ** np.arange(n + 1)
    dx = x[:, None] - x[None, :]
    D = np.outer(c, 1.0 / c) / (dx + np.eye(n + 1))
    D -= np.diag(D.sum(axis=1))
    return D


def barycentric_weights(n_pts: int) -> np.ndarray:
    w = (-1.0) ** np.arange(n_pts)
    w[0] *= 0.5
    w[-1] *= 0.5
    return w


def barycentric_interp(nodes, values, points, weights=None):
    """Evaluate the polynomial interpolant through ``(nodes, values)``.

    ``values`` may carry trailing dimensions (one interpolant per column).
    """
    nodes = np.asarray(nodes, dtype=float)
    values = np.asarray(values)
    points = np.atleast_1d(np.asarray(points, dtype=float))
    if weights is None:
        weights = barycentric_weights(nodes.size)
    diff = points[:, None] - nodes[None, :]
    exact = diff == 0.0
    diff[exact] = 1.0
    kern = weights[None, :] / diff
    out = np.tensordot(kern, values, axes=(1, 0)) / kern.sum(axis=1).reshape(
        (-1,) + (1,) * (values.ndim - 1)
    )
    rows, cols = np.nonzero(exact)
    out[rows] = values[cols]
    return out


def interp_matrix(nodes, points, weights=None) -> np.ndarray:
    """Matrix ``E`` with ``E @ values == barycentric_interp(nodes, values, points)``."""
    nodes = np.asarray(nodes, dtype=float)
    return barycentric_interp(nodes, np.eye(nodes.size), points, weights)


@dataclass(frozen=True)
class CollocationGrid:
    map: StretchedMap
    n_pts: int
    ref_nodes: np.ndarray = field(repr=False)
    phys_nodes: np.ndarray = field(repr=False)
    d1: np.ndarray = field(repr=False)
    d2: np.ndarray = field(repr=False)

    def interpolate(self, values, x):
        """Evaluate the grid interpolant of ``values`` at physical points ``x``."""
        return barycentric_interp(self.ref_nodes, values, self.map.inverse(x))


def build_grid(smap: StretchedMap, n_pts: int) -> CollocationGrid:
    s = chebyshev_nodes(n_pts)
    dh = smap.deriv(s)
    if np.min(np.abs(dh)) < 1e-14:
        raise SingularMapError("map derivative vanishes at a collocation node")
    x = smap.forward(s)
    # pin endpoints exactly, the interface must be shared bit-for-bit
    x[0], x[-1] = (smap.x_hi, smap.x_lo)
    d1 = diff_operator(s) / dh[:, None]
    d2 = d1 @ d1
    for arr in (s, x, d1, d2):
        arr.setflags(write=False)
    return CollocationGrid(smap, n_pts, s, x, d1, d2)


def condition_estimate(matrix: np.ndarray) -> float:
    """Max-norm condition number ``||A||_inf ||A^-1||_inf``."""
    try:
        inv = np.linalg.inv(matrix)
    except np.linalg.LinAlgError:
        return np.inf
    return float(np.linalg.norm(matrix, np.inf) * np.linalg.norm(inv, np.inf))
