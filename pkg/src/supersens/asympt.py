"""Asymptotic predictions for the layer position and its y-modulation.

The steady layer of ``-eps u_xx + u u_x = 0`` with ``u(-1) = 1 + delta``,
``u(1) = -1`` sits where the two exponentially small boundary corrections
balance.  :func:`x_star_leading` keeps only the dominant exponential,
:func:`x_star_as` keeps both and is the value to compare with computations.

For 2D data ``u(-1, y) = 1 + delta0 sum_k eta_k e^{iky}`` the mode ``k``
of the correction is exponentially small to the right of the layer, with a
coefficient :func:`c_k` that falls off like ``1/k^2``.  The turning-point
ODE behind that claim is solved directly by :func:`w_k_bvp_oracle`.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_banded

__all__ = [
    "AsymptoticParams",
    "LinearizationWarning",
    "OracleFailure",
    "PerturbationOrders",
    "x_star_as",
    "x_star_leading",
    "c_k",
    "v_k_profile",
    "w_k_bvp_oracle",
    "perturbation_orders",
]

LINEARIZATION_LIMIT = 0.1


class LinearizationWarning(RuntimeWarning):
    pass


class OracleFailure(ArithmeticError):
    pass


@dataclass(frozen=True)
class AsymptoticParams:
    """Parameters of the 2D asymptotics.

    ``a`` and ``b`` describe the perturbation as ``delta = 2 b e^{-a/eps}``;
    :meth:`from_delta` picks ``b = 1``.
    """

    eps: float
    delta0: float
    a: float
    b: float = 1.0
    beta: float = 0.0
    x_star_ref: float = 0.0

    def __post_init__(self):
        if not self.eps > 0:
            raise ValueError("eps must be positive")
        if not 0 < self.a < 1:
            raise ValueError(f"a must lie in (0, 1), got {self.a}")
        if not self.b > 0:
            raise ValueError("b must be positive")

    @classmethod
    def from_delta(cls, eps, delta, *, beta=0.0, x_star_ref=None, delta0=None):
        a = -eps * math.log(delta / 2.0)
        x_ref = x_star_as(eps, delta) if x_star_ref is None else x_star_ref
        return cls(eps, delta if delta0 is None else delta0, a, 1.0, beta, x_ref)

    @property
    def delta(self) -> float:
        return 2.0 * self.b * math.exp(-self.a / self.eps)


def _check_delta(delta):
    if not 0 < delta < 2:
        raise ValueError(f"delta must lie in (0, 2), got {delta}")


def x_star_leading(eps: float, delta: float) -> float:
    """``1 - eps ln(2 / delta)``, i.e. ``1 - a + eps ln b``."""
    _check_delta(delta)
    return 1.0 - eps * math.log(2.0 / delta)


def x_star_as(eps: float, delta: float) -> float:
    """Layer position balancing both boundary exponentials.

    Matching ``-tanh((x - x*) / (2 eps))`` to the two boundary values gives
    ``2 e^{-(1+x*)/eps} + delta = 2 e^{-(1-x*)/eps}`` to leading order,
    whose root is ``eps asinh(delta e^{1/eps} / 4)``.  It tends to
    :func:`x_star_leading` once ``delta e^{1/eps}`` is large.
    """
    _check_delta(delta)
    # asinh(q) = ln(2q) + O(q^-2): switch form before e^{1/eps} overflows
    log_q = math.log(delta / 4.0) + 1.0 / eps
    if log_q > 20.0:
        return eps * (log_q + math.log(2.0))
    return eps * math.asinh(math.exp(log_q))


def c_k(params: AsymptoticParams, k: int) -> complex:
    """Coefficient of the regular part of mode ``k`` right of the layer."""
    if k == 0:
        raise ValueError("c_k is undefined for k = 0 (the mean mode has no correction)")
    eps, beta, xs = params.eps, params.beta, params.x_star_ref
    mag = math.exp(-(xs + 1.0) / eps) / ((1.0 + beta**2) * eps**2 * k**2)
    return mag * complex(math.cos(beta * k * (1 + 2 * xs)), -math.sin(beta * k * (1 + 2 * xs)))


def v_k_profile(params: AsymptoticParams, k: int, x, eta_k=1.0):
    """Mode ``k`` of the scaled correction inside the layer."""
    if k == 0:
        raise ValueError("v_k is undefined for k = 0")
    eps, beta, xs = params.eps, params.beta, params.x_star_ref
    x = np.asarray(x, dtype=float)
    pre = params.delta0 * eta_k / (4.0 * (1.0 + beta**2) * eps**2 * k**2)
    phase = np.exp(1j * beta * k * (1.0 - 2.0 * xs + x))
    return pre * phase * (1.0 - np.tanh((x - xs) / (2.0 * eps)) ** 2)


def w_k_bvp_oracle(params: AsymptoticParams, k: int, n_grid: int = 4000, left_value=None):
    """Solve ``-eps w'' - u0 w' + (eps k^2 + i beta k u0) w = 0`` on ``[-1, 1]``.

    ``u0`` is the tanh profile centred at ``params.x_star_ref``; boundary
    values are ``w(-1) = left_value`` (default ``delta0``) and ``w(1) = 0``.
    Second-order central differences on ``n_grid`` uniform intervals.
    Returns ``(x, w)``.
    """
    if n_grid < 2000:
        raise ValueError("n_grid must be at least 2000")
    eps, beta = params.eps, params.beta
    w_left = params.delta0 if left_value is None else left_value
    x = np.linspace(-1.0, 1.0, n_grid + 1)
    h = x[1] - x[0]
    xi = x[1:-1]
    u0 = -np.tanh((xi - params.x_star_ref) / (2.0 * eps))
    lower = -eps / h**2 + u0 / (2 * h)  # coefficient of w_{i-1}
    upper = -eps / h**2 - u0 / (2 * h)  # coefficient of w_{i+1}
    diag = 2 * eps / h**2 + eps * k**2 + 1j * beta * k * u0
    m = xi.size
    ab = np.zeros((3, m), dtype=complex)
    ab[0, 1:] = upper[:-1]
    ab[1] = diag
    ab[2, :-1] = lower[1:]
    rhs = np.zeros(m, dtype=complex)
    rhs[0] = -lower[0] * w_left
    try:
        w_in = solve_banded((1, 1), ab, rhs)
    except np.linalg.LinAlgError as exc:
        raise OracleFailure(f"banded solve failed: {exc}") from exc
    if not np.all(np.isfinite(w_in)):
        raise OracleFailure("banded solve produced non-finite values")
    w = np.empty(n_grid + 1, dtype=complex)
    w[0], w[-1] = w_left, 0.0
    w[1:-1] = w_in
    return x, w


@dataclass(frozen=True)
class PerturbationOrders:
    v_order: float
    vx_order: float
    residual_order: float


def perturbation_orders(params: AsymptoticParams) -> PerturbationOrders:
    """Sizes of the correction, its slope, and the neglected quadratic term."""
    d, e = params.delta0, params.eps
    out = PerturbationOrders(d / e**2, d / e**3, d**2 / e**5)
    if out.v_order > LINEARIZATION_LIMIT:
        warnings.warn(
            f"correction of order {out.v_order:.3g}; linearisation about the profile is suspect",
            LinearizationWarning, stacklevel=2,
        )
    return out
