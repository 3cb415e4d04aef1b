import math
import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from supersens.asympt import (
    AsymptoticParams,
    LinearizationWarning,
    c_k,
    perturbation_orders,
    v_k_profile,
    w_k_bvp_oracle,
    x_star_as,
    x_star_leading,
)
from supersens.burgers1d import steady_oracle


@pytest.mark.parametrize("eps, delta, expect", [
    (0.1, 1e-3, 0.240724),
    (0.1, 1e-4, 0.052606),
    (0.05, 1e-4, 0.504826),
])
def test_balanced_position_reference_values(eps, delta, expect):
    assert x_star_as(eps, delta) == pytest.approx(expect, abs=5e-7)


def test_leading_order_zero_at_balance():
    eps = 0.1
    assert x_star_leading(eps, 2 * math.exp(-1 / eps)) == pytest.approx(0.0, abs=1e-14)


def test_leading_order_value():
    assert x_star_leading(0.1, 1e-2) == pytest.approx(1 - 0.1 * math.log(200), abs=1e-15)


@given(st.sampled_from([0.1, 0.05, 0.02, 0.01]), st.floats(-12, -0.5))
def test_forms_agree_when_delta_dominates(eps, log_d):
    d = 10.0**log_d
    gap = x_star_as(eps, d) - x_star_leading(eps, d)
    q = d * math.exp(1 / eps) / 4
    # asinh(q) - ln(2q) = ln((1 + sqrt(1 + q^-2)) / 2)
    assert gap == pytest.approx(eps * math.log((1 + math.sqrt(1 + q**-2)) / 2), abs=1e-12)


@given(st.sampled_from([0.1, 0.05, 0.02]), st.floats(-9, -0.5), st.floats(0.1, 0.9))
def test_monotone_in_delta(eps, log_d, frac):
    d = 10.0**log_d
    assert x_star_as(eps, d * (1 + frac)) > x_star_as(eps, d)


def test_no_overflow_for_tiny_eps():
    assert math.isfinite(x_star_as(0.001, 1e-3))


@pytest.mark.parametrize("delta", [0.0, -1e-3, 2.0])
def test_delta_range(delta):
    with pytest.raises(ValueError):
        x_star_as(0.1, delta)


def test_balanced_position_approaches_oracle_as_delta_shrinks():
    gaps = [abs(steady_oracle(0.1, d)[1] - x_star_as(0.1, d)) for d in (1e-2, 1e-3, 1e-4)]
    assert gaps[0] > gaps[1] > gaps[2]


def test_c1_reference_value():
    # e^{-1.4} / 0.01 at eps = 0.1, beta = 0, x* = 0.4
    p = AsymptoticParams(eps=0.1, delta0=1e-3, a=0.5, x_star_ref=0.4)
    assert abs(c_k(p, 1)) == pytest.approx(8.315287191035679e-5, rel=1e-12)


@given(st.integers(1, 20), st.floats(0, 3))
def test_ck_inverse_square_law(k, beta):
    p = AsymptoticParams(eps=0.1, delta0=1e-3, a=0.5, beta=beta, x_star_ref=0.2)
    assert abs(c_k(p, k)) * k**2 == pytest.approx(abs(c_k(p, 1)), rel=1e-12)


def test_ck_rejects_mean_mode():
    p = AsymptoticParams(eps=0.1, delta0=1e-3, a=0.5)
    with pytest.raises(ValueError):
        c_k(p, 0)
    with pytest.raises(ValueError):
        v_k_profile(p, 0, 0.0)


def test_vk_peak_and_decay():
    p = AsymptoticParams(eps=0.05, delta0=1e-4, a=0.5, x_star_ref=0.3)
    x = np.linspace(-1, 1, 2001)
    v = np.abs(v_k_profile(p, 2, x))
    assert x[np.argmax(v)] == pytest.approx(0.3, abs=1e-3)
    assert v.max() == pytest.approx(1e-4 / (4 * 0.05**2 * 4), rel=1e-3)
    assert v[0] < 1e-6 * v.max()


def test_params_from_delta():
    p = AsymptoticParams.from_delta(0.1, 1e-3)
    assert p.delta == pytest.approx(1e-3, rel=1e-12)
    assert p.x_star_ref == pytest.approx(x_star_as(0.1, 1e-3))
    with pytest.raises(ValueError):
        AsymptoticParams(eps=0.1, delta0=1e-3, a=1.5)


def test_wk_oracle_boundary_values_and_grid_floor():
    p = AsymptoticParams.from_delta(0.05, 1e-3)
    x, w = w_k_bvp_oracle(p, 1)
    assert w[0] == p.delta0 and w[-1] == 0
    assert x.size == 4001
    with pytest.raises(ValueError):
        w_k_bvp_oracle(p, 1, n_grid=500)


def test_wk_oracle_is_grid_converged():
    p = AsymptoticParams.from_delta(0.05, 1e-3, beta=1.0)
    x1, w1 = w_k_bvp_oracle(p, 2, n_grid=4000)
    x2, w2 = w_k_bvp_oracle(p, 2, n_grid=8000)
    np.testing.assert_allclose(w2[::2], w1, atol=1e-3 * np.abs(w1).max())


def _interior_modulus(params, k):
    x, w = w_k_bvp_oracle(params, k, n_grid=20000)
    eps, xs = params.eps, params.x_star_ref
    window = (x > xs + 5 * eps) & (x < 1 - 5 * eps)
    return float(np.median(np.abs(w[window])))


def test_wk_regular_part_is_flat_right_of_layer():
    p = AsymptoticParams(eps=0.05, delta0=1.0, a=0.5, x_star_ref=0.3)
    x, w = w_k_bvp_oracle(p, 1)
    window = (x > 0.3 + 0.25) & (x < 1 - 0.25)
    a = np.abs(w[window])
    assert a.max() / a.min() < 1.2


def test_wk_doubling_k_quarters_amplitude():
    p = AsymptoticParams(eps=0.05, delta0=1.0, a=0.5, x_star_ref=0.3)
    assert 4 * _interior_modulus(p, 2) / _interior_modulus(p, 1) == pytest.approx(1.0, abs=0.25)


def test_wk_inverse_square_law_at_small_eps():
    # the slow outer exponent is O(eps k^2), so the law sharpens as eps -> 0
    p = AsymptoticParams(eps=0.01, delta0=1.0, a=0.5, x_star_ref=0.3)
    mags = np.array([_interior_modulus(p, k) * k**2 for k in (1, 2, 3, 4)])
    assert np.all(np.abs(mags / mags[0] - 1) < 0.25)


def test_perturbation_orders():
    p = AsymptoticParams(eps=0.1, delta0=1e-5, a=0.5)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        o = perturbation_orders(p)
    assert o.v_order == pytest.approx(1e-3)
    assert o.vx_order == pytest.approx(1e-2)
    assert o.residual_order == pytest.approx(1e-5)
    with pytest.warns(LinearizationWarning):
        perturbation_orders(AsymptoticParams(eps=0.1, delta0=1e-2, a=0.5))
