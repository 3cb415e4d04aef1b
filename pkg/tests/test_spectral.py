import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from supersens.spectral import (
    Side,
    SingularMapError,
    StretchedMap,
    barycentric_interp,
    build_grid,
    chebyshev_nodes,
    condition_estimate,
    diff_operator,
    interp_matrix,
    stretch_deriv,
    stretch_forward,
    stretch_inverse,
)

alphas = st.floats(0.05, 5.0)
unit = st.floats(-1.0, 1.0)
sides = st.sampled_from(list(Side))


def test_left_stretch_value_at_zero():
    # 1 - (4/pi) atan(0.1), 30-digit reference
    assert stretch_forward(Side.LEFT, 0.1, 0.0) == pytest.approx(0.8730979302777857, abs=1e-14)


@pytest.mark.parametrize("side", list(Side))
def test_identity_at_alpha_one(side):
    s = np.linspace(-1, 1, 41)
    np.testing.assert_allclose(stretch_forward(side, 1.0, s), s, atol=1e-14)


@pytest.mark.parametrize("side", list(Side))
def test_endpoints_fixed(side):
    np.testing.assert_allclose(stretch_forward(side, 0.3, [-1.0, 1.0]), [-1.0, 1.0], atol=1e-14)


def test_left_and_right_are_mirror_images():
    s = np.linspace(-1, 1, 17)
    np.testing.assert_allclose(stretch_forward(Side.RIGHT, 0.4, s),
                               -stretch_forward(Side.LEFT, 0.4, -s), atol=1e-15)


def test_rejects_points_outside_unit_interval():
    with pytest.raises(ValueError):
        stretch_forward(Side.LEFT, 0.5, 1.1)


@given(sides, alphas, unit)
def test_round_trip(side, alpha, s):
    y = stretch_forward(side, alpha, s)
    assert stretch_inverse(side, alpha, y) == pytest.approx(s, abs=1e-12)


@given(sides, alphas, st.floats(-0.99, 0.99))
def test_derivative_matches_finite_difference(side, alpha, s):
    h = 1e-6
    fd = (stretch_forward(side, alpha, s + h) - stretch_forward(side, alpha, s - h)) / (2 * h)
    assert stretch_deriv(side, alpha, s) == pytest.approx(fd, rel=1e-6, abs=1e-8)


@given(sides, alphas)
def test_monotone_increasing(side, alpha):
    s = np.linspace(-1, 1, 201)
    assert np.all(np.diff(stretch_forward(side, alpha, s)) > 0)


def test_small_alpha_packs_left_map_near_right_end():
    # the left subdomain ends at the layer, so its nodes crowd toward s = 1
    y = stretch_forward(Side.LEFT, 0.1, chebyshev_nodes(21))
    assert np.sum(y > 0.5) > np.sum(y < -0.5)


def test_nodes_ordered_and_symmetric():
    x = chebyshev_nodes(12)
    assert x[0] == 1.0 and x[-1] == -1.0
    np.testing.assert_array_equal(x, -x[::-1])


def test_nodes_need_three_points():
    with pytest.raises(ValueError):
        chebyshev_nodes(2)


@pytest.mark.parametrize("n", [5, 16, 39])
def test_diff_exact_on_polynomials(n):
    x = chebyshev_nodes(n)
    D = diff_operator(x)
    for deg in range(n):
        np.testing.assert_allclose(D @ x**deg, deg * x ** max(deg - 1, 0) * (deg > 0),
                                   atol=1e-9 * n**2)


def test_diff_kills_constants_exactly():
    D = diff_operator(chebyshev_nodes(39))
    assert np.max(np.abs(D @ np.ones(39))) < 1e-12


def test_small_diff_matrix_entries():
    # N = 2 nodes (1, 0, -1): D = [[1.5, -2, .5], [.5, 0, -.5], [-.5, 2, -1.5]]
    D = diff_operator(chebyshev_nodes(3))
    np.testing.assert_allclose(D, [[1.5, -2, 0.5], [0.5, 0, -0.5], [-0.5, 2, -1.5]], atol=1e-15)


def test_spectral_convergence_on_smooth_function():
    errs = []
    for n in (9, 17, 33):
        x = chebyshev_nodes(n)
        errs.append(np.max(np.abs(diff_operator(x) @ np.exp(x) - np.exp(x))))
    assert errs[2] < 1e-12 and errs[1] < errs[0] * 1e-3


@given(st.integers(3, 30), st.integers(0, 2**32 - 1))
def test_interpolation_exact_at_nodes(n, seed):
    x = chebyshev_nodes(n)
    v = np.random.default_rng(seed).standard_normal(n)
    np.testing.assert_array_equal(barycentric_interp(x, v, x), v)


@given(st.integers(4, 25), st.floats(-1, 1))
def test_interpolation_reproduces_polynomials(n, p):
    x = chebyshev_nodes(n)
    coef = np.arange(1, n + 1) / n
    v = np.polyval(coef, x)
    assert barycentric_interp(x, v, p)[0] == pytest.approx(np.polyval(coef, p), abs=1e-10)


def test_interp_matrix_matches_direct_call():
    x = chebyshev_nodes(9)
    pts = np.linspace(-0.9, 0.8, 5)
    v = np.cos(3 * x)
    np.testing.assert_allclose(interp_matrix(x, pts) @ v, barycentric_interp(x, v, pts), atol=1e-14)


def test_interpolation_with_trailing_axis():
    x = chebyshev_nodes(11)
    V = np.stack([x**2, x**3], axis=1)
    out = barycentric_interp(x, V, [0.3])
    np.testing.assert_allclose(out[0], [0.09, 0.027], atol=1e-14)


def test_grid_differentiates_in_physical_coordinates():
    g = build_grid(StretchedMap(Side.LEFT, 0.3, -1.0, 0.4), 39)
    x = g.phys_nodes
    np.testing.assert_allclose(g.d1 @ np.sin(x), np.cos(x), atol=1e-8)
    np.testing.assert_allclose(g.d2 @ np.sin(x), -np.sin(x), atol=1e-5)


def test_grid_endpoints_pinned():
    g = build_grid(StretchedMap(Side.RIGHT, 0.3, 0.123456789, 1.0), 21)
    assert g.phys_nodes[0] == 1.0 and g.phys_nodes[-1] == 0.123456789


def test_map_validation():
    with pytest.raises(ValueError):
        StretchedMap(Side.LEFT, 0.0, -1, 0)
    with pytest.raises(ValueError):
        StretchedMap(Side.LEFT, 0.5, 0, 0)


def test_singular_map_raises():
    with pytest.raises(SingularMapError):
        build_grid(StretchedMap(Side.LEFT, 1e-20, -1.0, 0.0), 9)


def test_condition_estimate():
    assert condition_estimate(np.diag([1.0, 4.0])) == pytest.approx(4.0)
    assert condition_estimate(np.zeros((2, 2))) == np.inf
