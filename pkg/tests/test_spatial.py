import numpy as np
import pytest
from kou_pide.grid import build_mesh
from kou_pide.spatial import fd_weights_first, fd_weights_second, first_derivative_bands, derivative_bands, \
    apply_bands, assemble_operators, apply_AD


def test_fd_weights_exact_for_quadratics():
    h0, h1 = np.array([0.5, 2.]), np.array([1.5, 0.25])
    x = 3.
    f = lambda y: 2 * y ** 2 - y + 1
    w = fd_weights_first(h0, h1)
    np.testing.assert_allclose(w[0] * f(x - h0) + w[1] * f(x) + w[2] * f(x + h1), 4 * x - 1)
    w = fd_weights_second(h0, h1)
    np.testing.assert_allclose(w[0] * f(x - h0) + w[1] * f(x) + w[2] * f(x + h1), 4.)


def test_fd_weights_reject_nonpositive():
    with pytest.raises(ValueError):
        fd_weights_first(np.array([0.]), np.array([1.]))


def test_first_derivative_boundary_rows():
    g = build_mesh(10, 100., 2000.)
    lower, diag, upper = first_derivative_bands(g)
    assert diag[0] == 0 and upper[0] == 0
    u = 3. * g.s + 1.
    np.testing.assert_allclose(apply_bands((lower, diag, upper), u, 0)[1:], 3.)

    lower, diag, upper = derivative_bands(g, 1, one_sided=True)
    assert apply_bands((lower, diag, upper), u, 0)[0] == pytest.approx(3.)


def test_derivative_bands_order():
    g = build_mesh(10, 100., 2000.)
    with pytest.raises(ValueError):
        derivative_bands(g, 3)
    lower, diag, upper = derivative_bands(g, 2)
    assert diag[0] == 0 and diag[-1] == 0


def test_operators_match_sparse(small_problem, rng):
    ops, grid = small_problem.ops, small_problem.grid
    mats = ops.to_sparse()
    v = rng.random(grid.shape)
    x = grid.flatten(v)
    np.testing.assert_allclose(grid.flatten(ops.apply_mixed(v)), mats['mixed'] @ x, rtol=1e-12, atol=1e-9)
    np.testing.assert_allclose(grid.flatten(ops.apply_1(v)), mats['a1'] @ x, rtol=1e-12, atol=1e-9)
    np.testing.assert_allclose(grid.flatten(ops.apply_2(v)), mats['a2'] @ x, rtol=1e-12, atol=1e-9)
    np.testing.assert_allclose(grid.flatten(apply_AD(ops, v)), mats['AD'] @ x, rtol=1e-12, atol=1e-9)


def test_directional_operator_on_linear_function(small_problem, params):
    s1, s2 = small_problem.grid.mesh()
    out = small_problem.ops.apply_1(s1)
    rate = params.r - params.lam * params.kappa1 - 0.5 * (params.r + params.lam)
    np.testing.assert_allclose(out, rate * s1, rtol=1e-10, atol=1e-9)
    out = small_problem.ops.apply_2(s2)
    rate = params.r - params.lam * params.kappa2 - 0.5 * (params.r + params.lam)
    np.testing.assert_allclose(out, rate * s2, rtol=1e-10, atol=1e-9)


def test_mixed_operator_on_product(small_problem, params):
    s1, s2 = small_problem.grid.mesh()
    out = small_problem.ops.apply_mixed(s1 * s2)
    coef = params.rho * params.sigma1 * params.sigma2
    np.testing.assert_allclose(out, coef * s1 * s2, rtol=1e-10, atol=1e-7)


def test_reaction_split_evenly(small_problem, params):
    ones = np.ones(small_problem.grid.shape)
    out = apply_AD(small_problem.ops, ones)
    np.testing.assert_allclose(out, -(params.r + params.lam), rtol=1e-10)


def test_apply_AD_checks_shape(small_problem):
    with pytest.raises(AssertionError):
        apply_AD(small_problem.ops, np.ones((3, 3)))
