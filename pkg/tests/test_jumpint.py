import dataclasses
import time
import numpy as np
import pytest
from kou_pide import M_STR, SECONDS_STR
from kou_pide.grid import build_grid
from kou_pide.jumpint import precompute, apply_jump, apply_jump_naive, benchmark, power_integrals, \
    interpolation_factors, NU_NAMES
from kou_pide.model import get_parameter_set, truncated_mass


@pytest.mark.parametrize('label', ['set1', 'set2', 'set3'])
@pytest.mark.parametrize('m1,m2', [(8, 8), (12, 16), (16, 16)])
def test_fast_matches_naive(label, m1, m2, rng):
    params = get_parameter_set(label).params
    grid = build_grid(m1, m2, params)
    coeffs = precompute(grid, params)
    for _ in range(20):
        v = rng.random(grid.shape)
        expected = apply_jump_naive(coeffs, v)
        assert np.max(np.abs(apply_jump(coeffs, v) - expected)) <= 1e-12 * np.max(np.abs(expected))


def _best_time(coeffs, v, repeats=3):
    times = []
    for _ in range(repeats):
        start = time.perf_counter()
        apply_jump(coeffs, v)
        times.append(time.perf_counter() - start)
    return min(times)


@pytest.mark.slow
def test_evaluation_time_is_linear_in_grid_points(params, rng):
    times = []
    for m in (500, 1000):
        grid = build_grid(m, m, params)
        coeffs = precompute(grid, params)
        apply_jump(coeffs, rng.random(grid.shape))  # warm-up
        times.append(_best_time(coeffs, rng.random(grid.shape)))
    # four times the grid points
    assert 3. <= times[1] / times[0] <= 6.


@pytest.mark.parametrize('label', ['set1', 'set2', 'set3'])
def test_constant_gives_truncated_mass(label):
    params = get_parameter_set(label).params
    grid = build_grid(30, 25, params)
    coeffs = precompute(grid, params)
    s1, s2 = grid.mesh()
    out = apply_jump(coeffs, np.ones(grid.shape))
    np.testing.assert_allclose(out, params.lam * truncated_mass(s1, s2, params), rtol=1e-10)


def test_linear_interpolation_is_exact_for_linear_functions(params):
    s = build_grid(20, 20, params).g1.s
    for e in (params.eta_q1, -params.eta_p1):
        g = interpolation_factors(s, e)
        z = power_integrals(s, e)
        # u(z) = z integrates to the second power integral
        start = 0 if e > 0 else 1
        np.testing.assert_allclose((g[0] * s[:-1] + g[1] * s[1:])[start:], z[1, start:], rtol=1e-10)


def test_zero_lambda_gives_zero(params):
    params = params.replace(lam=0.)
    grid = build_grid(10, 10, params)
    out = apply_jump(precompute(grid, params), np.random.default_rng(0).random(grid.shape))
    np.testing.assert_array_equal(out, 0.)


def test_gamma_and_psi_shapes(small_problem):
    coeffs = small_problem.coeffs
    m1, m2 = small_problem.grid.m1, small_problem.grid.m2
    assert len(NU_NAMES) == 4
    for nu in range(1, 5):
        assert coeffs.gamma(nu).shape == (2, 2, m1, m2)
        psi = coeffs.psi(nu)
        assert psi.shape == (m1 + 1, m2 + 1)
        assert np.all(psi[0] == 0) and np.all(psi[:, 0] == 0)
    with pytest.raises(AssertionError):
        coeffs.gamma(5)


def test_shape_mismatch(small_problem):
    with pytest.raises(ValueError):
        apply_jump(small_problem.coeffs, np.ones((3, 3)))


def test_precompute_rejects_infinite_mean(params):
    bad = dataclasses.replace(params, eta_p2=0.9)
    with pytest.raises(ValueError):
        precompute(build_grid(4, 4, params), bad)


def test_benchmark(params):
    df = benchmark(params, [8, 16], repeats=1)
    assert list(df.columns) == [M_STR, SECONDS_STR]
    assert list(df[M_STR]) == [8, 16]
    assert np.all(df[SECONDS_STR] > 0)
