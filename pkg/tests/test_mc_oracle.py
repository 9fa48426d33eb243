import numpy as np
import pytest
from kou_pide.analysis import interpolate_price
from kou_pide.errors import ValidationError
from kou_pide.mc_oracle import McConfig, mc_price, sample_relative_jumps, simulate_terminal
from kou_pide.model import get_parameter_set, reference_price
from kou_pide.steppers import SchemeSpec, build_problem, run


def test_config_validation():
    with pytest.raises(ValidationError):
        McConfig(paths=0).validate()
    with pytest.raises(ValidationError):
        McConfig(paths=1001, antithetic=True).validate()
    assert McConfig(paths=1000, batch_size=100, antithetic=True).validate().antithetic


def test_relative_jump_means(params):
    n = 200000
    y1, y2 = sample_relative_jumps(params, n, seed=1)
    assert np.all(y1 > 0) and np.all(y2 > 0)
    for y, k in ((y1, params.kappa1), (y2, params.kappa2)):
        assert np.mean(y) - 1 == pytest.approx(k, abs=5 * np.std(y) / np.sqrt(n))
    assert np.mean(y1 >= 1) == pytest.approx(params.p1, abs=0.01)
    assert np.mean(y2 >= 1) == pytest.approx(params.p2, abs=0.01)


@pytest.mark.parametrize('antithetic', [False, True])
def test_discounted_prices_are_martingales(params, antithetic):
    n = 400000
    s1, s2 = simulate_terminal(params, 100., 90., n, np.random.default_rng(3), antithetic)
    assert s1.shape == s2.shape == (n,)
    for s, s0 in ((s1, 100.), (s2, 90.)):
        discounted = np.exp(-params.r * params.T) * s
        assert np.mean(discounted) == pytest.approx(s0, abs=5 * np.std(discounted) / np.sqrt(n))


def test_terminal_correlation_without_jumps(params):
    params = params.replace(lam=0.)
    s1, s2 = simulate_terminal(params, 100., 100., 200000, np.random.default_rng(5))
    assert np.corrcoef(np.log(s1), np.log(s2))[0, 1] == pytest.approx(params.rho, abs=0.01)


def test_price_is_reproducible(params):
    cfg = McConfig(paths=40000, seed=11, batch_size=10000)
    a = mc_price(params, 100., 100., cfg, processes=1)
    b = mc_price(params, 100., 100., cfg, processes=2)
    assert a.price == b.price and a.stderr == b.stderr and a.paths == 40000
    c = mc_price(params, 100., 100., McConfig(paths=40000, seed=12, batch_size=10000), processes=1)
    assert c.price != a.price


@pytest.mark.parametrize('antithetic', [False, True])
def test_price_agrees_with_reference(params, antithetic):
    res = mc_price(params, 100., 100., McConfig(paths=200000, seed=0, antithetic=antithetic, batch_size=50000),
                   processes=1)
    assert res.stderr > 0
    assert res.price == pytest.approx(reference_price('set1', 100., 100.), abs=4 * res.stderr + 2e-3)


def test_invalid_spot(params):
    with pytest.raises(ValidationError):
        mc_price(params, 0., 100., McConfig(paths=10))


@pytest.mark.slow
@pytest.mark.parametrize('label', ['set1', 'set2'])
def test_pide_price_within_three_standard_errors(label):
    params = get_parameter_set(label).params
    problem = build_problem(params, 400, 400)
    pide = interpolate_price(run(SchemeSpec('mcs2', 200), problem), problem.grid, 100., 100.)
    res = mc_price(params, 100., 100., McConfig(paths=10 ** 6, seed=3), processes=-1)
    assert res.paths == 10 ** 6
    assert abs(pide - res.price) <= 3 * res.stderr, f'PIDE {pide:.4f}, MC {res.price:.4f} +- {res.stderr:.4f}'
