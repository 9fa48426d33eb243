import dataclasses
import numpy as np
import pytest
from scipy import integrate
from kou_pide.errors import ValidationError
from kou_pide.model import PARAMETER_SETS, REFERENCE_PRICES, TABLE_SPOTS, kappa, marginal_density, marginal_cdf, \
    density, truncated_mass, payoff, normalize_set_label, get_parameter_set, reference_price


@pytest.mark.parametrize('label', list(PARAMETER_SETS.keys()))
def test_parameter_sets_are_valid(label):
    params = get_parameter_set(label).params
    assert params.validate() is params
    assert REFERENCE_PRICES[label].shape == (len(TABLE_SPOTS), len(TABLE_SPOTS))


def test_kappa_set1(params):
    assert params.kappa1 == pytest.approx(0.4 * 5 / 4 + 0.6 * 20 / 23 - 1, rel=1e-12)


@pytest.mark.parametrize('p,eta_p,eta_q', [(0.4, 5., 1 / 0.15), (0.3445, 3.0465, 3.0775), (0.65, 4., 3.)])
def test_kappa_is_mean_relative_jump(p, eta_p, eta_q):
    f = lambda y: (y - 1) * marginal_density(np.array([y]), p, eta_p, eta_q)[0]
    mean = integrate.quad(f, 0, 1)[0] + integrate.quad(f, 1, np.inf)[0]
    assert kappa(p, eta_p, eta_q) == pytest.approx(mean, rel=1e-8, abs=1e-10)


def test_kappa_invalid():
    with pytest.raises(ValueError):
        kappa(0.5, 1., 2.)
    with pytest.raises(ValueError):
        kappa(1.5, 3., 2.)


def test_marginal_density_integrates_to_one(params):
    f = lambda y: marginal_density(np.array([y]), params.p2, params.eta_p2, params.eta_q2)[0]
    assert integrate.quad(f, 0, 1)[0] + integrate.quad(f, 1, np.inf)[0] == pytest.approx(1., rel=1e-9)


def test_marginal_cdf(params):
    y = np.array([0., 0.5, 1., 2., np.inf])
    cdf = marginal_cdf(y, params.p1, params.eta_p1, params.eta_q1)
    assert cdf[0] == 0. and cdf[-1] == 1.
    assert np.all(np.diff(cdf) >= 0)
    assert cdf[2] == pytest.approx(1 - params.p1)
    part = integrate.quad(lambda x: marginal_density(np.array([x]), params.p1, params.eta_p1, params.eta_q1)[0],
                          0, 0.5)[0]
    assert cdf[1] == pytest.approx(part, rel=1e-9)


def test_density_factorizes(params):
    y1, y2 = np.array([0.5, 1., 1.7]), np.array([1.2, 0.3, 1.])
    expected = (marginal_density(y1, params.p1, params.eta_p1, params.eta_q1) *
                marginal_density(y2, params.p2, params.eta_p2, params.eta_q2))
    np.testing.assert_allclose(density(y1, y2, params), expected)
    # boundaries belong to the upward branches
    assert density(1., 1., params) == pytest.approx(params.p1 * params.eta_p1 * params.p2 * params.eta_p2)


def test_density_rejects_nonpositive(params):
    with pytest.raises(ValueError):
        density(np.array([0.]), np.array([1.]), params)


def test_truncated_mass(params):
    mass = truncated_mass(np.array([0., 100., 1000., params.S_max]), np.array([0., 100., 100., params.S_max]), params)
    assert mass[0] == 1.
    assert 0 < mass[3] < mass[2] < mass[1] < 1.
    assert mass[3] == pytest.approx((1 - params.p1) * (1 - params.p2))


@pytest.mark.parametrize('field,value', [('eta_p1', 1.), ('rho', 1.5), ('sigma2', 0.), ('S_max', 150.),
                                         ('lam', -0.1), ('p2', 1.1)])
def test_validate_rejects(params, field, value):
    with pytest.raises(ValidationError, match=field):
        dataclasses.replace(params, **{field: value}).validate()


def test_replace(params):
    assert params.replace(lam=0).lam == 0.
    with pytest.raises(ValidationError):
        params.replace(volatility=0.2)


@pytest.mark.parametrize('label', [1, '1', 'Set1', 'set1', ' SET_1 '])
def test_normalize_set_label(label):
    assert normalize_set_label(label) == 'set1'


def test_normalize_set_label_unknown():
    with pytest.raises(ValidationError):
        normalize_set_label('set4')


def test_reference_price():
    assert reference_price('set1', 100, 100) == 3.8038
    assert reference_price(2, 90., 100.) == 5.6162
    assert reference_price('set3', 110, 90) == 29.5758


def test_payoff():
    np.testing.assert_allclose(payoff(np.array([0., 100., 150.]), np.array([0., 80., 150.]), 100.), [100., 10., 0.])
