import numpy as np
import pytest
from kou_pide import STABILITY_COLUMNS
from kou_pide.errors import ValidationError
from kou_pide.stability import THEOREM_PARTS, DEFAULT_PART_THETA, EigQuadruple, stab_cnfe, stab_cnab, companion, \
    check_condition, sample_quadruples, power_ratios, verify_bounds, report_frame, cnfi_constant_small_step


def test_companion():
    c = companion(np.array([0.5, 1.]), np.array([0.25, -1.]))
    assert c.shape == (2, 2, 2)
    np.testing.assert_allclose(c[1], [[1., -1.], [1., 0.]])


def test_pole_raises():
    with pytest.raises(ValueError):
        stab_cnfe(2., 0.)


def test_zero_jump_reduces_to_crank_nicolson():
    w = np.array([-1., -10. + 3j, -0.01j])
    cn = (1 + w / 2) / (1 - w / 2)
    np.testing.assert_allclose(stab_cnfe(w, 0.), cn)
    r1, r0 = stab_cnab(w, 0.)
    np.testing.assert_allclose(r1, cn)
    np.testing.assert_array_equal(r0, 0.)


def test_check_condition():
    q = EigQuadruple(np.array([1.9, 2.1, 0.5, 0.]), np.array([-1., -1., 0.5, -1.]), np.array([-1., -1., -1., 0.]),
                     np.zeros(4))
    np.testing.assert_array_equal(check_condition(q), [True, False, False, True])
    np.testing.assert_array_equal(check_condition(q, gamma=0.9), [False, False, False, True])


@pytest.mark.parametrize('domain', ['halfplane', 'real', 'complex'])
def test_samples_satisfy_hypotheses(domain):
    q = sample_quadruples(2000, domain, gamma=1., w0_max=0.2, z_max=100., seed=3)
    assert len(q) == 2000
    assert np.all(np.abs(q.w0) <= 0.2)
    assert np.all(np.real(q.w) <= 1e-12)
    if domain == 'halfplane':
        assert np.all(q.z0 == 0) and np.all(q.z2 == 0)
    else:
        assert np.all(check_condition(q))
        assert np.all(np.abs(q.z1) <= 100. * (1 + 1e-12))
    if domain == 'real':
        assert np.all(np.imag(q.z0) == 0) and np.all(np.imag(q.z1) == 0)


def test_sampler_invalid():
    with pytest.raises(ValueError):
        sample_quadruples(10, 'disk')
    with pytest.raises(ValueError):
        sample_quadruples(0)


@pytest.mark.parametrize('part', list(THEOREM_PARTS.keys()))
def test_bounds_hold(part):
    report = verify_bounds(part, samples=600, n_max=30, seed=1, batch_size=200, processes=1)
    assert report.passed, report.violations
    assert report.max_ratio <= 1. + 1e-10
    assert report.scheme == THEOREM_PARTS[part].scheme


@pytest.mark.slow
@pytest.mark.parametrize('part', list(THEOREM_PARTS.keys()))
def test_bounds_hold_full_sample(part):
    report = verify_bounds(part, samples=10000, n_max=100, seed=2, processes=-1)
    assert report.samples == 10000
    assert report.passed, report.violations
    assert report.max_ratio <= 1. + 1e-10


@pytest.mark.parametrize('part,theta', [('2b', 0.75), ('3a', 0.6), ('3b', 1.)])
def test_bounds_hold_other_theta(part, theta):
    assert verify_bounds(part, samples=300, n_max=20, theta=theta, processes=1).passed


def test_violation_detected_outside_hypothesis():
    # z1 in the right half-plane breaks the hypothesis of the CNFE result
    q = EigQuadruple(np.zeros(1, complex), np.ones(1, complex), np.zeros(1, complex), np.full(1, 0.01 + 0j))
    ratios = power_ratios(THEOREM_PARTS['1a'], q, 5, None)
    assert ratios.shape == (5, 1)
    assert np.all(ratios > 1.)


def test_theta_outside_range():
    with pytest.raises(ValidationError):
        verify_bounds('2b', samples=10, theta=1 / 3)
    with pytest.raises(ValidationError):
        verify_bounds('4a', samples=10)


def test_default_theta_is_admissible():
    for part, theta in DEFAULT_PART_THETA.items():
        THEOREM_PARTS[part].check_theta(theta)


def test_verification_is_reproducible_across_processes():
    seq = verify_bounds('2b', samples=400, n_max=10, seed=7, batch_size=100, processes=1)
    par = verify_bounds('2b', samples=400, n_max=10, seed=7, batch_size=100, processes=2)
    assert seq.max_ratio == par.max_ratio


def test_cnfi_constant_small_step():
    assert cnfi_constant_small_step(1.) == pytest.approx(2.)
    with pytest.raises(ValueError):
        cnfi_constant_small_step(2.)


def test_report_frame():
    reports = [verify_bounds(p, samples=50, n_max=5, processes=1) for p in ('1a', '3a')]
    df = report_frame(reports)
    assert list(df.columns) == STABILITY_COLUMNS
    assert list(df['part']) == ['1a', '3a'] and df['passed'].all()
