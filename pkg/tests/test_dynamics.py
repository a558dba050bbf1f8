import numpy as np
import pytest
from numpy.testing import assert_allclose

from mforce.model import ModelParams, DrivingParams, bose_occupation, dressed_mode
from mforce.dynamics import (Moments, initial_moments_product,
                             initial_moments_joint_gibbs,
                             covariance_no_driving, covariance_relaxation,
                             propagators_driven, evolve_moments,
                             reduced_covariance, default_dense_dt)

P = ModelParams(omega0=1.0, kappa=0.25, gamma=0.1, beta=2.0)
NO_DRIVE = DrivingParams(lambda_=0.0, Omega=1.0, eta=0.0)


def _vacuum():
    return Moments(a=0j, d=0j, aa=0j, ad=0j, dd=0j,
                   na=0j, x_ad=0j, x_da=0j, nd=0j)


def test_moments_validation():
    with pytest.raises(ValueError):
        Moments(a=0j, d=0j, aa=0j, ad=0j, dd=0j,
                na=-0.1, x_ad=0j, x_da=0j, nd=0j)
    with pytest.raises(ValueError):
        Moments(a=0j, d=0j, aa=0j, ad=0j, dd=0j,
                na=0.1 + 0.1j, x_ad=0j, x_da=0j, nd=0j)
    with pytest.raises(ValueError):
        Moments(a=0j, d=0j, aa=0j, ad=0j, dd=0j,
                na=0j, x_ad=0.5j, x_da=0.5j, nd=0j)
    with pytest.raises(ValueError):
        initial_moments_product(-0.1, 0.0, 2.0, P)


def test_initial_states():
    m = initial_moments_product(0.5, 0.8, 2.0, P)
    assert_allclose(m.na, np.sinh(0.5) ** 2, rtol=0, atol=1e-15)
    assert_allclose(m.aa, -np.exp(0.8j) * np.sinh(0.5) * np.cosh(0.5),
                    rtol=0, atol=1e-15)
    assert_allclose(m.nd, bose_occupation(1.0, 2.0), rtol=0, atol=1e-15)
    assert m.a == 0 and m.d == 0 and m.ad == 0 and m.dd == 0

    g = initial_moments_joint_gibbs(2.0, P)
    md = dressed_mode(1.0, P)
    n1 = bose_occupation(md.omega1, 2.0)
    n2 = bose_occupation(md.omega2, 2.0)
    assert_allclose(g.na, 0.5 * (n1 + n2), rtol=0, atol=1e-15)
    assert_allclose(g.nd, 0.5 * (n1 + n2), rtol=0, atol=1e-15)
    assert_allclose(g.x_ad, 0.5 * (n1 - n2), rtol=0, atol=1e-15)
    assert g.aa == 0 and g.ad == 0 and g.dd == 0


def test_reduced_covariance_special_states():
    st = reduced_covariance(_vacuum())
    assert (st.mean_q, st.mean_p) == (0.0, 0.0)
    assert_allclose([st.cov.s11, st.cov.s12, st.cov.s22], [1.0, 0.0, 1.0],
                    rtol=0, atol=1e-15)
    # a coherent state keeps the vacuum covariance around a displaced mean
    alpha = 0.3 + 0.4j
    st = reduced_covariance(Moments(a=alpha, d=0j, aa=alpha ** 2, ad=0j,
                                    dd=0j, na=abs(alpha) ** 2,
                                    x_ad=0j, x_da=0j, nd=0j))
    assert_allclose(st.mean_q, np.sqrt(2.0) * 0.3, rtol=0, atol=1e-15)
    assert_allclose(st.mean_p, np.sqrt(2.0) * 0.4, rtol=0, atol=1e-15)
    assert_allclose([st.cov.s11, st.cov.s12, st.cov.s22], [1.0, 0.0, 1.0],
                    rtol=0, atol=1e-14)
    # squeezed vacuum has principal variances e^{-2r}, e^{+2r}
    st = reduced_covariance(initial_moments_product(0.5, 0.0, 2.0, P))
    assert_allclose([st.cov.s11, st.cov.s12, st.cov.s22],
                    [np.exp(-1.0), 0.0, np.exp(1.0)], rtol=0, atol=1e-14)


def test_closed_form_at_time_zero_matches_initial_state():
    cv = covariance_no_driving(0.0, 0.5, 0.0, 2.0, P)
    assert_allclose([cv.s11, cv.s12, cv.s22],
                    [np.exp(-1.0), 0.0, np.exp(1.0)], rtol=0, atol=1e-14)


def test_relaxation_form_generalizes_no_driving():
    na0 = np.sinh(0.5) ** 2
    aa0 = -np.exp(0.8j) * np.sinh(0.5) * np.cosh(0.5)
    n_osc = bose_occupation(1.0, 2.0)
    for t in np.linspace(0.0, 20.0, 41):
        a = covariance_no_driving(t, 0.5, 0.8, 2.0, P)
        b = covariance_relaxation(t, na0, aa0, n_osc, 2.0, P)
        assert_allclose([b.s11, b.s12, b.s22], [a.s11, a.s12, a.s22],
                        rtol=0, atol=1e-13)


def test_propagator_grid_validation():
    with pytest.raises(ValueError):
        propagators_driven(np.array([0.5, 1.0]), P, NO_DRIVE)
    with pytest.raises(ValueError):
        propagators_driven(np.array([0.0, 1.0, 1.0]), P, NO_DRIVE)


def test_propagators_start_from_identity():
    props = propagators_driven(np.array([0.0, 0.5]), P, NO_DRIVE)
    assert_allclose(props[0].A, np.eye(2), rtol=0, atol=1e-14)
    assert_allclose(props[0].B, np.eye(3), rtol=0, atol=1e-14)
    assert_allclose(props[0].C, np.eye(4), rtol=0, atol=1e-14)
    assert_allclose(props[0].y, np.zeros(4), rtol=0, atol=1e-14)


def test_pipeline_matches_closed_form_when_undriven():
    # ODE propagators + moment evolution against the analytic covariance
    t = np.linspace(0.0, 20.0, 81)
    m0 = initial_moments_product(0.5, 0.4, 2.0, P)
    props = propagators_driven(t, P, NO_DRIVE)
    sup = 0.0
    for pr in props:
        cv = reduced_covariance(evolve_moments(pr, m0)).cov
        ref = covariance_no_driving(pr.t, 0.5, 0.4, 2.0, P)
        sup = max(sup, abs(cv.s11 - ref.s11), abs(cv.s12 - ref.s12),
                  abs(cv.s22 - ref.s22))
    assert sup < 1e-7


def test_driven_covariance_regression():
    t = np.linspace(0.0, 10.0, 41)
    m0 = initial_moments_product(0.5, 0.4, 2.0, P)
    props = propagators_driven(t, P, DrivingParams(lambda_=0.25, Omega=0.2,
                                                   eta=0.0))
    st = reduced_covariance(evolve_moments(props[-1], m0))
    assert_allclose([st.cov.s11, st.cov.s12, st.cov.s22],
                    [1.6178241796620392, 0.5236469195655505,
                     1.1624559811856394], rtol=0, atol=1e-6)


def test_default_dense_dt():
    assert default_dense_dt(P) == 2.0 * np.pi / 20.0
    d = DrivingParams(lambda_=0.25, Omega=4.0, eta=0.0)
    assert default_dense_dt(P, d) == 2.0 * np.pi / 80.0
