import numpy as np
import pytest
from numpy.testing import assert_allclose

from mforce.model import (ModelParams, DrivingParams, dressed_mode,
                          drive_omega, mixing_matrix, mixing_rate_mu,
                          bose_occupation)

from oracles import central_difference


def test_model_params_validation():
    p = ModelParams(omega0=1.0, kappa=0.25, gamma=0.1, beta=2.0)
    assert p.f_sharp_inf == 0.0
    with pytest.raises(ValueError):
        ModelParams(omega0=0.0, kappa=0.0, gamma=0.1, beta=2.0)
    with pytest.raises(ValueError):
        ModelParams(omega0=1.0, kappa=0.25, gamma=-0.1, beta=2.0)
    with pytest.raises(ValueError):
        ModelParams(omega0=1.0, kappa=0.25, gamma=0.1, beta=0.0)
    with pytest.raises(ValueError):
        ModelParams(omega0=1.0, kappa=-0.1, gamma=0.1, beta=2.0)
    with pytest.raises(ValueError):
        ModelParams(omega0=1.0, kappa=1.0, gamma=0.1, beta=2.0)
    # gamma = 0 and kappa = 0 are both allowed
    ModelParams(omega0=1.0, kappa=0.0, gamma=0.0, beta=2.0)


def test_driving_params_validation():
    with pytest.raises(ValueError):
        DrivingParams(lambda_=-0.1, Omega=0.2)
    with pytest.raises(ValueError):
        DrivingParams(lambda_=0.1, Omega=-0.2)
    with pytest.raises(ValueError):
        DrivingParams(lambda_=0.1, Omega=0.2, eta=-1.0)
    p = ModelParams(omega0=1.0, kappa=0.25, gamma=0.1, beta=2.0)
    DrivingParams(lambda_=0.5, Omega=0.2).validate_against(p)
    with pytest.raises(ValueError):
        DrivingParams(lambda_=0.75, Omega=0.2).validate_against(p)


def test_drive_omega():
    p = ModelParams(omega0=1.0, kappa=0.25, gamma=0.1, beta=2.0)
    d = DrivingParams(lambda_=0.25, Omega=0.2, eta=0.025)
    t = np.array([0.0, 1.0, 3.0])
    # undriven: constant omega0, vectorized
    assert_allclose(drive_omega(t, p, None), 1.0)
    assert_allclose(drive_omega(t, p, DrivingParams(0.0, 0.2)), 1.0)
    # frozen: 1 + 0.25 exp(-0.075) sin(0.6)
    assert_allclose(float(drive_omega(3.0, p, d)), 1.1309608441991719,
                    rtol=0, atol=1e-15)
    assert drive_omega(0.0, p, d) == 1.0


def test_dressed_mode_against_eigendecomposition():
    p = ModelParams(omega0=1.0, kappa=0.25, gamma=0.1, beta=2.0)
    for wt in (0.8, 1.0, 1.3):
        m = dressed_mode(wt, p)
        # oracle: eigenvalues of the 2x2 frequency matrix
        ev = np.linalg.eigvalsh(np.array([[wt, p.kappa], [p.kappa, 1.0]]))
        assert_allclose(m.omega2, ev[0], rtol=0, atol=1e-14)
        assert_allclose(m.omega1, ev[1], rtol=0, atol=1e-14)
        assert_allclose(m.w1 + m.w2, 1.0, rtol=0, atol=1e-15)
    # frozen sample at omega_t = 1.3
    m = dressed_mode(1.3, p)
    assert_allclose(m.omega1, 1.441547594742265, rtol=0, atol=1e-15)
    assert_allclose(m.omega2, 0.8584524052577349, rtol=0, atol=1e-15)
    assert_allclose(m.w1, 0.7572478777137632, rtol=0, atol=1e-15)
    assert_allclose(m.w2, 0.24275212228623672, rtol=0, atol=1e-15)


def test_dressed_mode_special_points():
    p = ModelParams(omega0=1.0, kappa=0.25, gamma=0.1, beta=2.0)
    m = dressed_mode(1.0, p)
    assert m.w1 == 0.5 and m.w2 == 0.5
    assert_allclose(m.omega1, 1.25, rtol=0, atol=1e-15)
    assert_allclose(m.omega2, 0.75, rtol=0, atol=1e-15)
    # kappa = 0 keeps the bare frequency with all weight on one branch
    p0 = ModelParams(omega0=1.0, kappa=0.0, gamma=0.1, beta=2.0)
    m0 = dressed_mode(1.4, p0)
    assert (m0.omega1, m0.omega2, m0.w1, m0.w2) == (1.4, 1.4, 1.0, 0.0)
    with pytest.raises(ValueError):
        dressed_mode(-0.5, p0)
    # lower branch driven nonpositive
    p5 = ModelParams(omega0=1.0, kappa=0.5, gamma=0.1, beta=2.0)
    with pytest.raises(ValueError):
        dressed_mode(0.1, p5)


def test_mixing_matrix_structure():
    p = ModelParams(omega0=1.0, kappa=0.25, gamma=0.1, beta=2.0)
    for wt in (0.9, 1.0, 1.3):
        m = dressed_mode(wt, p)
        y = mixing_matrix(wt, p)
        assert_allclose(y, y.T, rtol=0, atol=1e-15)
        assert_allclose(y @ y, np.eye(2), rtol=0, atol=1e-15)
        assert abs(np.trace(y)) < 1e-15
        assert y[0, 0] >= 0 and y[0, 1] >= 0
        # columns are eigenvectors of the frequency matrix
        h2 = np.array([[wt, p.kappa], [p.kappa, 1.0]])
        assert_allclose(h2 @ y[:, 0], m.omega1 * y[:, 0], rtol=0, atol=1e-14)
        assert_allclose(h2 @ y[:, 1], m.omega2 * y[:, 1], rtol=0, atol=1e-14)
    y_res = mixing_matrix(1.0, p)
    assert_allclose(y_res[0, 0], np.sqrt(0.5), rtol=0, atol=1e-15)


def test_mixing_rate_mu():
    p = ModelParams(omega0=1.0, kappa=0.25, gamma=0.1, beta=2.0)
    d = DrivingParams(lambda_=0.25, Omega=0.2, eta=0.025)
    assert mixing_rate_mu(3.0, p, None) == 0.0
    assert mixing_rate_mu(3.0, p, DrivingParams(0.0, 0.2)) == 0.0
    p0 = ModelParams(omega0=1.0, kappa=0.0, gamma=0.1, beta=2.0)
    assert mixing_rate_mu(3.0, p0, d) == 0.0

    # oracle: central difference of the mixing-matrix entries,
    # mu = Y11 dY12/dt - dY11/dt Y12 = -0.03276330579950001 at t = 3
    assert_allclose(float(mixing_rate_mu(3.0, p, d)), -0.03276330579950001,
                    rtol=0, atol=1e-9)

    def y11(t):
        return mixing_matrix(float(drive_omega(t, p, d)), p)[0, 0]

    def y12(t):
        return mixing_matrix(float(drive_omega(t, p, d)), p)[0, 1]

    for t0 in (0.7, 5.0):
        fd = (y11(t0) * central_difference(y12, t0, 1e-6)
              - central_difference(y11, t0, 1e-6) * y12(t0))
        assert_allclose(float(mixing_rate_mu(t0, p, d)), fd, rtol=0,
                        atol=1e-9)


def test_bose_occupation():
    # 1/(e - 1)
    assert_allclose(bose_occupation(1.0, 1.0), 0.5819767068693263,
                    rtol=0, atol=1e-16)
    assert bose_occupation(1000.0, 1.0) == 0.0
    out = bose_occupation(np.array([0.5, 1.0, 2.0]), 2.0)
    assert_allclose(out, 1.0 / np.expm1(np.array([1.0, 2.0, 4.0])),
                    rtol=0, atol=1e-16)
    with pytest.raises(ValueError):
        bose_occupation(-1.0, 2.0)
    with pytest.raises(ValueError):
        bose_occupation(0.0, 2.0)
