import numpy as np
import pytest
from numpy.testing import assert_allclose

from mforce.gaussian import (CovarianceMatrix, GaussianState,
                             symplectic_eigenvalue, gaussian_entropy,
                             occupation_from_cov)

from oracles import thermal_entropy_nbar


def test_covariance_validation():
    CovarianceMatrix(s11=1.0, s12=0.0, s22=1.0)
    # determinant just inside the tolerance band below 1 is accepted
    CovarianceMatrix(s11=1.0, s12=1e-5, s22=1.0)
    with pytest.raises(ValueError):
        CovarianceMatrix(s11=1.0, s12=0.5, s22=1.0)
    with pytest.raises(ValueError):
        CovarianceMatrix(s11=0.5, s12=0.0, s22=0.5)
    c = CovarianceMatrix(s11=2.0, s12=0.3, s22=1.0)
    arr = c.as_array()
    assert arr.shape == (2, 2)
    assert arr[0, 1] == arr[1, 0] == 0.3


def test_symplectic_eigenvalue():
    assert symplectic_eigenvalue(CovarianceMatrix(1.0, 0.0, 1.0)) == 1.0
    # clamped onto 1 when the determinant sits in the roundoff band
    assert symplectic_eigenvalue(CovarianceMatrix(1.0, 1e-5, 1.0)) == 1.0
    c = CovarianceMatrix(3.0, 0.5, 2.0)
    assert_allclose(symplectic_eigenvalue(c), np.sqrt(5.75), rtol=0,
                    atol=1e-15)


def test_gaussian_entropy_values():
    assert gaussian_entropy(1.0) == 0.0
    # nu = 2 nbar + 1; oracle (nbar+1)log(nbar+1) - nbar log nbar
    assert_allclose(gaussian_entropy(2.0), 0.9547712524422192,
                    rtol=0, atol=1e-15)
    for nbar in (0.1, 0.5, 3.0):
        assert_allclose(gaussian_entropy(2.0 * nbar + 1.0),
                        thermal_entropy_nbar(nbar), rtol=0, atol=1e-14)
    assert gaussian_entropy(1.0 - 1e-10) == 0.0
    with pytest.raises(ValueError):
        gaussian_entropy(0.9)


def test_gaussian_entropy_monotone():
    rng = np.random.default_rng(5)
    for _ in range(50):
        a, b = 1.0 + rng.uniform(0.0, 10.0, size=2)
        lo, hi = min(a, b), max(a, b)
        if hi - lo < 1e-12:
            continue
        assert gaussian_entropy(hi) > gaussian_entropy(lo)


def test_occupation_from_cov():
    vac = GaussianState(0.0, 0.0, CovarianceMatrix(1.0, 0.0, 1.0))
    assert occupation_from_cov(vac) == 0.0
    # thermal state: nu = 2 nbar + 1 on the diagonal
    th = GaussianState(0.0, 0.0, CovarianceMatrix(2.0, 0.0, 2.0))
    assert_allclose(occupation_from_cov(th), 0.5, rtol=0, atol=1e-15)
    # displaced vacuum: mean_q = sqrt(2) Re alpha, occupation |alpha|^2
    coh = GaussianState(1.0, 0.0, CovarianceMatrix(1.0, 0.0, 1.0))
    assert_allclose(occupation_from_cov(coh), 0.5, rtol=0, atol=1e-15)
