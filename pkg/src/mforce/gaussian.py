"""Single-mode Gaussian state primitives.

Covariance convention: sigma is the 2x2 matrix of centered second moments of
(q, p) scaled so that the vacuum is the identity, i.e. the diagonal entries
are twice the variances and s12 = <qp + pq> - 2<q><p>. The uncertainty
principle then reads det(sigma) >= 1.
"""

from dataclasses import dataclass

import numpy as np

__all__ = [
    "CovarianceMatrix",
    "GaussianState",
    "symplectic_eigenvalue",
    "gaussian_entropy",
    "occupation_from_cov",
]

# tolerance band below det = 1 absorbed as floating point drift
_NU_BAND = 1e-9


@dataclass
class CovarianceMatrix:
    s11: float
    s12: float
    s22: float

    def __post_init__(self):
        det = self.s11 * self.s22 - self.s12 ** 2
        if det < 1.0 - _NU_BAND:
            raise ValueError(f"covariance determinant {det} violates the "
                             "uncertainty bound det >= 1")

    def as_array(self):
        return np.array([[self.s11, self.s12], [self.s12, self.s22]])


@dataclass
class GaussianState:
    mean_q: float
    mean_p: float
    cov: CovarianceMatrix


def symplectic_eigenvalue(cov):
    """nu = sqrt(det sigma), clamped to 1 within a 1e-9 band below it."""
    det = cov.s11 * cov.s22 - cov.s12 ** 2
    if det < 1.0 - _NU_BAND:
        raise ValueError("unphysical covariance: det < 1")
    return float(np.sqrt(max(det, 1.0)))


def gaussian_entropy(nu):
    """von Neumann entropy (nats) of a single-mode Gaussian state.

    S(nu) = (nu+1)/2 log((nu+1)/2) - (nu-1)/2 log((nu-1)/2), with S(1) = 0
    by the 0 log 0 = 0 convention.
    """
    nu = float(nu)
    if nu < 1.0:
        if nu > 1.0 - _NU_BAND:
            nu = 1.0
        else:
            raise ValueError("symplectic eigenvalue below 1")
    up = 0.5 * (nu + 1.0)
    dn = 0.5 * (nu - 1.0)
    if dn == 0.0:
        return 0.0
    return float(up * np.log(up) - dn * np.log(dn))


def occupation_from_cov(state):
    """Mean quantum number <a^dag a> = (s11+s22)/4 + (<q>^2+<p>^2)/2 - 1/2."""
    c = state.cov
    return 0.25 * (c.s11 + c.s22) + 0.5 * (state.mean_q ** 2 + state.mean_p ** 2) - 0.5
