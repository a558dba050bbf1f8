"""Gaussian moment dynamics of the coupled SO pair under the damped,
possibly driven evolution.

The first moments (a, d), the quadratic moments (a^2, ad, d^2) and the
number-like moments (a^dag a, a^dag d, d^dag a, d^dag d) each close under the
evolution. In the instantaneous normal-mode frame the three blocks obey
linear ODEs with generators L1 (2x2), L2 (3x3) and L3 (4x4, plus a thermal
pump term); the lab-frame propagators A, B, C, y follow by congruence with
the mixing matrix Y(t) and its quadratic liftings R(t), G(t). For the
undriven model everything is available in closed form and the ODE path is
kept only as a cross-check.
"""

from dataclasses import dataclass

import numpy as np

from .gaussian import CovarianceMatrix, GaussianState
from .model import (bose_occupation, dressed_mode, drive_omega, mixing_matrix,
                    mixing_rate_mu)
from .numerics import OdeSpec, propagate

__all__ = [
    "Moments",
    "PropagatorSet",
    "initial_moments_product",
    "initial_moments_joint_gibbs",
    "covariance_no_driving",
    "covariance_relaxation",
    "propagators_driven",
    "evolve_moments",
    "reduced_covariance",
    "default_dense_dt",
]

_HERM_TOL = 1e-9


@dataclass
class Moments:
    """First and second moments of the SO pair.

    a, d       : <a>, <d>
    aa, ad, dd : <a^2>, <ad>, <d^2>
    na, nd     : <a^dag a>, <d^dag d> (real and nonnegative)
    x_ad, x_da : <a^dag d>, <d^dag a> (conjugate pair)
    """

    a: complex
    d: complex
    aa: complex
    ad: complex
    dd: complex
    na: complex
    x_ad: complex
    x_da: complex
    nd: complex

    def __post_init__(self):
        for name in ("na", "nd"):
            v = complex(getattr(self, name))
            if abs(v.imag) > _HERM_TOL or v.real < -_HERM_TOL:
                raise ValueError(f"{name} must be real and nonnegative, got {v}")
        if abs(self.x_da - np.conj(self.x_ad)) > _HERM_TOL:
            raise ValueError("x_da must be the conjugate of x_ad")


@dataclass
class PropagatorSet:
    """Lab-frame linear maps at one time: first-moment 2x2 A, quadratic 3x3 B,
    number-block 4x4 C with its pump vector y."""

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    y: np.ndarray
    t: float


def initial_moments_product(r, theta, beta, p):
    """Squeezed vacuum for S (squeeze r e^{i theta}) times a thermal state
    for O at inverse temperature beta."""
    if r < 0:
        raise ValueError("squeeze magnitude must be nonnegative")
    return Moments(
        a=0j, d=0j,
        aa=-np.exp(1j * theta) * np.sinh(r) * np.cosh(r),
        ad=0j, dd=0j,
        na=np.sinh(r) ** 2,
        x_ad=0j, x_da=0j,
        nd=bose_occupation(p.omega0, beta),
    )


def initial_moments_joint_gibbs(beta, p):
    """Moments of the joint SO Gibbs state at the static dressed modes."""
    m = dressed_mode(p.omega0, p)
    n1 = bose_occupation(m.omega1, beta)
    n2 = bose_occupation(m.omega2, beta)
    return Moments(
        a=0j, d=0j, aa=0j, ad=0j, dd=0j,
        na=0.5 * (n1 + n2),
        x_ad=0.5 * (n1 - n2),
        x_da=0.5 * (n1 - n2),
        nd=0.5 * (n1 + n2),
    )


def covariance_no_driving(t, r, theta, beta, p):
    """Closed-form reduced covariance of S for the undriven model with the
    product (squeezed x thermal) initial state."""
    n0 = bose_occupation(p.omega0, beta)
    m = dressed_mode(p.omega0, p)
    n1 = bose_occupation(m.omega1, beta)
    n2 = bose_occupation(m.omega2, beta)
    decay = np.exp(-0.5 * p.gamma * t)
    c2 = np.cos(p.kappa * t) ** 2
    s2 = np.sin(p.kappa * t) ** 2
    base = 2.0 * c2 * np.sinh(r) ** 2 + 2.0 * s2 * n0
    osc = c2 * np.sinh(2.0 * r)
    pump = (1.0 - decay) * (n1 + n2) + 1.0
    s11 = decay * (base - osc * np.cos(2.0 * p.omega0 * t - theta)) + pump
    s22 = decay * (base + osc * np.cos(2.0 * p.omega0 * t - theta)) + pump
    s12 = decay * osc * np.sin(2.0 * p.omega0 * t - theta)
    return CovarianceMatrix(s11=float(s11), s12=float(s12), s22=float(s22))


def covariance_relaxation(t, na0, aa0, n_osc, beta, p):
    """Closed-form reduced covariance of S for the undriven model, for an
    arbitrary zero-mean product initial state: S has second moments
    na0 = <a+a> and aa0 = <aa> (complex), O is thermal with occupation
    n_osc. The second-moment equations are linear, so this is the same
    solution as covariance_no_driving with the squeezed-vacuum moments
    replaced by (na0, aa0); the two agree exactly when na0 = sinh(r)^2,
    aa0 = -e^{i theta} sinh(r) cosh(r), n_osc = n(omega0, beta)."""
    m = dressed_mode(p.omega0, p)
    n1 = bose_occupation(m.omega1, beta)
    n2 = bose_occupation(m.omega2, beta)
    decay = np.exp(-0.5 * p.gamma * t)
    c2 = np.cos(p.kappa * t) ** 2
    s2 = np.sin(p.kappa * t) ** 2
    rot = 2.0 * c2 * aa0 * np.exp(-2.0j * p.omega0 * t)
    base = 2.0 * c2 * na0 + 2.0 * s2 * n_osc
    pump = (1.0 - decay) * (n1 + n2) + 1.0
    s11 = decay * (base + rot.real) + pump
    s22 = decay * (base - rot.real) + pump
    s12 = decay * rot.imag
    return CovarianceMatrix(s11=float(s11), s12=float(s12), s22=float(s22))


def _quadratic_lift_r(Y):
    y11, y12, y21, y22 = Y[0, 0], Y[0, 1], Y[1, 0], Y[1, 1]
    return np.array([
        [y11 ** 2, 2 * y11 * y12, y12 ** 2],
        [y11 * y21, y11 * y22 + y12 * y21, y12 * y22],
        [y21 ** 2, 2 * y21 * y22, y22 ** 2],
    ])


def _quadratic_lift_g(Y):
    y11, y12, y21, y22 = Y[0, 0], Y[0, 1], Y[1, 0], Y[1, 1]
    return np.array([
        [y11 ** 2, y11 * y12, y11 * y12, y12 ** 2],
        [y11 * y21, y11 * y22, y12 * y21, y12 * y22],
        [y11 * y21, y12 * y21, y11 * y22, y12 * y22],
        [y21 ** 2, y21 * y22, y21 * y22, y22 ** 2],
    ])


def default_dense_dt(p, d=None):
    """Output sampling that resolves both the free and driven oscillations."""
    dt = 2.0 * np.pi / (20.0 * p.omega0)
    if d is not None and d.Omega > 0:
        dt = min(dt, 2.0 * np.pi / (20.0 * d.Omega))
    return dt


def propagators_driven(t_grid, p, d, spec=None):
    """Propagator sets on t_grid for the driven, damped evolution.

    Integrates the three normal-mode-frame systems (generators L1, L2, L3
    with the thermal pump u) and converts each sample to the lab frame with
    the instantaneous mixing matrix.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid[0] != 0.0 or np.any(np.diff(t_grid) <= 0):
        raise ValueError("t_grid must increase from 0")
    spec = spec or OdeSpec(dense_dt=default_dense_dt(p, d))
    g4 = 0.25 * p.gamma
    g2 = 0.5 * p.gamma

    def freqs(t):
        m = dressed_mode(float(drive_omega(t, p, d)), p)
        return m.omega1, m.omega2

    def L1(t):
        w1, w2 = freqs(t)
        mu = float(mixing_rate_mu(t, p, d))
        return np.array([[-g4 - 1j * w1, -mu],
                         [mu, -g4 - 1j * w2]])

    def L2(t):
        w1, w2 = freqs(t)
        mu = float(mixing_rate_mu(t, p, d))
        return np.array([
            [-(g2 + 2j * w1), -2 * mu, 0.0],
            [mu, -g2 - 1j * (w1 + w2), -mu],
            [0.0, 2 * mu, -(g2 + 2j * w2)],
        ])

    def L3(t):
        w1, w2 = freqs(t)
        mu = float(mixing_rate_mu(t, p, d))
        dw = w1 - w2
        return np.array([
            [-g2, -mu, -mu, 0.0],
            [mu, -g2 + 1j * dw, 0.0, -mu],
            [mu, 0.0, -g2 - 1j * dw, -mu],
            [0.0, mu, mu, -g2],
        ])

    def pump(t):
        w1, w2 = freqs(t)
        return g2 * np.array([bose_occupation(w1, p.beta), 0.0, 0.0,
                              bose_occupation(w2, p.beta)])

    t1 = float(t_grid[-1])
    r1 = propagate(L1, 0.0, t1, spec=spec, t_eval=t_grid)
    r2 = propagate(L2, 0.0, t1, spec=spec, t_eval=t_grid)
    r3 = propagate(L3, 0.0, t1, inhomogeneity=pump, spec=spec, t_eval=t_grid)

    Y0 = mixing_matrix(float(drive_omega(0.0, p, d)), p)
    R0 = _quadratic_lift_r(Y0)
    G0 = _quadratic_lift_g(Y0)
    out = []
    for k, t in enumerate(t_grid):
        Yt = mixing_matrix(float(drive_omega(t, p, d)), p)
        Rt = _quadratic_lift_r(Yt)
        Gt = _quadratic_lift_g(Yt)
        out.append(PropagatorSet(
            A=Yt @ r1.M[k] @ Y0,
            B=Rt @ r2.M[k] @ R0,
            C=Gt @ r3.M[k] @ G0,
            y=Gt @ r3.y[k],
            t=float(t),
        ))
    return out


def evolve_moments(props, m0):
    """Apply one PropagatorSet to initial Moments."""
    v1 = props.A @ np.array([m0.a, m0.d], dtype=complex)
    v2 = props.B @ np.array([m0.aa, m0.ad, m0.dd], dtype=complex)
    v3 = props.C @ np.array([m0.na, m0.x_ad, m0.x_da, m0.nd],
                            dtype=complex) + props.y
    return Moments(a=v1[0], d=v1[1], aa=v2[0], ad=v2[1], dd=v2[2],
                   na=v3[0], x_ad=v3[1], x_da=v3[2], nd=v3[3])


def reduced_covariance(m):
    """Reduced Gaussian state of S from joint moments (vacuum = identity
    covariance convention)."""
    mq = np.sqrt(2.0) * m.a.real
    mp = np.sqrt(2.0) * m.a.imag
    na = m.na.real
    q2 = na + m.aa.real + 0.5
    p2 = na - m.aa.real + 0.5
    qp = 2.0 * m.aa.imag
    return GaussianState(
        mean_q=float(mq),
        mean_p=float(mp),
        cov=CovarianceMatrix(
            s11=float(2.0 * (q2 - mq ** 2)),
            s12=float(qp - 2.0 * mq * mp),
            s22=float(2.0 * (p2 - mp ** 2)),
        ),
    )
