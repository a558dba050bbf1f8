"""Model parameters and the instantaneous normal-mode decomposition.

The physical setup is a harmonic oscillator S whose frequency omega(t) may be
modulated, coupled with strength kappa to a second oscillator O of fixed
frequency omega0. O leaks into a flat continuum at rate gamma. Everything
downstream (equilibrium quantities, dynamics, spectral densities) is expressed
through the dressed frequencies omega1, omega2 and the 2x2 mixing matrix Y
that diagonalizes the coupled SO quadratic form at each instant.

Units: hbar = k_B = 1.
"""

from dataclasses import dataclass

import numpy as np

__all__ = [
    "ModelParams",
    "DrivingParams",
    "DressedMode",
    "drive_omega",
    "dressed_mode",
    "mixing_matrix",
    "mixing_rate_mu",
    "bose_occupation",
]


@dataclass
class ModelParams:
    """Static parameters of the coupled-oscillator model.

    omega0      : bare frequency of S (and of O), sets the frequency unit
    kappa       : S-O coupling strength, must satisfy 0 <= kappa < omega0
    gamma       : decay rate of O into the continuum
    beta        : inverse temperature of the continuum
    f_sharp_inf : zero-point offset of the mean-force free energy (kept at 0)
    """

    omega0: float
    kappa: float
    gamma: float
    beta: float
    f_sharp_inf: float = 0.0

    def __post_init__(self):
        if self.omega0 <= 0:
            raise ValueError("omega0 must be positive")
        if self.gamma < 0:
            raise ValueError("gamma must be nonnegative")
        if self.beta <= 0:
            raise ValueError("beta must be positive")
        if not 0 <= self.kappa < self.omega0:
            raise ValueError("kappa must satisfy 0 <= kappa < omega0 "
                             "(keeps the lower dressed frequency positive)")


@dataclass
class DrivingParams:
    """Frequency modulation omega(t) = omega0 + lambda_ * exp(-eta t) sin(Omega t).

    eta = 0 gives a periodic drive, eta > 0 a damped one. lambda_ = 0 turns the
    drive off. The bound lambda_ < omega0 - kappa keeps omega2(t) > 0.
    """

    lambda_: float
    Omega: float
    eta: float = 0.0

    def __post_init__(self):
        if self.lambda_ < 0 or self.Omega < 0 or self.eta < 0:
            raise ValueError("driving parameters must be nonnegative")

    def validate_against(self, p: ModelParams):
        if self.lambda_ >= p.omega0 - p.kappa:
            raise ValueError("modulation amplitude must stay below omega0 - kappa")


@dataclass
class DressedMode:
    """Instantaneous normal-mode data: frequencies and squared mixing weights.

    w1 = Y11^2 and w2 = Y12^2 are the weights of the dressed modes in the
    S quadrature; they always sum to 1.
    """

    omega1: float
    omega2: float
    w1: float
    w2: float


def drive_omega(t, p, d=None):
    """Modulated S frequency at time t (vectorized in t)."""
    if d is None or d.lambda_ == 0.0:
        return p.omega0 + np.zeros_like(np.asarray(t, dtype=float))
    t = np.asarray(t, dtype=float)
    return p.omega0 + d.lambda_ * np.exp(-d.eta * t) * np.sin(d.Omega * t)


def _drive_omega_dot(t, p, d):
    """Time derivative of drive_omega."""
    if d is None or d.lambda_ == 0.0:
        return np.zeros_like(np.asarray(t, dtype=float))
    t = np.asarray(t, dtype=float)
    env = d.lambda_ * np.exp(-d.eta * t)
    return env * (d.Omega * np.cos(d.Omega * t) - d.eta * np.sin(d.Omega * t))


def dressed_mode(omega_t, p):
    """Normal-mode frequencies and weights for S frequency omega_t.

    omega_{1,2} = (omega_t + omega0)/2 +/- sqrt(((omega_t - omega0)/2)^2 + kappa^2)

    and, writing Delta = (omega_t - omega0)/(2 kappa), s = sqrt(1 + Delta^2):

        w1 = (s + Delta) / (2 s),   w2 = (s - Delta) / (2 s).

    kappa = 0 is degenerate (any mixing diagonalizes); we return w1 = 1, w2 = 0
    so that S simply keeps its own frequency. All downstream formulas are
    symmetric under (omega1, w1) <-> (omega2, w2), so the choice is unobservable.
    """
    half_sum = 0.5 * (omega_t + p.omega0)
    half_diff = 0.5 * (omega_t - p.omega0)
    if p.kappa == 0.0:
        if omega_t <= 0:
            raise ValueError("dressed frequency would be nonpositive")
        return DressedMode(omega1=float(omega_t), omega2=float(omega_t), w1=1.0, w2=0.0)
    root = np.hypot(half_diff, p.kappa)
    omega1 = half_sum + root
    omega2 = half_sum - root
    if omega2 <= 0:
        raise ValueError("lower dressed frequency is nonpositive; "
                         "model outside its validity range")
    delta = half_diff / p.kappa
    s = np.hypot(1.0, delta)
    w1 = 0.5 * (s + delta) / s
    w2 = 0.5 * (s - delta) / s
    if omega_t == p.omega0:
        w1 = w2 = 0.5
    return DressedMode(omega1=float(omega1), omega2=float(omega2),
                       w1=float(w1), w2=float(w2))


def mixing_matrix(omega_t, p):
    """Orthogonal, symmetric, traceless 2x2 matrix Y with Y @ Y = identity.

    Columns are the normalized eigenvectors of the coupled quadratic form,
    phases fixed so that Y11 >= 0 and Y12 >= 0:

        Y = [[sqrt(w1),  sqrt(w2)],
             [sqrt(w2), -sqrt(w1)]]

    At omega_t = omega0 this is the Hadamard-like matrix with entries 1/sqrt(2).
    """
    m = dressed_mode(omega_t, p)
    c = np.sqrt(m.w1)
    s = np.sqrt(m.w2)
    return np.array([[c, s], [s, -c]])


def mixing_rate_mu(t, p, d):
    """Off-diagonal rotation rate mu(t) = Y11 dY12/dt - dY11/dt Y12.

    Closed form (chain rule through omega(t)):

        mu(t) = - omega_dot(t) * kappa / ((omega(t) - omega0)^2 + 4 kappa^2)

    Vanishes identically for an undriven model and whenever omega_dot(t) = 0.
    """
    if p.kappa == 0.0 or d is None or d.lambda_ == 0.0:
        return np.zeros_like(np.asarray(t, dtype=float))
    w = drive_omega(t, p, d)
    wdot = _drive_omega_dot(t, p, d)
    return -wdot * p.kappa / ((w - p.omega0) ** 2 + 4.0 * p.kappa ** 2)


def bose_occupation(omega, beta):
    """Thermal occupation 1/(exp(beta*omega) - 1), safe against overflow."""
    x = np.asarray(beta * omega, dtype=float)
    if np.any(x <= 0):
        raise ValueError("bose_occupation requires beta*omega > 0")
    with np.errstate(over="ignore"):
        out = np.where(x > 700.0, 0.0, 1.0 / np.expm1(np.minimum(x, 700.0)))
    if out.ndim == 0:
        return float(out)
    return out
