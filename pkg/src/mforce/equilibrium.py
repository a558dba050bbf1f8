"""Equilibrium thermostatics of the reduced oscillator.

The reduced thermal state of S is Gaussian with symplectic eigenvalue

    nu(beta) = 2 w1 nbar(omega1, beta) + 2 w2 nbar(omega2, beta) + 1,

and all intrinsic quantities follow from its entropy S(beta): the free energy
is the tail integral F(beta) = -int_beta^inf S(alpha)/alpha^2 dalpha (zero at
zero temperature), the internal energy is F + S/beta, and the heat capacity
is -beta dS/dbeta, available in closed form. The reduced state can also be
written as a thermal state of an effective oscillator with frequency phi and
energy offset c0; both are computed here. star_quantities gives the competing
partition-function-ratio description (Z*, E*, C*) for comparison.
"""

from dataclasses import dataclass

import numpy as np

from .gaussian import gaussian_entropy
from .model import bose_occupation, dressed_mode
from .numerics import QuadratureSpec, integrate_tail

__all__ = [
    "EquilibriumPoint",
    "StarComparison",
    "eq_nu",
    "eq_entropy",
    "free_energy_sharp",
    "partition_sharp",
    "internal_energy_sharp",
    "heat_capacity_sharp",
    "phi_and_offset",
    "star_quantities",
    "equilibrium_point",
]


@dataclass
class EquilibriumPoint:
    beta: float
    nu: float
    entropy: float
    free_energy_sharp: float
    partition_sharp: float
    internal_energy_sharp: float
    heat_capacity_sharp: float
    phi: float
    h_sharp_offset: float


@dataclass
class StarComparison:
    partition_star: float
    internal_energy_star: float
    heat_capacity_star: float


def eq_nu(beta, mode):
    """Symplectic eigenvalue of the reduced thermal state of S."""
    n1 = bose_occupation(mode.omega1, beta)
    n2 = bose_occupation(mode.omega2, beta) if mode.w2 > 0 else 0.0
    return 2.0 * mode.w1 * n1 + 2.0 * mode.w2 * n2 + 1.0


def eq_entropy(beta, mode):
    """von Neumann entropy (nats) of the reduced thermal state."""
    return gaussian_entropy(eq_nu(beta, mode))


def free_energy_sharp(beta, mode, q=None):
    """Intrinsic free energy, normalized to vanish at zero temperature.

    F(beta) = -int_beta^inf S(alpha)/alpha^2 dalpha. The mode geometry
    (frequencies and weights) is held fixed; only the thermal occupations
    vary with alpha.
    """
    q = q or QuadratureSpec()
    res = integrate_tail(lambda a: eq_entropy(a, mode), beta, q)
    return -res.value


def partition_sharp(beta, mode, q=None):
    return float(np.exp(-beta * free_energy_sharp(beta, mode, q)))


def internal_energy_sharp(beta, mode, q=None):
    return free_energy_sharp(beta, mode, q) + eq_entropy(beta, mode) / beta


def _dnu_dbeta(beta, mode):
    n1 = bose_occupation(mode.omega1, beta)
    n2 = bose_occupation(mode.omega2, beta) if mode.w2 > 0 else 0.0
    return (-2.0 * mode.w1 * mode.omega1 * n1 * (n1 + 1.0)
            - 2.0 * mode.w2 * mode.omega2 * n2 * (n2 + 1.0))


def heat_capacity_sharp(beta, mode):
    """Heat capacity C = -beta dS/dbeta, fully analytic.

    dS/dnu = log((nu+1)/(nu-1))/2 and dnu/dbeta is a sum of
    -2 w_j omega_j nbar_j (nbar_j + 1) terms. Returns 0 at nu = 1 (zero
    temperature), where the product has a vanishing limit.
    """
    nu = eq_nu(beta, mode)
    if nu - 1.0 < 1e-300:
        return 0.0
    ds_dnu = 0.5 * np.log((nu + 1.0) / (nu - 1.0))
    return float(-beta * ds_dnu * _dnu_dbeta(beta, mode))


def phi_and_offset(beta, mode, q=None):
    """Effective thermal-oscillator parameters (phi, c0) of the reduced state.

    phi solves nbar(phi, beta) = w1 nbar1 + w2 nbar2 and c0 shifts the
    effective Hamiltonian so that its partition function matches the
    intrinsic one: c0 = -log(Z_sharp * (1 - e^{-beta phi})) / beta.
    """
    n1 = bose_occupation(mode.omega1, beta)
    n2 = bose_occupation(mode.omega2, beta) if mode.w2 > 0 else 0.0
    x = mode.w1 * n1 + mode.w2 * n2
    if x == 0.0:
        # occupations underflowed; phi tends to the lowest participating branch
        phi = mode.omega2 if mode.w2 > 0 else mode.omega1
    else:
        phi = np.log1p(1.0 / x) / beta
    f_sharp = free_energy_sharp(beta, mode, q)
    # c0 = F + log(Z_phi)/beta written to avoid cancellation
    c0 = f_sharp - np.log1p(-np.exp(-beta * phi)) / beta
    return float(phi), float(c0)


def star_quantities(beta, p):
    """Partition-ratio description: Z* = Z_SO/Z_O and its energy/heat capacity."""
    mode = dressed_mode(p.omega0, p)
    w0, w1, w2 = p.omega0, mode.omega1, mode.omega2
    z = -np.expm1(-beta * w0) / ((-np.expm1(-beta * w1)) * (-np.expm1(-beta * w2)))
    n0 = bose_occupation(w0, beta)
    n1 = bose_occupation(w1, beta)
    n2 = bose_occupation(w2, beta)
    e_star = w1 * n1 + w2 * n2 - w0 * n0
    c_star = beta ** 2 * (w1 ** 2 * n1 * (n1 + 1.0) + w2 ** 2 * n2 * (n2 + 1.0)
                          - w0 ** 2 * n0 * (n0 + 1.0))
    return StarComparison(partition_star=float(z),
                          internal_energy_star=float(e_star),
                          heat_capacity_star=float(c_star))


def equilibrium_point(beta, mode, q=None):
    """Bundle every equilibrium quantity at one inverse temperature."""
    q = q or QuadratureSpec()
    nu = eq_nu(beta, mode)
    s = eq_entropy(beta, mode)
    f = free_energy_sharp(beta, mode, q)
    n1 = bose_occupation(mode.omega1, beta)
    n2 = bose_occupation(mode.omega2, beta) if mode.w2 > 0 else 0.0
    x = mode.w1 * n1 + mode.w2 * n2
    if x == 0.0:
        phi = mode.omega2 if mode.w2 > 0 else mode.omega1
    else:
        phi = float(np.log1p(1.0 / x) / beta)
    c0 = float(f - np.log1p(-np.exp(-beta * phi)) / beta)
    return EquilibriumPoint(
        beta=beta,
        nu=nu,
        entropy=s,
        free_energy_sharp=f,
        partition_sharp=float(np.exp(-beta * f)),
        internal_energy_sharp=f + s / beta,
        heat_capacity_sharp=heat_capacity_sharp(beta, mode),
        phi=phi,
        h_sharp_offset=c0,
    )
