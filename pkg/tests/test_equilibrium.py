import numpy as np
import pytest
from numpy.testing import assert_allclose

from mforce.model import ModelParams, bose_occupation, dressed_mode
from mforce.equilibrium import (eq_nu, eq_entropy, free_energy_sharp,
                                partition_sharp, internal_energy_sharp,
                                heat_capacity_sharp, phi_and_offset,
                                star_quantities, equilibrium_point)

from oracles import thermal_entropy_nbar

P = ModelParams(omega0=1.0, kappa=0.25, gamma=0.1, beta=2.0)
MODE = dressed_mode(1.0, P)


def test_eq_nu_and_entropy():
    n1 = bose_occupation(MODE.omega1, 2.0)
    n2 = bose_occupation(MODE.omega2, 2.0)
    x = 0.5 * n1 + 0.5 * n2
    assert_allclose(eq_nu(2.0, MODE), 2.0 * x + 1.0, rtol=0, atol=1e-15)
    assert_allclose(eq_entropy(2.0, MODE), thermal_entropy_nbar(x),
                    rtol=0, atol=1e-14)
    # decoupled limit reduces to the bare thermal mode
    m0 = dressed_mode(1.0, ModelParams(1.0, 0.0, 0.1, 2.0))
    assert_allclose(eq_nu(2.0, m0), 2.0 * bose_occupation(1.0, 2.0) + 1.0,
                    rtol=0, atol=1e-15)


def test_free_energy_against_quadrature_oracle():
    # oracle: 200k-panel composite Simpson of the entropy tail integral
    assert_allclose(free_energy_sharp(2.0, MODE), -0.08954562038811531,
                    rtol=0, atol=1e-12)
    # zero coupling: exact single-mode free energy log(1 - e^{-beta})/beta
    m0 = dressed_mode(1.0, ModelParams(1.0, 0.0, 0.1, 2.0))
    assert_allclose(free_energy_sharp(2.0, m0), -0.07270672893442953,
                    rtol=0, atol=1e-12)
    # partition function is the exponential of -beta F
    f = free_energy_sharp(2.0, MODE)
    assert_allclose(partition_sharp(2.0, MODE), np.exp(-2.0 * f),
                    rtol=0, atol=1e-15)
    # free energy vanishes at zero temperature
    assert abs(free_energy_sharp(500.0, MODE)) < 1e-12


def test_internal_energy():
    e = internal_energy_sharp(2.0, MODE)
    f = free_energy_sharp(2.0, MODE)
    s = eq_entropy(2.0, MODE)
    assert_allclose(e, f + s / 2.0, rtol=0, atol=1e-15)
    # oracle: central difference of beta*F at h=1e-5
    assert_allclose(e, 0.1701829038941449, rtol=0, atol=1e-10)


def test_heat_capacity():
    # oracle: -beta dS/dbeta by central difference at h=1e-6
    assert_allclose(heat_capacity_sharp(2.0, MODE), 0.7351290970403213,
                    rtol=0, atol=1e-10)
    # vanishes identically at zero temperature
    assert heat_capacity_sharp(1000.0, MODE) == 0.0


def test_phi_and_offset_identities():
    phi, c0 = phi_and_offset(2.0, MODE)
    assert_allclose(phi, 0.9210739016641424, rtol=0, atol=1e-14)
    assert_allclose(c0, -0.0032748416111510747, rtol=0, atol=1e-12)
    n1 = bose_occupation(MODE.omega1, 2.0)
    n2 = bose_occupation(MODE.omega2, 2.0)
    # phi reproduces the mixed occupation
    assert_allclose(bose_occupation(phi, 2.0), 0.5 * (n1 + n2),
                    rtol=0, atol=1e-14)
    # c0 closes the partition-function match
    f = free_energy_sharp(2.0, MODE)
    assert_allclose(f, c0 + np.log1p(-np.exp(-2.0 * phi)) / 2.0,
                    rtol=0, atol=1e-14)
    # effective-oscillator energy identity
    e = internal_energy_sharp(2.0, MODE)
    nu = eq_nu(2.0, MODE)
    assert_allclose(e, phi * (nu - 1.0) / 2.0 + c0, rtol=0, atol=1e-13)


def test_star_quantities():
    st = star_quantities(2.0, P)
    # direct partition-ratio product
    z = (1.0 - np.exp(-2.0)) / ((1.0 - np.exp(-2.0 * MODE.omega1))
                                * (1.0 - np.exp(-2.0 * MODE.omega2)))
    assert_allclose(st.partition_star, z, rtol=0, atol=1e-14)
    assert_allclose(st.partition_star, 1.212542609173732, rtol=0, atol=1e-14)
    # oracle: -d log Z*/d beta by central difference at h=1e-6
    assert_allclose(st.internal_energy_star, 0.17067690720462547,
                    rtol=0, atol=1e-9)
    # oracle: -beta^2 dE*/dbeta by central difference at h=1e-6
    assert_allclose(st.heat_capacity_star, 0.716676956113993,
                    rtol=0, atol=1e-10)


def test_equilibrium_point_bundle():
    pt = equilibrium_point(2.0, MODE)
    assert pt.beta == 2.0
    assert_allclose(pt.nu, eq_nu(2.0, MODE), rtol=0, atol=1e-15)
    assert_allclose(pt.entropy, eq_entropy(2.0, MODE), rtol=0, atol=1e-15)
    assert_allclose(pt.free_energy_sharp, free_energy_sharp(2.0, MODE),
                    rtol=0, atol=1e-15)
    assert_allclose(pt.partition_sharp, np.exp(-2.0 * pt.free_energy_sharp),
                    rtol=0, atol=1e-15)
    assert_allclose(pt.internal_energy_sharp,
                    pt.free_energy_sharp + pt.entropy / 2.0,
                    rtol=0, atol=1e-15)
    assert_allclose(pt.heat_capacity_sharp, heat_capacity_sharp(2.0, MODE),
                    rtol=0, atol=1e-15)
    phi, c0 = phi_and_offset(2.0, MODE)
    assert_allclose(pt.phi, phi, rtol=0, atol=1e-15)
    assert_allclose(pt.h_sharp_offset, c0, rtol=0, atol=1e-15)
