import numpy as np
import pytest
from numpy.testing import assert_allclose

from mforce.model import ModelParams, DrivingParams
from mforce.dynamics import (initial_moments_joint_gibbs,
                             initial_moments_product, propagators_driven,
                             evolve_moments)
from mforce.thermo import (ThermoRecord, quench_work, work_driven,
                           heat_and_entropy_production, noneq_free_energy,
                           trajectory_record, weak_coupling_measure)

P = ModelParams(omega0=1.0, kappa=0.25, gamma=0.1, beta=2.0)
NO_DRIVE = DrivingParams(lambda_=0.0, Omega=1.0, eta=0.0)
DRIVE = DrivingParams(lambda_=0.25, Omega=0.2, eta=0.0)


def test_thermo_record_validation():
    ones = np.ones(4)
    kw = dict(t=ones, energy_sharp=ones, entropy=ones, work_total=ones,
              work_sharp=ones, delta_f_rs=ones, heat_sharp=ones,
              entropy_production=ones, free_energy_noneq=ones,
              bare_energy=ones)
    ThermoRecord(**kw)
    with pytest.raises(ValueError):
        ThermoRecord(**{**kw, "entropy": np.ones(3)})
    with pytest.raises(ValueError):
        ThermoRecord(**{**kw, "entropy": np.ones((4, 1))})
    with pytest.raises(ValueError):
        ThermoRecord(**{**kw, "heat_sharp": np.array([0.0, 1.0, np.nan, 2.0])})


def test_quench_work():
    # oracle: partition-ratio logarithm plus Simpson tail free energy
    assert_allclose(quench_work(2.0, P), 0.006814122011201254,
                    rtol=0, atol=1e-12)
    p0 = ModelParams(omega0=1.0, kappa=0.0, gamma=0.1, beta=2.0)
    assert abs(quench_work(2.0, p0)) < 1e-14


def _driven_moments(t, d):
    m0 = initial_moments_joint_gibbs(2.0, P)
    return [evolve_moments(pr, m0) for pr in propagators_driven(t, P, d)]


def test_work_driven_series():
    dt = 0.25
    t = np.arange(0.0, 5.0 + dt / 2.0, dt)
    ms = _driven_moments(t, DRIVE)
    w, ws, dfrs = work_driven(t, ms, P, DRIVE)
    assert w[0] == 0.0 and ws[0] == 0.0 and dfrs[0] == 0.0
    assert_allclose(w[-1], 0.03747756423170842, rtol=0, atol=1e-9)
    assert_allclose(ws[-1], 0.03659353253490529, rtol=0, atol=1e-9)
    assert np.abs(w - ws - dfrs).max() == 0.0


def test_work_driven_validation():
    t = np.arange(0.0, 6.0, 1.0)
    ms = _driven_moments(t, DRIVE)
    with pytest.raises(ValueError):
        work_driven(t, ms, P, DRIVE)  # grid too coarse to converge
    with pytest.raises(ValueError):
        work_driven(t[:4], ms[:4], P, DRIVE)
    with pytest.raises(ValueError):
        work_driven(t, ms[:-1], P, DRIVE)
    tn = np.array([0.0, 1.0, 2.0, 3.5, 5.0, 6.0])
    with pytest.raises(ValueError):
        work_driven(tn, ms, P, DRIVE)


def test_work_driven_without_driving_is_zero():
    dt = 0.25
    t = np.arange(0.0, 5.0 + dt / 2.0, dt)
    ms = _driven_moments(t, NO_DRIVE)
    for series in work_driven(t, ms, P, NO_DRIVE):
        assert np.all(series == 0.0)
    for series in work_driven(t, ms, P, None):
        assert np.all(series == 0.0)


def test_heat_and_entropy_production_algebra():
    e = np.array([1.0, 1.1, 1.05])
    ws = np.array([0.0, 0.05, 0.07])
    s = np.array([0.5, 0.7, 0.65])
    q, sigma = heat_and_entropy_production(e, s, ws, 2.0)
    assert_allclose(q, [0.0, 0.05, -0.02], rtol=0, atol=1e-15)
    assert_allclose(sigma, [0.0, 0.1, 0.19], rtol=0, atol=1e-15)


def test_noneq_free_energy_routes_agree():
    m0 = initial_moments_product(0.5, 0.4, 2.0, P)
    t = np.linspace(0.0, 10.0, 41)
    props = propagators_driven(t, P, NO_DRIVE)
    m = evolve_moments(props[-1], m0)
    primary, cross = noneq_free_energy(m, 10.0, 2.0, P)
    assert_allclose(primary, -0.05470257642625309, rtol=0, atol=1e-9)
    assert abs(primary - cross) < 1e-12


def test_quench_record_invariants():
    m0 = initial_moments_product(0.5, 0.4, 2.0, P)
    t = np.linspace(0.0, 10.0, 41)
    rec = trajectory_record(t, m0, P, protocol="quench")
    wq = quench_work(2.0, P)
    assert np.all(rec.work_total == 0.0)
    assert rec.work_sharp[0] == 0.0
    assert np.abs(rec.work_sharp[1:] - wq).max() == 0.0
    # first law and derived series hold exactly by construction
    res = rec.energy_sharp - rec.energy_sharp[0] - rec.work_sharp \
        - rec.heat_sharp
    assert np.abs(res).max() == 0.0
    assert_allclose(rec.free_energy_noneq,
                    rec.energy_sharp - rec.entropy / 2.0, rtol=0, atol=1e-15)
    # switching against a product state dissipates at all times
    assert rec.entropy_production.min() >= 0.0
    # t=0 energy is read from the bare system Hamiltonian
    assert_allclose(rec.energy_sharp[0], float(m0.na.real), rtol=0,
                    atol=1e-15)
    assert_allclose(rec.bare_energy[0], float(m0.na.real), rtol=0, atol=1e-15)


def test_trajectory_record_protocol_validation():
    m0 = initial_moments_product(0.5, 0.4, 2.0, P)
    t = np.linspace(0.0, 5.0, 21)
    with pytest.raises(ValueError):
        trajectory_record(t, m0, P, d=DRIVE, protocol="quench")
    with pytest.raises(ValueError):
        trajectory_record(t, m0, P, protocol="adiabatic")


def test_weak_coupling_measure_relaxation():
    vals = weak_coupling_measure("relaxation", [1, 2])
    assert_allclose(vals, [0.024589892431573668, 0.0063319257586291755],
                    rtol=0, atol=1e-12)
    assert vals[1] < vals[0]


def test_weak_coupling_measure_stationary():
    vals = weak_coupling_measure("stationary", [1])
    assert_allclose(vals, [0.01813829942243053], rtol=0, atol=1e-9)


def test_weak_coupling_measure_validation():
    with pytest.raises(ValueError):
        weak_coupling_measure("relaxation", [0.5])
    with pytest.raises(ValueError):
        weak_coupling_measure("bogus", [1])
