import numpy as np
import numpy.testing as npt
import pytest

from nmcorr import (GammaSet, SIGMA_MINUS, SIGMA_PLUS, SIGMA_Z, SystemModel,
                    discretize, exact_two_time, propagate_density,
                    single_time_expectation, spin_boson_single_time, tabulate,
                    tabulate_discrete, truncated_occupations, two_level)
from nmcorr.bath import BathCorrelationTable
from nmcorr.evolution import check_density_matrix, expectations_from_rho
from nmcorr.operators import dag, identity

from conftest import KT, OMEGA_A, T2


def zero_bath_gammas(t_max=12.0):
    ts = np.arange(0, int(t_max / 0.01) + 1) * 0.01
    z = np.zeros(len(ts), dtype=complex)
    table = BathCorrelationTable(ts=ts, alpha_values=z, beta_values=z, rel_tol=0.0)
    return GammaSet(table, [OMEGA_A])


def test_check_density_matrix():
    with pytest.raises(ValueError, match="trace"):
        check_density_matrix(2 * identity(2))
    with pytest.raises(ValueError, match="Hermitian"):
        check_density_matrix(np.array([[1.0, 0.5], [0.0, 0.0]]))
    with pytest.raises(ValueError, match="eigenvalue"):
        check_density_matrix(np.diag([1.5, -0.5]))


def test_zero_coupling_is_unitary(model, rho0):
    # vanishing bath correlations: rho(t) = e^{-iHt} rho0 e^{iHt} exactly
    g = zero_bath_gammas()
    ts = np.linspace(0.0, 3.0, 301)
    traj = propagate_density(model, g, rho0, ts)
    for idx in (50, 150, 300):
        t = ts[idx]
        u = np.diag(np.exp(-1j * np.diag(model.h_sys) * t))
        expected = u @ rho0 @ dag(u)
        npt.assert_allclose(traj.states[idx], expected, atol=1e-12)


def test_pure_dephasing_populations_constant(rho0, sd):
    table = tabulate(sd, KT, 5.0, 0.005)
    g = GammaSet(table, [0.0])
    model = two_level(OMEGA_A, SIGMA_Z)
    ts = np.linspace(0.0, 4.0, 401)
    traj = propagate_density(model, g, rho0, ts)
    pops = traj.states[:, 0, 0].real
    npt.assert_allclose(pops, pops[0], atol=1e-10)
    # coherences do decay
    assert abs(traj.states[-1][0, 1]) < abs(traj.states[0][0, 1])


def test_trace_and_hermiticity_preserved(model, rho0, gammas12):
    ts = np.linspace(0.0, 10.0, 1001)
    traj = propagate_density(model, gammas12, rho0, ts)
    assert traj.stats["max_trace_error"] < 1e-9
    assert traj.stats["max_hermiticity_error"] < 1e-9
    assert traj.stats["min_eigenvalue"] > -1e-8


def test_identity_expectation_is_one(model, rho0, gammas12):
    ts = np.linspace(0.0, 2.0, 201)
    traj = propagate_density(model, gammas12, rho0, ts)
    ones = single_time_expectation(identity(2), traj)
    npt.assert_allclose(ones, 1.0, atol=1e-10)


def test_dephasing_sz_conserved(rho0, sd):
    table = tabulate(sd, KT, 3.0, 0.005)
    g = GammaSet(table, [0.0])
    model = two_level(OMEGA_A, SIGMA_Z)
    ts = np.linspace(0.0, 2.5, 251)
    traj = propagate_density(model, g, rho0, ts)
    sz = single_time_expectation(SIGMA_Z, traj)
    npt.assert_allclose(sz, sz[0], atol=1e-10)


def test_scalar_and_matrix_paths_agree(model, rho0, gammas12):
    # two independent derivations of the same dynamics
    ts = np.linspace(0.0, 8.0, 1601)
    traj = propagate_density(model, gammas12, rho0, ts)
    scalar = spin_boson_single_time(expectations_from_rho(rho0), gammas12, ts)
    npt.assert_allclose(single_time_expectation(SIGMA_PLUS, traj), scalar.sp, atol=1e-8)
    npt.assert_allclose(single_time_expectation(SIGMA_MINUS, traj), scalar.sm, atol=1e-8)
    npt.assert_allclose(single_time_expectation(SIGMA_Z, traj), scalar.sz, atol=1e-8)
    # conjugate initial data keep <s-> = conj(<s+>); <sz> stays real
    npt.assert_allclose(scalar.sm, np.conj(scalar.sp), atol=1e-12)
    assert np.max(np.abs(scalar.sz.imag)) < 1e-12


def test_free_scalar_evolution():
    g = zero_bath_gammas()
    ts = np.linspace(0.0, 5.0, 501)
    scalar = spin_boson_single_time((0.25, 0.25, 0.5), g, ts)
    npt.assert_allclose(scalar.sp, 0.25 * np.exp(1j * OMEGA_A * ts), atol=1e-12)
    npt.assert_allclose(scalar.sz, 0.5, atol=1e-13)


def test_markov_fixed_point(gammas12):
    # constant coefficients drive <sz> to -Re(G1 - G2)/Re(G1 + G2)
    frozen = gammas12.frozen()
    g1_inf, g2_inf = gammas12.markovian_limits()
    ts = np.linspace(0.0, 60.0, 6001)
    scalar = spin_boson_single_time((0.0, 0.0, 1.0), frozen, ts)
    target = -(g1_inf - g2_inf).real / (g1_inf + g2_inf).real
    assert abs(scalar.sz[-1] - target) < 1e-8


def test_step_halving_order(model, rho0, gammas12):
    # classic fourth-order convergence of the fixed-step integrator
    vals = {}
    for n in (100, 200, 400):
        ts = np.linspace(0.0, 2.0, n + 1)
        traj = propagate_density(model, gammas12, rho0, ts)
        vals[n] = complex(single_time_expectation(SIGMA_PLUS, traj)[-1])
    d1 = abs(vals[100] - vals[200])
    d2 = abs(vals[200] - vals[400])
    assert 8.0 < d1 / d2 < 40.0  # nominal 16


def test_zero_temperature_population_decay_vs_oracle(sd):
    # weak coupling, kT=0, excited start: population decays monotonically
    # after the initial transient and tracks the exact reference
    sd_weak = type(sd)(gamma=0.01, cutoff=5.0)
    db = discretize(sd_weak, 12, omega_max=24.0, fock_cutoff=2)
    table = tabulate_discrete(db, 0.0, 6.5, 0.005)
    g = GammaSet(table, [OMEGA_A])
    model = two_level(OMEGA_A)
    rho_e = np.diag([1.0, 0.0]).astype(complex)
    ts = np.linspace(0.0, 6.0, 601)
    traj = propagate_density(model, g, rho_e, ts)
    pop = single_time_expectation(np.diag([1.0, 0.0]).astype(complex), traj).real
    diffs = np.diff(pop[ts >= 0.5])
    assert np.all(diffs < 1e-9)
    # oracle cross-check of <sz(t)> = <sz(t) * 1(0)>
    idx = np.arange(0, 601, 60)
    ref = exact_two_time(model, db, 0.0, rho_e, SIGMA_Z, identity(2), ts[idx], 0.0)
    sz = single_time_expectation(SIGMA_Z, traj)
    assert np.max(np.abs(sz[idx] - ref)) < 5e-4


def test_weak_coupling_deviation_scales_quadratically(model):
    # gamma-halving shrinks the oracle deviation ~4x (second-order engine)
    devs = {}
    for gamma in (0.02, 0.01):
        sd_w = __import__("nmcorr").SpectralDensity(gamma=gamma, cutoff=5.0)
        db = discretize(sd_w, 8, omega_max=24.0, fock_cutoff=4)
        occ = truncated_occupations(db, KT)
        table = tabulate_discrete(db, KT, 4.5, 0.005, occupations=occ)
        g = GammaSet(table, [OMEGA_A])
        rho_e = np.diag([1.0, 0.0]).astype(complex)
        ts = np.linspace(0.0, 4.0, 801)
        traj = propagate_density(model, g, rho_e, ts)
        sz = single_time_expectation(SIGMA_Z, traj)
        idx = np.arange(0, 801, 40)
        ref = exact_two_time(model, db, KT, rho_e, SIGMA_Z, identity(2), ts[idx], 0.0)
        devs[gamma] = np.max(np.abs(sz[idx] - ref))
    ratio = devs[0.02] / devs[0.01]
    assert 2.0 < ratio < 8.0
