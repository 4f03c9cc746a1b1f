import numpy as np
import numpy.testing as npt
import pytest

from nmcorr import (MODES, SIGMA_MINUS, SIGMA_PLUS, SIGMA_X, SIGMA_Z,
                    GammaSet, SPIN_BOSON_PAIRS, evolve_general,
                    evolve_spin_boson, initial_conditions, qrt_condition_report,
                    tabulate, two_level)
from nmcorr.bath import BathCorrelationTable
from nmcorr.evolution import propagate_density, single_time_expectation
from nmcorr.operators import dag, identity

from conftest import KT, OMEGA_A, T2


def zero_bath_gammas(t_max=12.0):
    ts = np.arange(0, int(t_max / 0.01) + 1) * 0.01
    z = np.zeros(len(ts), dtype=complex)
    table = BathCorrelationTable(ts=ts, alpha_values=z, beta_values=z, rel_tol=0.0)
    return GammaSet(table, [OMEGA_A])


def t1_grid(span=3.0, dt=0.01):
    return T2 + np.arange(0, int(round(span / dt)) + 1) * dt


def test_equal_time_anchor_pm(model, rho0, gammas12):
    cset = evolve_general(model, gammas12, rho0, T2, t1_grid(1.0), "non_markov_full")
    sz_t2 = np.trace(SIGMA_Z @ cset.rho_t2)
    pm = cset.correlator(SIGMA_PLUS, SIGMA_MINUS)
    npt.assert_allclose(pm[0], (1.0 + sz_t2) / 2.0, atol=1e-10)
    zz = cset.correlator(SIGMA_Z, SIGMA_Z)
    npt.assert_allclose(zz[0], 1.0, atol=1e-10)


def test_initial_conditions_examples():
    c0 = initial_conditions(identity(2) / 2)
    # C[i, j] = Tr[E_i E_j] / d for the maximally mixed state
    for a in range(2):
        for b in range(2):
            for c in range(2):
                for e in range(2):
                    e1 = np.zeros((2, 2)); e1[a, b] = 1.0
                    e2 = np.zeros((2, 2)); e2[c, e] = 1.0
                    npt.assert_allclose(c0[a * 2 + b, c * 2 + e],
                                        np.trace(e1 @ e2) / 2.0, atol=1e-15)
    rho_e = np.diag([1.0, 0.0]).astype(complex)
    c0e = initial_conditions(rho_e)
    pm = np.einsum("i,ij,j->", SIGMA_PLUS.reshape(-1), c0e, SIGMA_MINUS.reshape(-1))
    mp = np.einsum("i,ij,j->", SIGMA_MINUS.reshape(-1), c0e, SIGMA_PLUS.reshape(-1))
    npt.assert_allclose(pm, 1.0, atol=1e-15)
    npt.assert_allclose(mp, 0.0, atol=1e-15)


def test_anchor_conjugation_symmetry(model, rho0, gammas12):
    # <A(t2) B(t2)>^* = <B^+(t2) A^+(t2)> at the anchor node
    cset = evolve_general(model, gammas12, rho0, T2, t1_grid(0.5), "non_markov_full")
    rng = np.random.default_rng(9)
    for _ in range(5):
        a = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        b = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        lhs = np.conj(cset.correlator(a, b)[0])
        rhs = cset.correlator(dag(b), dag(a))[0]
        npt.assert_allclose(lhs, rhs, atol=1e-10)


def test_case1_regression_identity(model, rho0, gammas12):
    full = evolve_spin_boson(gammas12, rho0, T2, t1_grid(), "non_markov_full")
    qrt = evolve_spin_boson(gammas12, rho0, T2, t1_grid(), "non_markov_qrt")
    assert np.max(np.abs(full.pp - qrt.pp)) < 1e-12
    assert np.max(np.abs(full.mm - qrt.mm)) < 1e-12


def test_free_evolution_spin_boson(rho0):
    g = zero_bath_gammas()
    res = evolve_spin_boson(g, rho0, T2, t1_grid(2.0), "non_markov_full")
    npt.assert_allclose(res.pp, 0.0, atol=1e-14)  # sigma_+^2 = 0
    tau = res.t1s - T2
    sz0 = 0.5  # conserved without coupling
    expected_pm = np.exp(1j * OMEGA_A * tau) * (1 + sz0) / 2
    npt.assert_allclose(res.pm, expected_pm, atol=1e-10)


def test_mirror_symmetry(model, rho0, gammas12):
    res = evolve_spin_boson(gammas12, rho0, T2, t1_grid(2.0), "non_markov_full")
    npt.assert_allclose(res.mm, np.conj(res.pp), atol=1e-14)


def test_general_vs_scalar_all_modes(model, rho0, gammas12):
    grid = t1_grid(4.0)
    for mode in MODES:
        cset = evolve_general(model, gammas12, rho0, T2, grid, mode)
        scal = evolve_spin_boson(gammas12, rho0, T2, grid, mode)
        for key, (a, b) in SPIN_BOSON_PAIRS.items():
            dev = np.max(np.abs(cset.correlator(a, b) - scal.series[key]))
            assert dev < 1e-8, f"{mode}/{key}: {dev}"


def test_general_vs_scalar_random_states(model, gammas12):
    rng = np.random.default_rng(10)
    grid = t1_grid(2.0)
    for _ in range(5):
        v = rng.normal(size=2) + 1j * rng.normal(size=2)
        v /= np.linalg.norm(v)
        rho = np.outer(v, v.conj())
        for mode in ("non_markov_qrt", "non_markov_full"):
            cset = evolve_general(model, gammas12, rho, T2, grid, mode)
            scal = evolve_spin_boson(gammas12, rho, T2, grid, mode)
            for key, (a, b) in SPIN_BOSON_PAIRS.items():
                dev = np.max(np.abs(cset.correlator(a, b) - scal.series[key]))
                assert dev < 1e-8, f"{mode}/{key}: {dev}"


def test_identity_row_carries_single_time(model, rho0, gammas12):
    # <1(t1) B(t2)> stays equal to <B(t2)> for all t1
    grid = t1_grid(2.0)
    cset = evolve_general(model, gammas12, rho0, T2, grid, "non_markov_full")
    series = cset.correlator(identity(2), SIGMA_MINUS)
    sm_t2 = np.trace(SIGMA_MINUS @ cset.rho_t2)
    npt.assert_allclose(series, sm_t2, atol=1e-10)


def test_mode_and_grid_validation(model, rho0, gammas12):
    with pytest.raises(ValueError, match="mode"):
        evolve_general(model, gammas12, rho0, T2, t1_grid(1.0), "bogus")
    with pytest.raises(ValueError, match="start at t2"):
        evolve_general(model, gammas12, rho0, T2, np.array([2.0, 3.0]), MODES[0])
    with pytest.raises(ValueError, match="two-level"):
        evolve_spin_boson(gammas12, np.eye(3) / 3, T2, t1_grid(1.0), MODES[1])


def test_qrt_condition_report(model):
    # raising pair: both conditions hold, regression predicted valid
    rep = qrt_condition_report(model, SIGMA_PLUS, SIGMA_PLUS)
    assert rep.predicts_qrt_zero_t and rep.predicts_qrt_finite_t
    # (sz, s-): conditions fail, memory corrections predicted
    rep2 = qrt_condition_report(model, SIGMA_Z, SIGMA_MINUS)
    assert not rep2.predicts_qrt_zero_t
    # dephasing model at zero T: [L^+, A] = 0
    model_z = two_level(OMEGA_A, SIGMA_Z)
    rep3 = qrt_condition_report(model_z, SIGMA_Z, SIGMA_Z)
    assert rep3.predicts_qrt_zero_t and rep3.predicts_qrt_finite_t
    assert "deviate" in str(rep3)


def test_memory_terms_shift_full_mode(model, rho0, gammas12):
    # sanity: for (sz, sz) the full mode differs from the regression mode
    grid = t1_grid(1.0)
    full = evolve_spin_boson(gammas12, rho0, T2, grid, "non_markov_full")
    qrt = evolve_spin_boson(gammas12, rho0, T2, grid, "non_markov_qrt")
    assert np.max(np.abs(full.zz - qrt.zz)) > 1e-2
