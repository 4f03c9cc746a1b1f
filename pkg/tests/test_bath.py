import numpy as np
import numpy.testing as npt
import pytest

from nmcorr import (DiscretizedBath, QuadratureError, SpectralDensity, alpha,
                    alpha_eff, beta, discrete_alpha, discretize, nbar, tabulate,
                    tabulate_discrete, truncated_occupations)
from nmcorr.bath import BathCorrelationTable, _absorption_weight

from conftest import CUTOFF, GAMMA, KT


def trapezoid_alpha(t, sd, kt, n=100_000):
    """Independent brute-force reference on a dense trapezoid grid."""
    w = np.linspace(1e-9, 8 * sd.cutoff, n)
    occ = 1.0 / np.expm1(w / kt) if kt > 0 else 0.0
    f = sd.j(w) * (occ + 1.0)
    return np.trapezoid(f * np.exp(-1j * w * t), w)


def trapezoid_beta(t, sd, kt, n=100_000):
    w = np.linspace(1e-9, 8 * sd.cutoff, n)
    occ = 1.0 / np.expm1(w / kt)
    return np.trapezoid(sd.j(w) * occ * np.exp(1j * w * t), w)


def test_nbar_values():
    assert nbar(1.0, 0.0) == 0.0
    npt.assert_allclose(nbar(1.0, 1.0), 1.0 / (np.e - 1.0), rtol=1e-12)
    with pytest.raises(ValueError):
        nbar(0.0, 1.0)
    with pytest.raises(ValueError):
        nbar(-1.0, 1.0)


def test_absorption_weight_small_omega_limit(sd):
    # J(w) nbar(w) -> gamma * kT as w -> 0 for the Ohmic family
    got = _absorption_weight(sd, KT, np.array([1e-8]))[0]
    series = GAMMA * KT * (1.0 - 1e-8 / (2 * KT))  # first-order expansion
    npt.assert_allclose(got, series, rtol=1e-7)


def test_alpha_zero_time_zero_temperature_closed_form(sd):
    # int_0^inf gamma w exp(-w^2/cutoff^2) dw = gamma cutoff^2 / 2
    got = alpha(0.0, sd, 0.0)
    npt.assert_allclose(got, GAMMA * CUTOFF ** 2 / 2.0, rtol=1e-12)
    assert abs(got.imag) < 1e-14


def test_alpha_matches_bruteforce_trapezoid(sd):
    got = alpha(0.5, sd, KT)
    ref = trapezoid_alpha(0.5, sd, KT)
    assert abs(got - ref) < 1e-8


def test_beta_zero_at_zero_temperature(sd):
    for t in (0.0, 0.4, 2.2):
        assert beta(t, sd, 0.0) == 0.0


def test_beta_zero_time_positive(sd):
    got = beta(0.0, sd, KT)
    assert got.real > 0 and abs(got.imag) < 1e-12
    assert abs(got - trapezoid_beta(0.0, sd, KT)) < 1e-8


def test_correlation_hermiticity(sd):
    rng = np.random.default_rng(5)
    ts = rng.uniform(0.01, 8.0, 20)
    a_pos = alpha(ts, sd, KT)
    a_neg = alpha(-ts, sd, KT)
    npt.assert_allclose(a_neg, np.conj(a_pos), atol=1e-13)
    b_pos = beta(ts, sd, KT)
    b_neg = beta(-ts, sd, KT)
    npt.assert_allclose(b_neg, np.conj(b_pos), atol=1e-13)


def test_alpha_eff_decomposition(sd):
    for t in (0.0, 0.3, 2.0):
        lhs = alpha_eff(t, sd, KT)
        rhs = alpha(t, sd, KT) + beta(t, sd, KT)
        assert abs(lhs - rhs) < 1e-12
    assert alpha_eff(0.7, sd, 0.0) == alpha(0.7, sd, 0.0)


def test_alpha_eff_imaginary_part_temperature_independent(sd):
    vals = [alpha_eff(0.4, sd, kt).imag for kt in (0.0, 1.0, 5.0)]
    assert max(vals) - min(vals) < 1e-10


def test_tabulate_consistency(sd):
    table = tabulate(sd, KT, 3.0, 0.01)
    assert abs(table.alpha_values[0] - alpha(0.0, sd, KT)) < 1e-12
    k = 137
    assert abs(table.alpha_values[k] - alpha(k * 0.01, sd, KT)) < 1e-10
    assert abs(table.beta_values[k] - beta(k * 0.01, sd, KT)) < 1e-10
    # nodewise evaluation: halving h leaves shared nodes unchanged
    fine = tabulate(sd, KT, 3.0, 0.005)
    npt.assert_array_equal(fine.alpha_values[::2], table.alpha_values)


def test_tabulate_invariants(sd):
    table = tabulate(sd, 0.0, 1.0, 0.01)
    assert np.all(table.beta_values == 0)
    assert table.alpha_values[0].imag == 0 and table.alpha_values[0].real > 0
    with pytest.raises(ValueError):
        tabulate(sd, KT, -1.0, 0.01)


def test_quadrature_failure_reports_estimate(sd):
    with pytest.raises(QuadratureError) as err:
        alpha(0.5, sd, KT, rel_tol=1e-18)
    assert err.value.achieved is not None and err.value.achieved > 1e-18


def test_discretize_single_mode(sd):
    db = discretize(sd, 1, omega_max=6.0)
    ts = np.linspace(0, 2, 41)
    got = discrete_alpha(db, 0.0, ts)
    expect = db.couplings[0] ** 2 * np.exp(-1j * db.omegas[0] * ts)
    npt.assert_allclose(got, expect, atol=1e-14)


def test_discretize_converges_to_continuum(sd):
    ts = np.linspace(0.0, 5.0, 101)
    cont = alpha(ts, sd, KT)
    db300 = discretize(sd, 300)
    err300 = np.max(np.abs(discrete_alpha(db300, KT, ts) - cont))
    assert err300 < 1e-3 * abs(cont[0])
    db600 = discretize(sd, 600)
    err600 = np.max(np.abs(discrete_alpha(db600, KT, ts) - cont))
    # midpoint rule: second-order, so doubling should gain roughly 4x
    assert err300 / err600 > 2.0


def test_discretized_bath_validation(sd):
    with pytest.raises(ValueError):
        DiscretizedBath(omegas=np.array([1.0]), couplings=np.array([0.1, 0.2]))
    with pytest.raises(ValueError):
        DiscretizedBath(omegas=np.array([-1.0]), couplings=np.array([0.1]))
    db = discretize(sd, 8, omega_max=24.0)
    npt.assert_allclose(db.recurrence_time, 2 * np.pi / 3.0, rtol=1e-12)


def test_truncated_occupations(sd):
    db = discretize(sd, 4, omega_max=12.0, fock_cutoff=40)
    occ = truncated_occupations(db, KT)
    full = 1.0 / np.expm1(db.omegas / KT)
    npt.assert_allclose(occ, full, rtol=1e-10)  # deep cutoff: means agree
    db4 = discretize(sd, 4, omega_max=12.0, fock_cutoff=4)
    assert np.all(truncated_occupations(db4, KT) <= full + 1e-15)
    assert np.all(truncated_occupations(db4, 0.0) == 0.0)


def test_table_from_discrete(sd):
    db = discretize(sd, 16, fock_cutoff=3)
    table = tabulate_discrete(db, KT, 2.0, 0.01)
    assert isinstance(table, BathCorrelationTable)
    assert abs(table.alpha_values[5] - discrete_alpha(db, KT, 0.05)) < 1e-14
