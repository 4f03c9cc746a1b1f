"""Two-time correlation functions ``<A(t1) B(t2)>`` for ``t1 >= t2``.

Three evaluation modes are supported:

``markov_qrt``
    Coefficients frozen at their Markovian long-time values and memory
    kernels zeroed -- the textbook regression procedure on a constant-rate
    master equation (used for the single-time trajectory too).
``non_markov_qrt``
    Time-dependent ``Gamma1(t1)``/``Gamma2(t1)`` but no memory kernels: the
    regression procedure applied to the time-local non-Markovian equations.
``non_markov_full``
    Additionally the ``Gamma3/Gamma4`` memory terms over ``[0, t2]`` that
    couple the two measurement times through the bath and break the
    regression procedure.

The general engine closes the evolution over a full operator basis (matrix
units in the system eigenbasis): the memory terms couple the pair ``(A, B)``
to commutator pairs on both sides, so the complete ``d^2 x d^2`` correlator
matrix is evolved at once and arbitrary pairs are extracted by linearity.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .coefficients import FrozenGammaSet
from .evolution import (check_density_matrix, expectations_from_rho,
                        propagate_density, spin_boson_single_time)
from .integrate import rk4_staged, stage_times
from .operators import SIGMA_MINUS, SIGMA_PLUS, SIGMA_Z, SystemModel, commutator, dag

__all__ = [
    "MODES", "CorrelationSet", "SpinBosonCorrelators", "QrtConditionReport",
    "evolve_general", "evolve_spin_boson", "initial_conditions",
    "qrt_condition_report", "SPIN_BOSON_PAIRS",
]

MODES = ("markov_qrt", "non_markov_qrt", "non_markov_full")

SPIN_BOSON_PAIRS = {
    "pp": (SIGMA_PLUS, SIGMA_PLUS), "mm": (SIGMA_MINUS, SIGMA_MINUS),
    "mz": (SIGMA_MINUS, SIGMA_Z), "zm": (SIGMA_Z, SIGMA_MINUS),
    "pz": (SIGMA_PLUS, SIGMA_Z), "zp": (SIGMA_Z, SIGMA_PLUS),
    "zz": (SIGMA_Z, SIGMA_Z), "mp": (SIGMA_MINUS, SIGMA_PLUS),
    "pm": (SIGMA_PLUS, SIGMA_MINUS),
}


def _check_mode(mode: str) -> str:
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    return mode


def _check_t1_grid(t1s, t2):
    t1s = np.asarray(t1s, dtype=float)
    if len(t1s) < 2 or abs(t1s[0] - t2) > 1e-12:
        raise ValueError("t1 grid must start at t2 and contain at least two nodes")
    if np.any(np.diff(t1s) <= 0):
        raise ValueError("t1 grid must be strictly increasing")
    return t1s


def _pre_grid(t2: float, dt: float) -> np.ndarray:
    if t2 == 0:
        return np.array([0.0])
    n = max(2, int(np.ceil(t2 / max(dt, 1e-12))))
    return np.linspace(0.0, t2, n + 1)


def _mode_provider(gammas, mode, frequencies):
    for w in frequencies:
        gammas.ensure_frequency(w)
    if mode == "markov_qrt" and not isinstance(gammas, FrozenGammaSet):
        return gammas.frozen()
    return gammas


@dataclass(frozen=True)
class CorrelationSet:
    """Basis-closed two-time correlators for one ``t2`` and one mode.

    ``data[n, i, j] = <E_i(t1_n) E_j(t2)>`` over matrix units
    ``E_(a,b) = |a><b|`` in the eigenbasis columns of ``basis_transform``
    (row-major index ``i = a * d + b``).
    """

    t2: float
    t1s: np.ndarray
    data: np.ndarray
    mode: str
    basis_transform: np.ndarray
    rho_t2: np.ndarray

    @property
    def dim(self) -> int:
        return self.basis_transform.shape[0]

    def correlator(self, a_op, b_op) -> np.ndarray:
        """Extract ``<A(t1) B(t2)>`` for arbitrary system operators."""
        v = self.basis_transform
        av = (dag(v) @ np.asarray(a_op, dtype=complex) @ v).reshape(-1)
        bv = (dag(v) @ np.asarray(b_op, dtype=complex) @ v).reshape(-1)
        return np.einsum("i,nij,j->n", av, self.data, bv)


@dataclass(frozen=True)
class SpinBosonCorrelators:
    """The nine scalar-path correlator series of the two-level lowering model.

    Attribute letters: first = operator at ``t1``, second = operator at
    ``t2``; ``p``/``m``/``z`` stand for sigma_plus/sigma_minus/sigma_z.
    """

    t2: float
    t1s: np.ndarray
    mode: str
    series: dict = field(default_factory=dict)

    def __getattr__(self, name):
        try:
            return self.series[name]
        except KeyError:
            raise AttributeError(name) from None


def initial_conditions(rho_t2, basis_transform=None) -> np.ndarray:
    """Equal-time anchors ``C[i, j] = Tr[E_i E_j rho(t2)]`` over matrix units.

    With ``E_(a,b) = |a><b|`` the product rule gives
    ``C[(a,b), (c,e)] = delta_{b,c} rho[e, a]`` (in the basis of the units).
    """
    rho = check_density_matrix(rho_t2)
    if basis_transform is not None:
        v = np.asarray(basis_transform, dtype=complex)
        rho = dag(v) @ rho @ v
    d = rho.shape[0]
    c0 = np.zeros((d * d, d * d), dtype=complex)
    for a in range(d):
        for b in range(d):
            for e in range(d):
                c0[a * d + b, b * d + e] = rho[e, a]
    return c0


def _com_superop(x):
    d = x.shape[0]
    eye = np.eye(d, dtype=complex)
    return np.kron(x, eye) - np.kron(eye, x.T)


def evolve_general(model: SystemModel, gammas, rho0, t2: float, t1s, mode: str,
                   degeneracy_tol: float = 1e-9) -> CorrelationSet:
    """Evolve the full correlator matrix over a fixed operator basis.

    The first-time generator is the Heisenberg adjoint of the time-local
    master equation; in ``non_markov_full`` mode the memory correction adds
    ``- sum_k [ Gamma3_k(t1,t2) K(L^+)^T C K(L_k)
              + Gamma4_k(t1,t2) K(L)^T  C K(L_k^+) ]``
    with ``K(X)`` the commutator superoperator of ``X``.  The identity row of
    ``C`` carries the constant ``<B(t2)>``-type inhomogeneous terms.
    """
    mode = _check_mode(mode)
    t1s = _check_t1_grid(t1s, t2)
    rho0 = check_density_matrix(rho0)
    decomp = model.coupling_components(degeneracy_tol)
    provider = _mode_provider(gammas, mode, decomp.frequencies)

    # single-time trajectory to t2 with mode-matched coefficients
    dt = float(np.median(np.diff(t1s)))
    traj = propagate_density(model, provider, rho0, _pre_grid(t2, dt), degeneracy_tol)
    rho_t2 = traj.final()

    evals, v = np.linalg.eigh(model.h_sys)
    d = model.dim
    l_eig = dag(v) @ model.l_op @ v
    ld = dag(l_eig)
    comps = [(w, dag(v) @ lk @ v) for w, lk in decomp.terms]
    eye = np.eye(d, dtype=complex)

    # transposed generator blocks (constant); coefficients vary with t1
    kh_t = _com_superop(np.diag(evals).astype(complex)).T
    blocks = []
    for w, lk in comps:
        lkd = dag(lk)
        t1b = (np.kron(lkd, l_eig.T) - np.kron(lkd @ l_eig, eye)).T   # * conj(Gamma1_k)
        t2b = (np.kron(ld, lk.T) - np.kron(eye, (ld @ lk).T)).T      # * Gamma1_k
        t3b = (np.kron(lk, ld.T) - np.kron(lk @ ld, eye)).T          # * conj(Gamma2_k)
        t4b = (np.kron(l_eig, lkd.T) - np.kron(eye, (l_eig @ lkd).T)).T  # * Gamma2_k
        blocks.append((w, t1b, t2b, t3b, t4b, _com_superop(lk), _com_superop(lkd)))
    k_ld_t = _com_superop(ld).T
    k_l_t = _com_superop(l_eig).T

    st = stage_times(t1s)
    garr = []
    memory = mode == "non_markov_full"
    for w, *_ in blocks:
        g1 = np.asarray(provider.gamma1(st, w), dtype=complex)
        g2 = np.asarray(provider.gamma2(st, w), dtype=complex)
        if memory:
            g3 = np.asarray(provider.gamma3(st, t2, w), dtype=complex)
            g4 = np.asarray(provider.gamma4(st, t2, w), dtype=complex)
        else:
            g3 = g4 = np.zeros(len(st), dtype=complex)
        garr.append((g1, g2, g3, g4))

    def rhs(i, c):
        gen = 1j * kh_t
        mem = None
        for (w, t1b, t2b, t3b, t4b, klk, klkd), (g1, g2, g3, g4) in zip(blocks, garr):
            gen = gen + np.conj(g1[i]) * t1b + g1[i] * t2b + np.conj(g2[i]) * t3b + g2[i] * t4b
            if memory:
                term = g3[i] * (k_ld_t @ c @ klk) + g4[i] * (k_l_t @ c @ klkd)
                mem = term if mem is None else mem + term
        out = gen @ c
        if mem is not None:
            out = out - mem
        return out

    c0 = initial_conditions(rho_t2, v)
    data = rk4_staged(rhs, c0, t1s)
    return CorrelationSet(t2=float(t2), t1s=t1s, data=data, mode=mode,
                          basis_transform=v, rho_t2=rho_t2)


def evolve_spin_boson(gammas, rho0, t2: float, t1s, mode: str,
                      omega_a: Optional[float] = None) -> SpinBosonCorrelators:
    """Integrate the closed scalar systems of the two-level lowering model.

    The nine correlators split into two standalone equations (``pp``/``mm``),
    two coupled pairs driven by the constant ``<s+->(t2)``, and a coupled
    triple ``(zz, mp, pm)`` driven by ``<sz(t2)>``.  This path is derived
    independently of the general engine and is used to cross-validate it.
    """
    mode = _check_mode(mode)
    t1s = _check_t1_grid(t1s, t2)
    rho0 = check_density_matrix(rho0)
    if rho0.shape[0] != 2:
        raise ValueError("the scalar path is specific to two-level systems")
    w = gammas.ensure_frequency(gammas.frequencies[0] if omega_a is None else omega_a)
    provider = _mode_provider(gammas, mode, [w])

    dt = float(np.median(np.diff(t1s)))
    pre = _pre_grid(t2, dt)
    st_single = spin_boson_single_time(expectations_from_rho(rho0), provider, pre, w)
    sp2, sm2, sz2 = st_single.sp[-1], st_single.sm[-1], st_single.sz[-1]

    st = stage_times(t1s)
    g1 = np.asarray(provider.gamma1(st, w), dtype=complex)
    g2 = np.asarray(provider.gamma2(st, w), dtype=complex)
    memory = mode == "non_markov_full"
    if memory:
        g3 = np.asarray(provider.gamma3(st, t2, w), dtype=complex)
        g4 = np.asarray(provider.gamma4(st, t2, w), dtype=complex)
    else:
        g3 = g4 = np.zeros(len(st), dtype=complex)

    # anchors from the equal-time Pauli algebra
    y0 = np.array([
        0.0, 0.0,               # pp, mm  (sigma_+^2 = sigma_-^2 = 0)
        sm2, -sm2,              # mz, zm  (s- sz = s-,  sz s- = -s-)
        -sp2, sp2,              # pz, zp
        1.0,                    # zz      (sz sz = 1)
        (1.0 - sz2) / 2.0,      # mp      (s- s+ = (1 - sz)/2)
        (1.0 + sz2) / 2.0,      # pm
    ], dtype=complex)

    def rhs(i, y):
        pp, mm, mz, zm, pz, zp, zz, mp, pm = y
        a1, a2, a3, a4 = g1[i], g2[i], g3[i], g4[i]
        up = 1j * w - np.conj(a1) - a2
        dn = -1j * w - a1 - np.conj(a2)
        s = 2.0 * (a1 + a2).real
        dd = 2.0 * (a1 - a2).real
        return np.array([
            up * pp,
            dn * mm,
            dn * mz - 2.0 * a3 * zm,
            -s * zm - dd * sm2 - 2.0 * a4 * mz,
            up * pz - 2.0 * a4 * zp,
            -s * zp - dd * sp2 - 2.0 * a3 * pz,
            -s * zz - dd * sz2 + 4.0 * a3 * pm + 4.0 * a4 * mp,
            dn * mp + a3 * zz,
            up * pm + a4 * zz,
        ])

    sol = rk4_staged(rhs, y0, t1s)
    names = ["pp", "mm", "mz", "zm", "pz", "zp", "zz", "mp", "pm"]
    return SpinBosonCorrelators(t2=float(t2), t1s=t1s, mode=mode,
                                series={k: sol[:, i] for i, k in enumerate(names)})


@dataclass(frozen=True)
class QrtConditionReport:
    """Which regression-validity conditions hold for a pair ``(A, B)``.

    ``condition_zero_t`` is ``[L^+, A] = 0`` or ``[B, L~(s)] = 0`` (for all
    ``s``); at finite temperature ``condition_finite_t_extra`` --
    ``[L, A] = 0`` or ``[B, L~^+(s)] = 0`` -- must hold as well.  Even when
    both hold formally, a correlator coupled to non-regression correlators
    can deviate, hence the ``coupling_caveat``.
    """

    condition_zero_t: bool
    condition_finite_t_extra: bool
    norms: dict
    sampled_max: float
    predicts_qrt_zero_t: bool
    predicts_qrt_finite_t: bool
    coupling_caveat: str

    def __str__(self):
        lines = [
            f"[L+, A] = 0: {self.norms['ld_a'] < 1e-12}  (norm {self.norms['ld_a']:.2e})",
            f"[B, L_k] = 0 for all k: {self.norms['b_lk'] < 1e-12}  (norm {self.norms['b_lk']:.2e})",
            f"[L, A] = 0: {self.norms['l_a'] < 1e-12}  (norm {self.norms['l_a']:.2e})",
            f"[B, L_k+] = 0 for all k: {self.norms['b_lkd'] < 1e-12}  (norm {self.norms['b_lkd']:.2e})",
            f"QRT predicted valid at kT = 0: {self.predicts_qrt_zero_t}",
            f"QRT predicted valid at kT > 0: {self.predicts_qrt_finite_t}",
            f"caveat: {self.coupling_caveat}",
        ]
        return "\n".join(lines)


def qrt_condition_report(model: SystemModel, a_op, b_op,
                         degeneracy_tol: float = 1e-9, n_samples: int = 8) -> QrtConditionReport:
    """Check the commutator conditions under which the regression form holds.

    Commutators with the interaction-picture coupling are evaluated through
    the eigenoperator components (exact for all times) and additionally
    sampled at a few times as a consistency check.  A Markovian bath makes
    the regression procedure valid regardless of these conditions.
    """
    a_op = np.asarray(a_op, dtype=complex)
    b_op = np.asarray(b_op, dtype=complex)
    decomp = model.coupling_components(degeneracy_tol)
    l_op, ld = model.l_op, dag(model.l_op)

    norm_ld_a = float(np.max(np.abs(commutator(ld, a_op))))
    norm_l_a = float(np.max(np.abs(commutator(l_op, a_op))))
    norm_b_lk = max(float(np.max(np.abs(commutator(b_op, lk)))) for _, lk in decomp.terms)
    norm_b_lkd = max(float(np.max(np.abs(commutator(b_op, dag(lk))))) for _, lk in decomp.terms)

    rng = np.random.default_rng(17)
    sampled = 0.0
    for s in rng.uniform(-5.0, 0.0, size=n_samples):
        lt = decomp.at(s)
        if norm_b_lk < 1e-12:
            sampled = max(sampled, float(np.max(np.abs(commutator(b_op, lt)))))
        if norm_b_lkd < 1e-12:
            sampled = max(sampled, float(np.max(np.abs(commutator(b_op, dag(lt))))))

    cond_i = norm_ld_a < 1e-12 or norm_b_lk < 1e-12
    cond_ii = norm_l_a < 1e-12 or norm_b_lkd < 1e-12
    caveat = ("a correlator obeying the regression form may still deviate if its"
              " evolution couples to correlators that do not")
    return QrtConditionReport(
        condition_zero_t=cond_i,
        condition_finite_t_extra=cond_ii,
        norms={"ld_a": norm_ld_a, "l_a": norm_l_a, "b_lk": norm_b_lk, "b_lkd": norm_b_lkd},
        sampled_max=sampled,
        predicts_qrt_zero_t=cond_i,
        predicts_qrt_finite_t=cond_i and cond_ii,
        coupling_caveat=caveat,
    )
