"""Brute-force reference dynamics for a system plus discretized bosonic modes.

The total Hamiltonian is::

    H = H_S + sum_l g_l (L^+ a_l + L a_l^+) + sum_l w_l a_l^+ a_l

with a factorized initial state ``rho0 (x) R0`` where ``R0`` is the product
of per-mode truncated, renormalized Gibbs states.  Three exact strategies:

``dense``
    Full eigendecomposition of ``H`` on the composite space; any coupling
    operator, but the total dimension must stay at desk scale.
``sector``
    For a two-level system with a lowering coupling (``L = |g><e|``) the
    total excitation number is conserved; states factor into small sectors
    that are diagonalized independently, and the thermal average becomes a
    probability-ordered sum over initial bath Fock states.
``dephasing``
    For a coupling diagonal in the (diagonal) system Hamiltonian basis the
    bath factorizes mode by mode and thermal traces are evaluated exactly
    per mode, at any temperature (this covers the pure-dephasing model).

Results are exact for the truncated discrete model.  As a surrogate for the
continuum bath they are trustworthy up to the recurrence time
``~ 2 pi / (mode spacing)``; comparisons against the engine driven by the
matched discrete correlation functions are free of that horizon.
"""

import numpy as np

from .bath import DiscretizedBath
from .evolution import check_density_matrix
from .operators import (SystemModel, create, dag, destroy, identity, number,
                        tensor_embed)

__all__ = [
    "build_total_hamiltonian", "thermal_bath_state", "exact_two_time",
    "mode_gibbs_probs", "required_cutoff", "SectorOracle", "dephasing_two_time",
]

MAX_DENSE_DIM = 10_000


def mode_gibbs_probs(omega: float, kt: float, n_c: int) -> np.ndarray:
    """Occupation probabilities of a truncated, renormalized Gibbs mode."""
    n = np.arange(n_c)
    if kt == 0:
        p = np.zeros(n_c)
        p[0] = 1.0
        return p
    p = np.exp(-n * omega / kt)
    return p / p.sum()


def required_cutoff(omega: float, kt: float, max_tail: float) -> int:
    """Smallest n_c with untruncated tail ``sum_{n >= n_c} p_n < max_tail``."""
    if kt == 0:
        return 1
    x = np.exp(-omega / kt)
    return int(np.ceil(np.log(max_tail) / np.log(x))) if x > 0 else 1


def _probable_tuples(probs_per_mode, mixture_tol):
    """Joint Fock tuples covering mass >= 1 - mixture_tol, most probable first.

    Depth-first enumeration with a probability floor avoids materializing all
    ``n_c ** N`` combinations; the floor is lowered until enough mass is
    collected.
    """
    n_modes = len(probs_per_mode)
    floor = max(mixture_tol * 1e-3, 1e-300)
    for _ in range(60):
        found = []

        def rec(prefix, p, idx):
            if idx == n_modes:
                found.append((p, tuple(prefix)))
                return
            for n, pn in enumerate(probs_per_mode[idx]):
                pn_ = p * pn
                if pn_ >= floor:
                    rec(prefix + [n], pn_, idx + 1)

        rec([], 1.0, 0)
        if sum(p for p, _ in found) >= 1.0 - mixture_tol or floor <= 1e-280:
            found.sort(key=lambda e: -e[0])
            return found
        floor *= 1e-2
    raise RuntimeError("could not collect enough thermal mixture mass")


def build_total_hamiltonian(model: SystemModel, dbath: DiscretizedBath,
                            max_dim: int = MAX_DENSE_DIM) -> np.ndarray:
    """Dense composite Hamiltonian (system first, then modes in order)."""
    nc = int(dbath.fock_cutoff)
    total = model.dim * nc ** dbath.n_modes
    if total > max_dim:
        raise ValueError(
            f"composite dimension {model.dim} * {nc}^{dbath.n_modes} = {total}"
            f" exceeds the dense bound {max_dim}")
    n_modes = dbath.n_modes
    eye_s = identity(model.dim)
    a_op = destroy(nc)
    ad_op = create(nc)
    n_op = number(nc)
    h = tensor_embed([model.h_sys] + [identity(nc)] * n_modes)
    for l in range(n_modes):
        before = [identity(nc)] * l
        after = [identity(nc)] * (n_modes - l - 1)
        h = h + dbath.couplings[l] * tensor_embed([dag(model.l_op)] + before + [a_op] + after)
        h = h + dbath.couplings[l] * tensor_embed([model.l_op] + before + [ad_op] + after)
        h = h + dbath.omegas[l] * tensor_embed([eye_s] + before + [n_op] + after)
    return h


def thermal_bath_state(dbath: DiscretizedBath, kt: float,
                       max_tail: float = 1e-6) -> np.ndarray:
    """Product of per-mode truncated Gibbs states, renormalized to unit trace.

    Rejects the cutoff when any mode's untruncated occupation tail exceeds
    ``max_tail``, reporting the required cutoff.
    """
    nc = int(dbath.fock_cutoff)
    for w in dbath.omegas:
        need = required_cutoff(w, kt, max_tail)
        if nc < need:
            raise ValueError(
                f"fock_cutoff {nc} leaves occupation tail > {max_tail:g} for"
                f" mode at {w:g}; need n_c >= {need}")
    mats = [np.diag(mode_gibbs_probs(w, kt, nc)).astype(complex) for w in dbath.omegas]
    return tensor_embed(mats)


def _dense_two_time(model, dbath, kt, rho0_sys, a_op, b_op, t1s, t2, max_dim, max_tail):
    h = build_total_hamiltonian(model, dbath, max_dim)
    r0 = thermal_bath_state(dbath, kt, max_tail)
    nc = int(dbath.fock_cutoff)
    pad = [identity(nc)] * dbath.n_modes
    a_full = tensor_embed([np.asarray(a_op, dtype=complex)] + pad)
    b_full = tensor_embed([np.asarray(b_op, dtype=complex)] + pad)
    rho_t = tensor_embed([np.asarray(rho0_sys, dtype=complex), r0])

    evals, v = np.linalg.eigh(h)
    vd = dag(v)
    a_e = vd @ a_full @ v
    b_e = vd @ b_full @ v
    rho_e = vd @ rho_t @ v
    ph2 = np.exp(1j * evals * t2)
    b_t2 = (np.outer(ph2, np.conj(ph2)) * b_e)
    x = a_e * (b_t2 @ rho_e).T
    out = np.empty(len(t1s), dtype=complex)
    for i, t1 in enumerate(t1s):
        ph = np.exp(-1j * evals * t1)
        out[i] = np.conj(ph) @ (x @ ph)
    return out


class SectorOracle:
    """Excitation-sector diagonalization for a qubit with lowering coupling.

    Conserves ``M = (qubit excited) + sum_l n_l``; each sector is
    diagonalized once and cached.  System operators decompose into matrix
    units with definite sector shift, so arbitrary qubit pairs ``(A, B)``
    are supported; state vectors are dictionaries ``{sector: eigenbasis
    coefficients}``.
    """

    def __init__(self, model: SystemModel, dbath: DiscretizedBath):
        evals = np.diag(model.h_sys).real
        if np.max(np.abs(model.h_sys - np.diag(np.diag(model.h_sys)))) > 1e-12:
            raise ValueError("sector oracle requires a diagonal system Hamiltonian")
        self.e_idx = int(np.argmax(evals))
        self.g_idx = 1 - self.e_idx
        l = model.l_op
        want = np.zeros((2, 2), dtype=complex)
        want[self.g_idx, self.e_idx] = 1.0
        if model.dim != 2 or np.max(np.abs(l - want)) > 1e-12:
            raise ValueError("sector oracle requires a two-level lowering coupling")
        self.model = model
        self.dbath = dbath
        self.nc = int(dbath.fock_cutoff)
        self._sectors = {}
        self._blocks = {}

    # sector construction -------------------------------------------------
    def _fock_tuples(self, total: int):
        nmax = self.nc - 1
        n_modes = self.dbath.n_modes
        out = []

        def rec(prefix, remaining, idx):
            if idx == n_modes - 1:
                if remaining <= nmax:
                    out.append(tuple(prefix + [remaining]))
                return
            for n in range(min(nmax, remaining) + 1):
                rec(prefix + [n], remaining - n, idx + 1)

        if total >= 0:
            rec([], total, 0)
        return out

    def sector(self, m: int):
        """(basis, index, eigenvalues, eigenvectors) of excitation sector m."""
        if m in self._sectors:
            return self._sectors[m]
        evals_s = np.diag(self.model.h_sys).real
        basis = []
        for s in (0, 1):  # 1 = qubit excited
            for tup in self._fock_tuples(m - s):
                basis.append((s, tup))
        if not basis:
            self._sectors[m] = None
            return None
        idx = {st: i for i, st in enumerate(basis)}
        dim = len(basis)
        h = np.zeros((dim, dim))
        ws, gs = self.dbath.omegas, self.dbath.couplings
        for i, (s, tup) in enumerate(basis):
            h[i, i] = evals_s[self.e_idx if s else self.g_idx] + float(np.dot(ws, tup))
            if s == 1:
                for l in range(self.dbath.n_modes):
                    if tup[l] + 1 < self.nc:
                        up = list(tup)
                        up[l] += 1
                        j = idx[(0, tuple(up))]
                        coup = gs[l] * np.sqrt(tup[l] + 1)
                        h[j, i] += coup
                        h[i, j] += coup
        e, v = np.linalg.eigh(h)
        self._sectors[m] = (basis, idx, e, v)
        return self._sectors[m]

    # state manipulation ---------------------------------------------------
    def _initial_state(self, chi, bath_tuple):
        """{sector: eigen coefficients} of ``chi (x) |bath_tuple>``."""
        mb = sum(bath_tuple)
        state = {}
        for s, amp in ((1, chi[self.e_idx]), (0, chi[self.g_idx])):
            if abs(amp) < 1e-15:
                continue
            sec = self.sector(mb + s)
            if sec is None:
                continue
            basis, idx, e, v = sec
            i0 = idx[(s, bath_tuple)]
            state[mb + s] = amp * np.conj(v[i0, :])
        return state

    def _evolve(self, state, dt):
        return {m: np.exp(-1j * self.sector(m)[2] * dt) * c for m, c in state.items()}

    def _unit_components(self, op):
        """Matrix units of a qubit operator with their sector shifts."""
        op = np.asarray(op, dtype=complex)
        comps = []
        for u in range(2):
            for v_ in range(2):
                if abs(op[u, v_]) > 1e-15:
                    shift = (1 if u == self.e_idx else 0) - (1 if v_ == self.e_idx else 0)
                    comps.append((op[u, v_], u, v_, shift))
        return comps

    def _apply(self, op, state):
        """Apply a qubit operator to a sector-dict state (eigen coefficients)."""
        out = {}
        for coeff, u, v_, shift in self._unit_components(op):
            su = 1 if u == self.e_idx else 0
            sv = 1 if v_ == self.e_idx else 0
            for m, c in state.items():
                sec = self.sector(m)
                basis, idx, e, vv = sec
                pos = vv @ c
                tgt = self.sector(m + shift)
                if tgt is None:
                    continue
                tb, tidx, te, tv = tgt
                pos_out = np.zeros(len(tb), dtype=complex)
                moved = False
                for i, (s, tup) in enumerate(basis):
                    if s != sv or pos[i] == 0:
                        continue
                    j = tidx.get((su, tup))
                    if j is not None:
                        pos_out[j] += coeff * pos[i]
                        moved = True
                if moved:
                    add = dag(tv) @ pos_out
                    key = m + shift
                    out[key] = out.get(key, 0) + add
        return out

    def _op_block(self, op, m_bra, m_ket):
        """Eigenbasis block of a qubit operator between two sectors."""
        op = np.asarray(op, dtype=complex)
        key = (op.tobytes(), m_bra, m_ket)
        if key in self._blocks:
            return self._blocks[key]
        sec_b = self.sector(m_bra)
        sec_k = self.sector(m_ket)
        block = None
        if sec_b is not None and sec_k is not None:
            bb, ib, eb, vb = sec_b
            bk, ik, ek, vk = sec_k
            pos = np.zeros((len(bb), len(bk)), dtype=complex)
            any_entry = False
            for coeff, u, v_, shift in self._unit_components(op):
                if shift != m_bra - m_ket:
                    continue
                su = 1 if u == self.e_idx else 0
                sv = 1 if v_ == self.e_idx else 0
                for i, (s, tup) in enumerate(bk):
                    if s != sv:
                        continue
                    j = ib.get((su, tup))
                    if j is not None:
                        pos[j, i] += coeff
                        any_entry = True
            if any_entry:
                block = dag(vb) @ pos @ vk
        self._blocks[key] = block
        return block

    def two_time_pure(self, chi, bath_tuple, a_op, b_op, t1s, t2):
        """<A(t1) B(t2)> for the pure initial state ``chi (x) |bath_tuple>``."""
        phi2 = self._evolve(self._initial_state(chi, bath_tuple), t2)
        psi2 = self._apply(b_op, phi2)
        deltas = np.asarray(t1s, dtype=float) - t2
        out = np.zeros(len(deltas), dtype=complex)
        for m_ket, cket in psi2.items():
            ek = self.sector(m_ket)[2]
            phk = np.exp(-1j * np.outer(deltas, ek)) * cket
            for m_bra, cbra in phi2.items():
                w = self._op_block(a_op, m_bra, m_ket)
                if w is None:
                    continue
                eb = self.sector(m_bra)[2]
                phb = np.exp(-1j * np.outer(deltas, eb)) * cbra
                out += np.einsum("tj,jk,tk->t", np.conj(phb), w, phk)
        return out

    def two_time(self, rho0_sys, a_op, b_op, t1s, t2, kt,
                 mixture_tol: float = 1e-8, return_info: bool = False):
        """Thermal average over probability-ordered initial bath Fock states."""
        rho0 = check_density_matrix(rho0_sys)
        qs, chis = np.linalg.eigh(rho0)
        probs_per_mode = [mode_gibbs_probs(w, kt, self.nc) for w in self.dbath.omegas]
        states = _probable_tuples(probs_per_mode, mixture_tol)
        out = np.zeros(len(t1s), dtype=complex)
        mass = 0.0
        used = 0
        for p, tup in states:
            if mass >= 1.0 - mixture_tol:
                break
            for q, chi in zip(qs, chis.T):
                if q < 1e-14:
                    continue
                out += p * q * self.two_time_pure(chi, tup, a_op, b_op, t1s, t2)
            mass += p
            used += 1
        out /= mass
        if return_info:
            return out, {"bath_states_used": used, "mixture_mass": mass,
                         "recurrence_time": self.dbath.recurrence_time}
        return out


def _dephasing_cutoffs(dbath, kt, l_scale, tail_tol=1e-8):
    out = []
    for w, g in zip(dbath.omegas, dbath.couplings):
        disp = (l_scale * g / w) ** 2
        n_th = required_cutoff(w, kt, tail_tol)
        nc = int(np.ceil(4.0 * disp + 12.0 * np.sqrt(disp) + n_th + 10))
        out.append(max(nc, int(dbath.fock_cutoff)))
    return out


def dephasing_two_time(model: SystemModel, dbath: DiscretizedBath, kt: float,
                       rho0_sys, a_op, b_op, t1s, t2,
                       tail_tol: float = 1e-8) -> np.ndarray:
    """Exact correlator for a coupling diagonal in the system basis.

    With ``H_S = diag(E_s)`` and ``L = diag(l_s)`` the composite evolution
    factorizes mode by mode: for matrix units ``A -> |a><b|``,
    ``B -> |c><d|`` the correlator is ``delta_{bc} rho0[d, a]`` times system
    phases and a product of exact per-mode thermal traces of three
    displaced-oscillator exponentials.  Per-mode Fock cutoffs are raised
    adaptively (thermal tail + displacement headroom), so the result is
    converged in the truncation rather than pinned at ``fock_cutoff``.
    """
    h, l_op = model.h_sys, model.l_op
    if np.max(np.abs(h - np.diag(np.diag(h)))) > 1e-12:
        raise ValueError("dephasing oracle requires a diagonal system Hamiltonian")
    if np.max(np.abs(l_op - np.diag(np.diag(l_op)))) > 1e-12:
        raise ValueError("dephasing oracle requires a diagonal coupling operator")
    evals = np.diag(h).real
    lvals = np.diag(l_op)
    if np.max(np.abs(lvals.imag)) > 1e-12:
        raise ValueError("diagonal coupling must be real for a Hermitian interaction")
    lvals = lvals.real
    d = model.dim
    rho0 = check_density_matrix(rho0_sys)
    a_op = np.asarray(a_op, dtype=complex)
    b_op = np.asarray(b_op, dtype=complex)
    t1s = np.asarray(t1s, dtype=float)

    cutoffs = _dephasing_cutoffs(dbath, kt, float(np.max(np.abs(lvals))), tail_tol)
    # per-mode eigensystems of h_s = w n + l_s g (a + a^+) for each level s
    mode_sys = []
    for w, g, nc in zip(dbath.omegas, dbath.couplings, cutoffs):
        x = destroy(nc) + create(nc)
        nop = number(nc).real
        probs = mode_gibbs_probs(w, kt, nc)
        per_level = []
        for s in range(d):
            e, v = np.linalg.eigh(w * nop + lvals[s] * g * x.real)
            per_level.append((e, v))
        mode_sys.append((probs, per_level))

    def bath_factor(a, b, dd, t1):
        """prod_l Tr[R_l exp(i h_a t1) exp(-i h_b (t1-t2)) exp(-i h_d t2)]."""
        val = 1.0 + 0j
        for probs, per_level in mode_sys:
            ea, va = per_level[a]
            eb, vb = per_level[b]
            ed, vd_ = per_level[dd]
            u1 = (va * np.exp(1j * ea * t1)) @ dag(va)
            u2 = (vb * np.exp(-1j * eb * (t1 - t2))) @ dag(vb)
            u3 = (vd_ * np.exp(-1j * ed * t2)) @ dag(vd_)
            val *= np.einsum("i,ij,jk,ki->", probs.astype(complex), u1, u2, u3)
        return val

    out = np.zeros(len(t1s), dtype=complex)
    for a in range(d):
        for b in range(d):
            if a_op[a, b] == 0:
                continue
            for dd in range(d):
                coeff = a_op[a, b] * b_op[b, dd] * rho0[dd, a]
                if coeff == 0:
                    continue
                sys_phase = np.exp(1j * (evals[a] * t1s - evals[b] * (t1s - t2) - evals[dd] * t2))
                for k, t1 in enumerate(t1s):
                    out[k] += coeff * sys_phase[k] * bath_factor(a, b, dd, t1)
    return out


def exact_two_time(model: SystemModel, dbath: DiscretizedBath, kt: float,
                   rho0_sys, a_op, b_op, t1s, t2: float, method: str = "auto",
                   max_dim: int = MAX_DENSE_DIM, max_tail: float = 1e-6,
                   mixture_tol: float = 1e-8):
    """Exact ``<A(t1) B(t2)>`` of the discretized model; ``t1 >= t2 >= 0``.

    ``method`` selects the strategy (``auto`` prefers the factorized paths
    and falls back to dense diagonalization).  ``t1s`` may be a scalar or an
    array; the return matches.
    """
    scalar = np.ndim(t1s) == 0
    t1a = np.atleast_1d(np.asarray(t1s, dtype=float))
    if t2 < 0 or np.any(t1a < t2 - 1e-12):
        raise ValueError("requires t1 >= t2 >= 0")

    if method == "auto":
        try:
            SectorOracle(model, dbath)
            method = "sector"
        except ValueError:
            h, l_op = model.h_sys, model.l_op
            diag_ok = (np.max(np.abs(h - np.diag(np.diag(h)))) <= 1e-12
                       and np.max(np.abs(l_op - np.diag(np.diag(l_op)))) <= 1e-12)
            method = "dephasing" if diag_ok else "dense"

    if method == "sector":
        out = SectorOracle(model, dbath).two_time(rho0_sys, a_op, b_op, t1a, t2, kt,
                                                  mixture_tol=mixture_tol)
    elif method == "dephasing":
        out = dephasing_two_time(model, dbath, kt, rho0_sys, a_op, b_op, t1a, t2)
    elif method == "dense":
        out = _dense_two_time(model, dbath, kt, rho0_sys, a_op, b_op, t1a, t2,
                              max_dim, max_tail)
    else:
        raise ValueError(f"unknown oracle method {method!r}")
    return complex(out[0]) if scalar else out
