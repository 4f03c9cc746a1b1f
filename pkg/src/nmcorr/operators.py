"""Dense complex-matrix algebra for finite-dimensional open systems.

Operators are plain ``numpy`` arrays of shape ``(d, d)``.  Conventions:
``hbar = k_B = 1``; the two-level basis order is ``(|e>, |g>)`` so that
``sigma_z = diag(+1, -1)`` and ``sigma_minus = |g><e|`` lowers the qubit.
"""

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "SIGMA_X", "SIGMA_Y", "SIGMA_Z", "SIGMA_PLUS", "SIGMA_MINUS",
    "SystemModel", "EigenoperatorDecomposition",
    "dag", "is_hermitian", "commutator", "interaction_picture",
    "eigenoperator_decompose", "tensor_embed",
    "identity", "destroy", "create", "number", "two_level",
]

SIGMA_PLUS = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)
SIGMA_MINUS = np.array([[0.0, 0.0], [1.0, 0.0]], dtype=complex)
SIGMA_X = SIGMA_PLUS + SIGMA_MINUS
SIGMA_Y = -1j * SIGMA_PLUS + 1j * SIGMA_MINUS
SIGMA_Z = np.diag([1.0, -1.0]).astype(complex)

HERMITICITY_TOL = 1e-12


def _as_operator(a) -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise ValueError(f"operator must be a square matrix, got shape {a.shape}")
    if not np.isfinite(a).all():
        raise ValueError("operator has non-finite entries")
    return a


def dag(a) -> np.ndarray:
    """Hermitian adjoint."""
    return np.conj(np.asarray(a)).T


def is_hermitian(a, tol: float = HERMITICITY_TOL) -> bool:
    a = np.asarray(a)
    return bool(np.max(np.abs(a - dag(a))) <= tol * max(1.0, np.max(np.abs(a))))


def identity(dim: int) -> np.ndarray:
    return np.eye(dim, dtype=complex)


def destroy(n_levels: int) -> np.ndarray:
    """Bosonic annihilation operator truncated to ``n_levels`` Fock states."""
    return np.diag(np.sqrt(np.arange(1, n_levels, dtype=float)), 1).astype(complex)


def create(n_levels: int) -> np.ndarray:
    return dag(destroy(n_levels))


def number(n_levels: int) -> np.ndarray:
    return np.diag(np.arange(n_levels, dtype=float)).astype(complex)


def commutator(a, b) -> np.ndarray:
    """Return ``a @ b - b @ a``.

    Raises
    ------
    ValueError
        If the operator dimensions differ.
    """
    a = _as_operator(a)
    b = _as_operator(b)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape[0]} vs {b.shape[0]}")
    return a @ b - b @ a


def _check_hermitian_hamiltonian(h_sys) -> np.ndarray:
    h_sys = _as_operator(h_sys)
    if not is_hermitian(h_sys, HERMITICITY_TOL):
        raise ValueError("system Hamiltonian must be Hermitian")
    return h_sys


def interaction_picture(op, h_sys, t: float) -> np.ndarray:
    """Transform ``op`` to the interaction picture: exp(iHt) op exp(-iHt).

    Uses the eigendecomposition of the (Hermitian) ``h_sys``, which is exact
    and preserves the eigenvalue multiset of ``op``.
    """
    op = _as_operator(op)
    h_sys = _check_hermitian_hamiltonian(h_sys)
    evals, v = np.linalg.eigh(h_sys)
    op_eig = dag(v) @ op @ v
    phase = np.exp(1j * evals * t)
    return v @ (np.outer(phase, np.conj(phase)) * op_eig) @ dag(v)


@dataclass(frozen=True)
class EigenoperatorDecomposition:
    """Splitting L = sum_k L_k with exp(iHt) L_k exp(-iHt) = exp(-i w_k t) L_k.

    ``terms`` is a list of ``(w_k, L_k)`` pairs with pairwise distinct Bohr
    frequencies ``w_k`` (differences of ``h_sys`` eigenvalues, grouped within
    ``degeneracy_tol``).  The identity ``L~(s) = sum_k exp(-i w_k s) L_k``
    holds for all real ``s``, negative included.
    """

    terms: list = field(default_factory=list)

    @property
    def frequencies(self):
        return [w for w, _ in self.terms]

    def reassemble(self) -> np.ndarray:
        return sum(lk for _, lk in self.terms)

    def at(self, s: float) -> np.ndarray:
        """Evaluate L~(s) from the components."""
        return sum(np.exp(-1j * w * s) * lk for w, lk in self.terms)


def eigenoperator_decompose(op, h_sys, degeneracy_tol: float = 1e-9) -> EigenoperatorDecomposition:
    """Decompose a coupling operator into Bohr-frequency components.

    In the eigenbasis of ``h_sys`` the entry ``(a, b)`` of ``op`` rotates with
    phase ``exp(-i (E_b - E_a) s)`` under the interaction picture, so grouping
    entries by the difference ``E_b - E_a`` (within ``degeneracy_tol``) yields
    components obeying ``[h_sys, L_k] = -w_k L_k``.
    """
    op = _as_operator(op)
    h_sys = _check_hermitian_hamiltonian(h_sys)
    if op.shape != h_sys.shape:
        raise ValueError(f"dimension mismatch: {op.shape[0]} vs {h_sys.shape[0]}")
    evals, v = np.linalg.eigh(h_sys)
    op_eig = dag(v) @ op @ v
    d = op.shape[0]
    bohr = np.subtract.outer(evals, evals).T  # bohr[a, b] = E_b - E_a

    entries = [(bohr[a, b], a, b) for a in range(d) for b in range(d)
               if abs(op_eig[a, b]) > 0.0]
    entries.sort(key=lambda e: e[0])

    terms = []
    i = 0
    while i < len(entries):
        w0 = entries[i][0]
        comp = np.zeros((d, d), dtype=complex)
        freqs = []
        while i < len(entries) and entries[i][0] - w0 < degeneracy_tol:
            w, a, b = entries[i]
            comp[a, b] = op_eig[a, b]
            freqs.append(w)
            i += 1
        terms.append((float(np.mean(freqs)), v @ comp @ dag(v)))
    return EigenoperatorDecomposition(terms=terms)


def tensor_embed(ops) -> np.ndarray:
    """Kronecker product of the listed operators, in order."""
    ops = [_as_operator(a) for a in ops]
    out = ops[0]
    for a in ops[1:]:
        out = np.kron(out, a)
    return out


@dataclass(frozen=True)
class SystemModel:
    """Finite-dimensional system: Hamiltonian ``h_sys`` plus coupling ``l_op``.

    ``l_op`` is the system-side factor of the system-bath interaction and may
    be non-Hermitian (e.g. ``sigma_minus``).
    """

    h_sys: np.ndarray
    l_op: np.ndarray

    def __post_init__(self):
        h = _check_hermitian_hamiltonian(self.h_sys)
        l = _as_operator(self.l_op)
        if h.shape != l.shape:
            raise ValueError("h_sys and l_op dimensions differ")
        object.__setattr__(self, "h_sys", h)
        object.__setattr__(self, "l_op", l)

    @property
    def dim(self) -> int:
        return self.h_sys.shape[0]

    def coupling_components(self, degeneracy_tol: float = 1e-9) -> EigenoperatorDecomposition:
        return eigenoperator_decompose(self.l_op, self.h_sys, degeneracy_tol)


def two_level(omega_a: float, coupling=SIGMA_MINUS) -> SystemModel:
    """Two-level system with splitting ``omega_a``: H = (omega_a/2) sigma_z."""
    return SystemModel(h_sys=0.5 * omega_a * SIGMA_Z, l_op=coupling)
