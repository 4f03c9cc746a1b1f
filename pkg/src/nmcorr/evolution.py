"""Single-time dynamics under the second-order time-convolutionless equation.

Two independent code paths compute the same dynamics: a matrix path
propagating the reduced density matrix, and (for the two-level lowering
model) three scalar equations for ``<s+>``, ``<s->``, ``<sz>``.  Their
agreement is one of the structural cross-checks of the package.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .integrate import rk4_staged, stage_times
from .operators import SIGMA_MINUS, SIGMA_PLUS, SIGMA_Z, SystemModel, dag

__all__ = [
    "Trajectory", "SpinBosonSingleTime", "check_density_matrix",
    "propagate_density", "single_time_expectation", "spin_boson_single_time",
    "expectations_from_rho",
]

TRACE_TOL = 1e-10
HERM_TOL = 1e-10
NEGATIVITY_TOL = 1e-8


def check_density_matrix(rho, trace_tol: float = TRACE_TOL, herm_tol: float = HERM_TOL,
                         negativity_tol: float = NEGATIVITY_TOL) -> np.ndarray:
    """Validate Hermiticity, unit trace and (near-)positivity of ``rho``.

    Second-order dynamics may produce transient negativity of order the
    truncation error; eigenvalues above ``-negativity_tol`` are accepted and
    reported, never clipped.
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError("density matrix must be square")
    if abs(np.trace(rho) - 1.0) > trace_tol:
        raise ValueError(f"trace {np.trace(rho)} deviates from 1 beyond {trace_tol}")
    if np.max(np.abs(rho - dag(rho))) > herm_tol:
        raise ValueError("density matrix is not Hermitian within tolerance")
    evals = np.linalg.eigvalsh(rho)
    if evals.min() < -negativity_tol:
        raise ValueError(f"eigenvalue {evals.min():.3e} below -{negativity_tol:g}")
    return rho


@dataclass(frozen=True)
class Trajectory:
    """Density-matrix trajectory with integrator statistics."""

    ts: np.ndarray
    states: np.ndarray  # shape (n, d, d)
    stats: dict

    def final(self) -> np.ndarray:
        return self.states[-1]


@dataclass(frozen=True)
class SpinBosonSingleTime:
    """Scalar-path series for the two-level lowering model."""

    ts: np.ndarray
    sp: np.ndarray
    sm: np.ndarray
    sz: np.ndarray


def _component_arrays(gammas, components, times):
    """Gamma1/Gamma2 evaluated at all RK4 stage times, per Bohr frequency."""
    out = []
    for w, lk in components:
        wk = gammas.ensure_frequency(w)
        out.append((lk, np.asarray(gammas.gamma1(times, wk), dtype=complex),
                    np.asarray(gammas.gamma2(times, wk), dtype=complex)))
    return out


def propagate_density(model: SystemModel, gammas, rho0, ts,
                      degeneracy_tol: float = 1e-9, validate: bool = True) -> Trajectory:
    """Propagate the reduced density matrix on the fixed grid ``ts``.

    The generator is time-local::

        drho/dt = -i [H, rho]
                  - sum_k { Gamma1_k(t) (L^+ L_k rho - L_k rho L^+)
                          + Gamma2_k(t) (L  L_k^+ rho - L_k^+ rho L) + h.c. }

    with ``L_k`` the Bohr-frequency components of the coupling operator.
    The assumed initial condition is a factorized system-bath state; only
    the system part ``rho0`` is propagated.
    """
    ts = np.asarray(ts, dtype=float)
    rho0 = check_density_matrix(rho0)
    decomp = model.coupling_components(degeneracy_tol)
    st = stage_times(ts)
    comps = _component_arrays(gammas, decomp.terms, st)
    h = model.h_sys
    l_op = model.l_op
    ld = dag(l_op)

    pre = [(lk, ld @ lk, l_op @ dag(lk), dag(lk)) for lk, _, _ in comps]

    def rhs(i, rho):
        out = -1j * (h @ rho - rho @ h)
        for (lk, ldlk, llkd, lkd), (_, g1, g2) in zip(pre, comps):
            t1 = g1[i] * (ldlk @ rho - lk @ rho @ ld)
            t2 = g2[i] * (llkd @ rho - lkd @ rho @ l_op)
            s = t1 + t2
            out -= s + dag(s)
        return out

    states = rk4_staged(rhs, rho0, ts)

    traces = np.einsum("nii->n", states)
    herm = np.max(np.abs(states - np.conj(np.swapaxes(states, 1, 2))), axis=(1, 2))
    min_eig = min(float(np.linalg.eigvalsh(s).min()) for s in states)
    stats = {
        "steps": len(ts) - 1,
        "max_trace_error": float(np.max(np.abs(traces - 1.0))),
        "max_hermiticity_error": float(np.max(herm)),
        "min_eigenvalue": min_eig,
    }
    if validate:
        if stats["max_trace_error"] > 1e-8:
            raise RuntimeError(f"trace drifted by {stats['max_trace_error']:.3e}")
        if min_eig < -NEGATIVITY_TOL:
            raise RuntimeError(
                f"transient negativity {min_eig:.3e} exceeds -{NEGATIVITY_TOL:g}"
                " (reported, not clipped); refine the step or weaken the coupling")
    return Trajectory(ts=ts, states=states, stats=stats)


def single_time_expectation(a_op, traj: Trajectory) -> np.ndarray:
    """Series ``<A(t)> = Tr[A rho(t)]`` over the trajectory nodes."""
    a_op = np.asarray(a_op, dtype=complex)
    if a_op.shape != traj.states.shape[1:]:
        raise ValueError("operator dimension does not match the trajectory")
    return np.einsum("ij,nji->n", a_op, traj.states)


def expectations_from_rho(rho) -> tuple:
    """(<s+>, <s->, <sz>) of a two-level density matrix."""
    rho = np.asarray(rho, dtype=complex)
    return (complex(np.trace(SIGMA_PLUS @ rho)),
            complex(np.trace(SIGMA_MINUS @ rho)),
            complex(np.trace(SIGMA_Z @ rho)))


def spin_boson_single_time(initial, gammas, ts, omega_a: Optional[float] = None) -> SpinBosonSingleTime:
    """Integrate the three scalar equations of the two-level lowering model.

    ``initial`` is ``(<s+>(0), <s->(0), <sz>(0))``.  The equations::

        d<s+>/dt = (+i w_a - conj(Gamma1) - Gamma2) <s+>
        d<s->/dt = (-i w_a - Gamma1 - conj(Gamma2)) <s->
        d<sz>/dt = -2 Re(Gamma1 + Gamma2) <sz> - 2 Re(Gamma1 - Gamma2)
    """
    ts = np.asarray(ts, dtype=float)
    w = gammas.ensure_frequency(gammas.frequencies[0] if omega_a is None else omega_a)
    st = stage_times(ts)
    g1 = np.asarray(gammas.gamma1(st, w), dtype=complex)
    g2 = np.asarray(gammas.gamma2(st, w), dtype=complex)

    def rhs(i, y):
        sp, sm, sz = y
        return np.array([
            (1j * w - np.conj(g1[i]) - g2[i]) * sp,
            (-1j * w - g1[i] - np.conj(g2[i])) * sm,
            -2.0 * (g1[i] + g2[i]).real * sz - 2.0 * (g1[i] - g2[i]).real,
        ])

    sol = rk4_staged(rhs, np.asarray(initial, dtype=complex), ts)
    return SpinBosonSingleTime(ts=ts, sp=sol[:, 0], sm=sol[:, 1], sz=sol[:, 2])
