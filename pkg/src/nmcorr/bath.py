"""Continuum and discretized bosonic bath descriptions.

The bath enters the evolution equations only through its two correlation
functions (``hbar = k_B = 1``)::

    alpha(t) = int_0^inf dw J(w) (nbar(w) + 1) exp(-i w t)     # emission
    beta(t)  = int_0^inf dw J(w) nbar(w) exp(+i w t)           # absorption

with ``nbar(w) = 1 / (exp(w / kT) - 1)`` and the Ohmic-family spectral
density ``J(w) = gamma * w * (w / cutoff)**(n-1) * exp(-(w / cutoff)**2)``.
A temperature is a plain ``kT >= 0`` float; ``kT == 0`` means exact zero.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

__all__ = [
    "SpectralDensity", "BathCorrelationTable", "DiscretizedBath",
    "QuadratureError", "nbar", "alpha", "beta", "alpha_eff",
    "tabulate", "discretize", "discrete_alpha", "discrete_beta",
    "tabulate_discrete", "truncated_occupations",
]

DEFAULT_REL_TOL = 1e-10
_GL_ORDER = 16


class QuadratureError(RuntimeError):
    """Raised when the correlation-function quadrature misses its tolerance."""

    def __init__(self, message, achieved=None):
        super().__init__(message)
        self.achieved = achieved


@dataclass(frozen=True)
class SpectralDensity:
    """Ohmic-family spectral density with Gaussian cutoff.

    Parameters
    ----------
    gamma: dimensionless coupling strength (>= 0; zero decouples the bath).
    cutoff: cutoff frequency (> 0); the integrand is negligible above
        ``8 * cutoff`` (suppressed by ``exp(-64)``).
    ohmicity: integer ``n >= 1``; ``n = 1`` is Ohmic.
    """

    gamma: float
    cutoff: float
    ohmicity: int = 1
    kind: str = "ohmic_gaussian_cutoff"

    def __post_init__(self):
        if self.kind != "ohmic_gaussian_cutoff":
            raise ValueError(f"unsupported spectral density kind {self.kind!r}")
        if self.gamma < 0 or self.cutoff <= 0:
            raise ValueError("gamma must be >= 0 and cutoff positive")
        if int(self.ohmicity) < 1:
            raise ValueError("ohmicity must be a positive integer")

    def j(self, omega):
        """J(w) for w >= 0 (vectorized)."""
        w = np.asarray(omega, dtype=float)
        x = w / self.cutoff
        return self.gamma * w * x ** (self.ohmicity - 1) * np.exp(-x * x)

    @property
    def omega_support(self) -> float:
        return 8.0 * self.cutoff


def nbar(omega: float, kt: float):
    """Thermal mean occupation ``1 / (exp(w / kT) - 1)``; 0 at ``kT = 0``.

    Rejects ``omega <= 0`` -- the ``w -> 0`` limit is handled inside the
    quadrature weights, not here.
    """
    if np.any(np.asarray(omega) <= 0):
        raise ValueError("nbar requires omega > 0")
    if kt < 0:
        raise ValueError("kT must be >= 0")
    if kt == 0:
        return np.zeros_like(np.asarray(omega, dtype=float)) if np.ndim(omega) else 0.0
    x = np.asarray(omega, dtype=float) / kt
    out = np.zeros_like(x)
    small = x <= 700.0
    out[small] = 1.0 / np.expm1(x[small])
    return out if np.ndim(omega) else float(out)


def _emission_weight(sd: SpectralDensity, kt: float, w: np.ndarray) -> np.ndarray:
    """J(w) (nbar + 1), with the analytic w -> 0 limit below 1e-12 * cutoff."""
    w = np.asarray(w, dtype=float)
    out = np.empty_like(w)
    tiny = w < 1e-12 * sd.cutoff
    out[tiny] = (sd.gamma * kt if sd.ohmicity == 1 else 0.0)
    wr = w[~tiny]
    occ = np.zeros_like(wr)
    if kt > 0:
        x = wr / kt
        ok = x <= 700.0
        occ[ok] = 1.0 / np.expm1(x[ok])
    out[~tiny] = sd.j(wr) * (occ + 1.0)
    return out


def _absorption_weight(sd: SpectralDensity, kt: float, w: np.ndarray) -> np.ndarray:
    """J(w) nbar -> gamma * kT as w -> 0 for the Ohmic (n = 1) family."""
    w = np.asarray(w, dtype=float)
    if kt == 0:
        return np.zeros_like(w)
    out = np.empty_like(w)
    tiny = w < 1e-12 * sd.cutoff
    out[tiny] = (sd.gamma * kt if sd.ohmicity == 1 else 0.0)
    wr = w[~tiny]
    x = wr / kt
    occ = np.zeros_like(wr)
    ok = x <= 700.0
    occ[ok] = 1.0 / np.expm1(x[ok])
    out[~tiny] = sd.j(wr) * occ
    return out


def _gl_panels(a: float, b: float, n_panels: int, order: int = _GL_ORDER):
    x, w = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(a, b, n_panels + 1)
    mid = 0.5 * (edges[:-1] + edges[1:])
    half = 0.5 * (edges[1:] - edges[:-1])
    return (mid[:, None] + half[:, None] * x).ravel(), (half[:, None] * np.broadcast_to(w, (n_panels, order))).ravel()


def _n_panels(sd: SpectralDensity, t_scale: float) -> int:
    # panel width resolves both the cutoff shape and the oscillation exp(-iwt)
    width = min(sd.cutoff / 4.0, 4.0 / max(t_scale, 1e-12))
    return int(np.ceil(sd.omega_support / width))


def _cf_eval(sd, kt, ts, sign, weight_fn, n_panels):
    """sum_i w_i f(w_i) exp(i * sign * w_i * t), chunked over t."""
    nodes, weights = _gl_panels(0.0, sd.omega_support, n_panels)
    f = weight_fn(sd, kt, nodes) * weights
    ts = np.asarray(ts, dtype=float)
    out = np.empty(ts.shape, dtype=complex)
    flat_t = ts.ravel()
    flat_o = out.ravel()
    chunk = max(1, int(2e7 // max(len(nodes), 1)))
    for i in range(0, len(flat_t), chunk):
        ph = np.exp(1j * sign * np.outer(flat_t[i:i + chunk], nodes))
        flat_o[i:i + chunk] = ph @ f
    return out


def _cf_checked(sd, kt, ts, sign, weight_fn, rel_tol):
    """Evaluate with panel-doubling and certify the relative error estimate."""
    ts = np.atleast_1d(np.asarray(ts, dtype=float))
    t_scale = float(np.max(np.abs(ts))) if len(ts) else 1.0
    n0 = _n_panels(sd, t_scale)
    coarse = _cf_eval(sd, kt, ts, sign, weight_fn, n0)
    fine = _cf_eval(sd, kt, ts, sign, weight_fn, 2 * n0)
    scale = max(float(np.max(np.abs(fine))), 1e-300)
    achieved = float(np.max(np.abs(fine - coarse))) / scale
    if achieved > rel_tol:
        raise QuadratureError(
            f"bath correlation quadrature reached relative error {achieved:.3e}"
            f" > requested {rel_tol:.3e}", achieved=achieved)
    return fine


def alpha(t, sd: SpectralDensity, kt: float, rel_tol: float = DEFAULT_REL_TOL):
    """Finite-temperature emission correlation function alpha(t).

    Satisfies ``alpha(-t) == conj(alpha(t))``; at ``kT = 0`` it reduces to
    the zero-temperature form ``int J(w) exp(-i w t) dw``.
    """
    vals = _cf_checked(sd, kt, t, -1, _emission_weight, rel_tol)
    return vals if np.ndim(t) else complex(vals[0])


def beta(t, sd: SpectralDensity, kt: float, rel_tol: float = DEFAULT_REL_TOL):
    """Absorption correlation function beta(t); identically 0 at ``kT = 0``."""
    if kt == 0:
        z = np.zeros(np.shape(t), dtype=complex)
        return z if np.ndim(t) else 0j
    vals = _cf_checked(sd, kt, t, +1, _absorption_weight, rel_tol)
    return vals if np.ndim(t) else complex(vals[0])


def alpha_eff(t, sd: SpectralDensity, kt: float, rel_tol: float = DEFAULT_REL_TOL):
    """Effective correlation function alpha + beta.

    For a Hermitian coupling operator the two thermal correlation functions
    combine into this single kernel (coth * cos - i sin form); its real part
    is even in t and carries all the temperature dependence, its imaginary
    part is odd and temperature independent.
    """
    return alpha(t, sd, kt, rel_tol) + beta(t, sd, kt, rel_tol)


@dataclass(frozen=True)
class BathCorrelationTable:
    """alpha/beta sampled on a uniform grid ``[0, t_max]`` with step ``h``.

    Immutable after construction; shared by the coefficient evaluators.
    ``spectral_density``/``kt`` record provenance when built from a continuum
    bath (used for Markovian long-time limits); tables built from a
    discretized bath carry ``dbath`` instead.
    """

    ts: np.ndarray
    alpha_values: np.ndarray
    beta_values: np.ndarray
    rel_tol: float
    spectral_density: Optional[SpectralDensity] = None
    kt: Optional[float] = None
    dbath: Optional["DiscretizedBath"] = None

    def __post_init__(self):
        ts = np.asarray(self.ts, dtype=float)
        steps = np.diff(ts)
        if len(ts) < 2 or not np.allclose(steps, steps[0], rtol=1e-9, atol=1e-12):
            raise ValueError("time grid must be uniform with at least two nodes")
        if ts[0] != 0.0:
            raise ValueError("time grid must start at 0")
        a0, b0 = self.alpha_values[0], self.beta_values[0]
        scale = max(abs(a0), 1.0)
        if abs(a0.imag) > 1e-10 * scale or a0.real < -1e-12 * scale:
            raise ValueError("alpha(0) must be real and non-negative")
        if abs(b0.imag) > 1e-10 * scale or b0.real < -1e-12 * scale:
            raise ValueError("beta(0) must be real and non-negative")

    @property
    def step(self) -> float:
        return float(self.ts[1] - self.ts[0])

    @property
    def t_max(self) -> float:
        return float(self.ts[-1])


def tabulate(sd: SpectralDensity, kt: float, t_max: float, h: float,
             rel_tol: float = DEFAULT_REL_TOL) -> BathCorrelationTable:
    """Cache alpha/beta on a uniform grid by vectorized quadrature.

    Each node is evaluated directly (no interpolation), so refining ``h``
    leaves shared node values unchanged.
    """
    if t_max <= 0 or h <= 0:
        raise ValueError("t_max and h must be positive")
    n = int(np.ceil(t_max / h))
    ts = np.arange(n + 1) * h
    a = _cf_checked(sd, kt, ts, -1, _emission_weight, rel_tol)
    b = (np.zeros(len(ts), dtype=complex) if kt == 0
         else _cf_checked(sd, kt, ts, +1, _absorption_weight, rel_tol))
    a[0] = a[0].real + 0j
    b[0] = b[0].real + 0j
    return BathCorrelationTable(ts=ts, alpha_values=a, beta_values=b,
                                rel_tol=rel_tol, spectral_density=sd, kt=kt)


@dataclass(frozen=True)
class DiscretizedBath:
    """Finitely many sampled modes ``(w_l, g_l)`` with a Fock cutoff.

    ``g_l**2`` approximates ``J(w_l) * dw`` under the discretization rule, so
    the discrete correlation functions converge to the continuum ones as the
    mode count grows.  ``source`` keeps the parent continuum description when
    built by :func:`discretize`.
    """

    omegas: np.ndarray
    couplings: np.ndarray
    fock_cutoff: int = 1
    source: Optional[SpectralDensity] = None

    def __post_init__(self):
        w = np.asarray(self.omegas, dtype=float)
        g = np.asarray(self.couplings, dtype=float)
        if len(w) < 1 or len(w) != len(g):
            raise ValueError("need at least one mode and matching couplings")
        if np.any(w <= 0) or np.any(g < 0):
            raise ValueError("mode frequencies must be > 0 and couplings >= 0")
        if int(self.fock_cutoff) < 1:
            raise ValueError("fock_cutoff must be >= 1")
        object.__setattr__(self, "omegas", w)
        object.__setattr__(self, "couplings", g)

    @property
    def n_modes(self) -> int:
        return len(self.omegas)

    @property
    def recurrence_time(self) -> float:
        """Trust horizon of the discretization, ~ 2 pi / (mode spacing)."""
        dw = np.min(np.diff(np.sort(self.omegas))) if self.n_modes > 1 else self.omegas[0]
        return 2.0 * np.pi / dw


def discretize(sd: SpectralDensity, n_modes: int, omega_max: Optional[float] = None,
               rule: str = "midpoint", fock_cutoff: int = 1) -> DiscretizedBath:
    """Sample the continuum density into modes with ``g_l**2 = J(w_l) dw``."""
    if n_modes < 1:
        raise ValueError("n_modes must be >= 1")
    if omega_max is None:
        omega_max = sd.omega_support
    if omega_max <= 0:
        raise ValueError("omega_max must be positive")
    if rule != "midpoint":
        raise ValueError(f"unknown discretization rule {rule!r}")
    dw = omega_max / n_modes
    w = (np.arange(n_modes) + 0.5) * dw
    g = np.sqrt(sd.j(w) * dw)
    return DiscretizedBath(omegas=w, couplings=g, fock_cutoff=fock_cutoff, source=sd)


def _mode_occupations(dbath: DiscretizedBath, kt: float) -> np.ndarray:
    if kt == 0:
        return np.zeros(dbath.n_modes)
    return 1.0 / np.expm1(np.minimum(dbath.omegas / kt, 700.0))


def truncated_occupations(dbath: DiscretizedBath, kt: float) -> np.ndarray:
    """Mean occupation of each mode's renormalized ``fock_cutoff``-level Gibbs state.

    Matching these (rather than the untruncated ``nbar``) makes the engine's
    correlation functions consistent with the truncated exact oracle.
    """
    nc = int(dbath.fock_cutoff)
    n = np.arange(nc)
    out = np.empty(dbath.n_modes)
    for i, w in enumerate(dbath.omegas):
        if kt == 0:
            out[i] = 0.0
        else:
            p = np.exp(-n * w / kt)
            out[i] = float(np.dot(n, p) / p.sum())
    return out


def discrete_alpha(dbath: DiscretizedBath, kt: float, t, occupations=None):
    """alpha(t) of the discrete bath: sum_l g_l^2 (nbar_l + 1) exp(-i w_l t)."""
    nb = _mode_occupations(dbath, kt) if occupations is None else np.asarray(occupations)
    t = np.asarray(t, dtype=float)
    ph = np.exp(-1j * np.multiply.outer(t, dbath.omegas))
    vals = ph @ (dbath.couplings ** 2 * (nb + 1.0))
    return vals if t.ndim else complex(vals)


def discrete_beta(dbath: DiscretizedBath, kt: float, t, occupations=None):
    """beta(t) of the discrete bath: sum_l g_l^2 nbar_l exp(+i w_l t)."""
    nb = _mode_occupations(dbath, kt) if occupations is None else np.asarray(occupations)
    t = np.asarray(t, dtype=float)
    ph = np.exp(1j * np.multiply.outer(t, dbath.omegas))
    vals = ph @ (dbath.couplings ** 2 * nb)
    return vals if t.ndim else complex(vals)


def tabulate_discrete(dbath: DiscretizedBath, kt: float, t_max: float, h: float,
                      occupations=None) -> BathCorrelationTable:
    """Correlation table of a discretized bath (exact sums, no quadrature)."""
    if t_max <= 0 or h <= 0:
        raise ValueError("t_max and h must be positive")
    n = int(np.ceil(t_max / h))
    ts = np.arange(n + 1) * h
    a = discrete_alpha(dbath, kt, ts, occupations)
    b = discrete_beta(dbath, kt, ts, occupations)
    a[0] = a[0].real + 0j
    b[0] = b[0].real + 0j
    return BathCorrelationTable(ts=ts, alpha_values=a, beta_values=b,
                                rel_tol=0.0, dbath=dbath, kt=kt)
