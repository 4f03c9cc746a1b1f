"""Time-dependent decay and memory coefficients.

For a Bohr frequency ``w`` the four kernels driving the evolution equations
are (all with ``s``-substituted integrands)::

    Gamma1(t)      = int_0^t  ds alpha(s) exp(+i w s)
    Gamma2(t)      = int_0^t  ds beta(s)  exp(-i w s)
    Gamma3(t1, t2) = int_0^t2 d tau alpha(t1 - tau) exp(+i w (t2 - tau))
    Gamma4(t1, t2) = int_0^t2 d tau beta(t1 - tau)  exp(-i w (t2 - tau))

Substituting ``u = t1 - tau`` shows that the two-argument kernels reduce
exactly to antiderivative differences of the one-argument integrands::

    Gamma3(t1, t2) = exp(-i w (t1 - t2)) * (F(t1) - F(t1 - t2))
    Gamma4(t1, t2) = exp(+i w (t1 - t2)) * (G(t1) - G(t1 - t2))

with ``F = Gamma1`` and ``G = Gamma2``.  One cubic interpolant of the cached
bath table per frequency therefore serves all four kernels with O(h^4)
accuracy; the boundary identities ``Gamma3(t, t) = Gamma1(t)`` and
``Gamma4(t, t) = Gamma2(t)`` hold exactly by construction.
"""

from typing import Optional, Sequence

import numpy as np
from scipy.integrate import quad
from scipy.interpolate import CubicSpline

from .bath import BathCorrelationTable, SpectralDensity, _absorption_weight, _emission_weight

__all__ = ["GammaSet", "FrozenGammaSet", "PlateauNotReachedError",
           "markovian_limits", "DEFAULT_PLATEAU_TOL"]

# The Ohmic/Gaussian-cutoff correlation functions approach their long-time
# limits only algebraically (1/t thermal tails, |Gamma(t) - Gamma_inf| ~
# gamma kT / (w t)), so plateau consistency is checked at a tolerance that
# flags truly unconverged tables (O(1) relative error) without rejecting
# the intrinsic tail.
DEFAULT_PLATEAU_TOL = 2e-2


class PlateauNotReachedError(RuntimeError):
    """Raised when the coefficient table shows no Markovian plateau."""

    def __init__(self, message, trend=None):
        super().__init__(message)
        self.trend = trend


class GammaSet:
    """Evaluators for Gamma1/Gamma2 (and the memory kernels) per Bohr frequency.

    Parameters
    ----------
    table:
        Cached bath correlation functions on ``[0, t_max]``.
    frequencies:
        Bohr frequencies to prepare evaluators for.  More can be added later
        with :meth:`ensure_frequency` (not thread-safe while growing).

    Node arrays ``gamma1_values``/``gamma2_values`` for the first frequency
    are exposed for inspection; ``gamma1_values[0] == 0`` and at ``kT = 0``
    the whole ``gamma2`` table vanishes.
    """

    def __init__(self, table: BathCorrelationTable, frequencies: Sequence[float]):
        self.table = table
        self._f = {}
        self._g = {}
        for w in frequencies:
            self.ensure_frequency(w)
        if not self._f:
            raise ValueError("at least one Bohr frequency is required")
        self.frequencies = list(self._f)

    def ensure_frequency(self, omega: float) -> float:
        w = float(omega)
        if w not in self._f:
            ts = self.table.ts
            self._f[w] = CubicSpline(ts, self.table.alpha_values * np.exp(1j * w * ts)).antiderivative()
            self._g[w] = CubicSpline(ts, self.table.beta_values * np.exp(-1j * w * ts)).antiderivative()
        return w

    @property
    def primary_frequency(self) -> float:
        return next(iter(self._f))

    @property
    def gamma1_values(self) -> np.ndarray:
        return self._f[self.primary_frequency](self.table.ts)

    @property
    def gamma2_values(self) -> np.ndarray:
        return self._g[self.primary_frequency](self.table.ts)

    def _check_range(self, t, what: str):
        t = np.asarray(t)
        tmin, tmax = float(np.min(t)), float(np.max(t))
        if tmin < -1e-12 or tmax > self.table.t_max * (1 + 1e-12) + 1e-12:
            raise ValueError(
                f"{what} time {tmin if tmin < 0 else tmax:g} outside tabulated"
                f" range [0, {self.table.t_max:g}]")

    def _key(self, omega: Optional[float]) -> float:
        if omega is None:
            return self.primary_frequency
        w = float(omega)
        if w not in self._f:
            raise KeyError(f"frequency {w} not prepared; call ensure_frequency first")
        return w

    def gamma1(self, t, omega: Optional[float] = None):
        self._check_range(t, "gamma1")
        return self._f[self._key(omega)](t)

    def gamma2(self, t, omega: Optional[float] = None):
        self._check_range(t, "gamma2")
        return self._g[self._key(omega)](t)

    def gamma3(self, t1, t2, omega: Optional[float] = None):
        """Memory kernel over [0, t2]; requires ``t1 >= t2 >= 0``."""
        t1a, t2a = np.asarray(t1, dtype=float), np.asarray(t2, dtype=float)
        if np.any(t2a < -1e-12) or np.any(t1a - t2a < -1e-9):
            raise ValueError("gamma3/gamma4 require t1 >= t2 >= 0")
        self._check_range(t1, "gamma3")
        w = self._key(omega)
        f = self._f[w]
        d = t1a - t2a
        return np.exp(-1j * w * d) * (f(t1a) - f(d))

    def gamma4(self, t1, t2, omega: Optional[float] = None):
        t1a, t2a = np.asarray(t1, dtype=float), np.asarray(t2, dtype=float)
        if np.any(t2a < -1e-12) or np.any(t1a - t2a < -1e-9):
            raise ValueError("gamma3/gamma4 require t1 >= t2 >= 0")
        self._check_range(t1, "gamma4")
        w = self._key(omega)
        g = self._g[w]
        d = t1a - t2a
        return np.exp(1j * w * d) * (g(t1a) - g(d))

    def markovian_limits(self, omega: Optional[float] = None,
                         plateau_tol: float = DEFAULT_PLATEAU_TOL):
        """Long-time values (Gamma1_inf, Gamma2_inf); see :func:`markovian_limits`."""
        w = self._key(omega)
        sd, kt = self._provenance()
        g1_inf, g2_inf = markovian_limits(sd, kt, w)
        tm = self.table.t_max
        trend = (abs(complex(self.gamma1(tm, w)) - g1_inf),
                 abs(complex(self.gamma2(tm, w)) - g2_inf))
        scale = max(abs(g1_inf), abs(g2_inf), 1e-30)
        if max(trend) > plateau_tol * scale:
            raise PlateauNotReachedError(
                f"table end values differ from the long-time limits by {trend}"
                f" (relative tolerance {plateau_tol:g}); extend t_max",
                trend=trend)
        return g1_inf, g2_inf

    def frozen(self, plateau_tol: float = DEFAULT_PLATEAU_TOL) -> "FrozenGammaSet":
        """Markovian counterpart: constant plateau Gamma1/Gamma2, zero memory."""
        limits = {w: self.markovian_limits(w, plateau_tol) for w in self._f}
        return FrozenGammaSet(limits, self.table)

    def _provenance(self):
        t = self.table
        if t.spectral_density is not None:
            return t.spectral_density, t.kt
        if t.dbath is not None and t.dbath.source is not None:
            return t.dbath.source, t.kt
        raise PlateauNotReachedError(
            "table carries no continuum spectral density; Markovian long-time"
            " limits are undefined for a bare discrete-mode table")


class FrozenGammaSet:
    """Gamma evaluators frozen at their Markovian long-time values.

    ``gamma1``/``gamma2`` are constants, the memory kernels vanish -- the
    delta-correlated-bath idealization used by the Markov-QRT mode.
    """

    def __init__(self, limits: dict, table: BathCorrelationTable):
        self._limits = {float(w): (complex(a), complex(b)) for w, (a, b) in limits.items()}
        self.table = table
        self.frequencies = list(self._limits)

    def _key(self, omega):
        w = self.frequencies[0] if omega is None else float(omega)
        if w not in self._limits:
            raise KeyError(f"frequency {w} not prepared")
        return w

    def _const(self, t, value):
        t = np.asarray(t, dtype=float)
        return np.full(t.shape, value) if t.ndim else value

    def gamma1(self, t, omega=None):
        return self._const(t, self._limits[self._key(omega)][0])

    def gamma2(self, t, omega=None):
        return self._const(t, self._limits[self._key(omega)][1])

    def gamma3(self, t1, t2, omega=None):
        self._key(omega)
        return self._const(t1, 0j)

    def gamma4(self, t1, t2, omega=None):
        self._key(omega)
        return self._const(t1, 0j)

    def ensure_frequency(self, omega: float) -> float:
        return self._key(omega)


def markovian_limits(sd: SpectralDensity, kt: float, omega: float):
    """Exact long-time limits from the frequency domain.

    For ``w > 0``::

        Gamma1_inf = pi J(w)(nbar(w)+1) + i PV int dw' J(nbar+1) / (w - w')
        Gamma2_inf = pi J(w) nbar(w)    - i PV int dw' J nbar    / (w - w')

    For ``w < 0`` the pole leaves the integration range and the delta term
    drops.  ``w = 0`` is only defined at ``kT = 0`` (the thermal integrand is
    finite at the origin, making the zero-frequency limit log-divergent).
    """
    w = float(omega)
    support = sd.omega_support

    def fa(x):
        return float(_emission_weight(sd, kt, np.atleast_1d(x))[0])

    def fb(x):
        return float(_absorption_weight(sd, kt, np.atleast_1d(x))[0])

    if w > 0:
        pa = quad(fa, 0.0, support, weight="cauchy", wvar=w, limit=800)[0]
        pb = quad(fb, 0.0, support, weight="cauchy", wvar=w, limit=800)[0]
        g1 = np.pi * fa(w) - 1j * pa
        g2 = np.pi * fb(w) + 1j * pb
    elif w < 0:
        pa = quad(lambda x: fa(x) / (w - x), 0.0, support, limit=800)[0]
        pb = quad(lambda x: fb(x) / (w - x), 0.0, support, limit=800)[0]
        g1 = 1j * pa
        g2 = -1j * pb
    else:
        if kt != 0:
            raise PlateauNotReachedError(
                "zero-frequency Markovian limit diverges at finite temperature"
                " for an Ohmic bath (1/t correlation tail)")
        pa = quad(lambda x: fa(x) / max(x, 1e-300), 0.0, support, limit=800)[0]
        g1 = -1j * pa
        g2 = 0j
    return complex(g1), complex(g2)
