"""Fourier spectra of two-time correlator series.

Convention (fixed here because no unique standard exists): the spectrum of a
series ``C(t)`` sampled on a uniform grid ``t in [0, t_max]`` is the one-sided
windowed transform::

    S(w) = Re  int_0^{t_max} dt  exp(i w t) C(t) w(t)

evaluated by direct trapezoid quadrature on the requested (symmetric)
frequency grid.  Feeding the real part of a correlator produces a spectrum
even in ``w`` with mirror peaks at both signs of the oscillation frequency;
feeding the complex series resolves the rotation sense instead.
"""

from dataclasses import dataclass

import numpy as np

__all__ = ["SpectrumResult", "fourier_spectrum", "default_omega_grid", "peak_metrics"]

TAPERS = ("rect", "cos10")


@dataclass(frozen=True)
class SpectrumResult:
    """Real spectrum values on a frequency grid symmetric about zero."""

    omegas: np.ndarray
    values: np.ndarray
    t_max: float
    taper: str

    def __post_init__(self):
        if not np.all(np.isfinite(self.values)):
            raise ValueError("spectrum contains non-finite values")


def default_omega_grid(omega_max: float, step: float = 0.25) -> np.ndarray:
    """Symmetric grid [-omega_max, omega_max] with the given step."""
    n = int(round(omega_max / step))
    return np.arange(-n, n + 1) * step


def _taper_window(ts: np.ndarray, taper: str) -> np.ndarray:
    if taper == "rect":
        return np.ones(len(ts))
    if taper == "cos10":
        # cosine roll-off over the final 10% of the record
        w = np.ones(len(ts))
        t0 = 0.9 * ts[-1]
        tail = ts >= t0
        if ts[-1] > t0:
            w[tail] = 0.5 * (1.0 + np.cos(np.pi * (ts[tail] - t0) / (ts[-1] - t0)))
        return w
    raise ValueError(f"taper must be one of {TAPERS}, got {taper!r}")


def fourier_spectrum(ts, series, omegas, taper: str = "rect") -> SpectrumResult:
    """One-sided windowed transform of a correlator series.

    ``ts`` must be uniform and start at 0 (the series argument is the time
    difference ``t1 - t2``); ``omegas`` must be symmetric about 0.
    """
    ts = np.asarray(ts, dtype=float)
    series = np.asarray(series, dtype=complex)
    omegas = np.asarray(omegas, dtype=float)
    if len(ts) != len(series):
        raise ValueError("time grid and series lengths differ")
    steps = np.diff(ts)
    if len(ts) < 2 or not np.allclose(steps, steps[0], rtol=1e-9, atol=1e-12):
        raise ValueError("time grid must be uniform")
    if abs(ts[0]) > 1e-12:
        raise ValueError("time grid must start at 0")
    if np.max(np.abs(omegas + omegas[::-1])) > 1e-9:
        raise ValueError("frequency grid must be symmetric about 0")

    weights = np.full(len(ts), steps[0])
    weights[0] *= 0.5
    weights[-1] *= 0.5
    f = series * _taper_window(ts, taper) * weights
    vals = np.empty(len(omegas))
    chunk = max(1, int(2e7 // max(len(ts), 1)))
    for i in range(0, len(omegas), chunk):
        ph = np.exp(1j * np.outer(omegas[i:i + chunk], ts))
        vals[i:i + chunk] = (ph @ f).real
    return SpectrumResult(omegas=omegas, values=vals, t_max=float(ts[-1]), taper=taper)


def peak_metrics(result: SpectrumResult, near: float, window: float = 2.0):
    """(location, height, fwhm) of the local maximum closest to ``near``.

    The full width at half maximum is read off by linear interpolation of the
    half-height crossings on each side of the peak.
    """
    w, s = result.omegas, result.values
    sel = np.abs(w - near) <= window
    if not np.any(sel):
        raise ValueError("no grid points near the requested frequency")
    idx = np.nonzero(sel)[0]
    ipk = idx[np.argmax(s[idx])]
    height = s[ipk]
    half = height / 2.0

    i = ipk
    while i > 0 and s[i] > half:
        i -= 1
    left = np.interp(half, [s[i], s[i + 1]], [w[i], w[i + 1]]) if s[i] <= half else w[i]
    i = ipk
    while i < len(s) - 1 and s[i] > half:
        i += 1
    right = np.interp(half, [s[i], s[i - 1]], [w[i], w[i - 1]]) if s[i] <= half else w[i]
    return float(w[ipk]), float(height), float(right - left)
