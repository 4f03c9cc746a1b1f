"""Fixed-step classic Runge-Kutta integration on staged time grids.

The two-time engines have time-dependent coefficients that are cheap to
evaluate in bulk but slow scalar-by-scalar, so the integrator exposes the
full list of RK4 stage times up front: for a step grid ``t_0 < ... < t_n``
the stage times are ``t_0, t_0 + h/2, t_1, t_1 + h/2, ..., t_n`` (index
``2*i`` is a node, ``2*i + 1`` the midpoint after it).  Right-hand sides
receive the stage index and can look coefficients up in precomputed arrays.
"""

import numpy as np

__all__ = ["stage_times", "rk4_staged", "rk4", "refine_grid", "default_step"]


def stage_times(ts: np.ndarray) -> np.ndarray:
    """Nodes interleaved with step midpoints; length ``2*len(ts) - 1``."""
    ts = np.asarray(ts, dtype=float)
    out = np.empty(2 * len(ts) - 1)
    out[0::2] = ts
    out[1::2] = 0.5 * (ts[:-1] + ts[1:])
    return out


def rk4_staged(f, y0, ts):
    """Integrate ``dy/dt = f(stage_index, y)`` over the fixed grid ``ts``.

    ``f`` is called with stage indices into :func:`stage_times`; ``y`` may be
    a complex array of any shape.  Returns an array of shape
    ``(len(ts),) + y0.shape``.
    """
    ts = np.asarray(ts, dtype=float)
    y = np.array(y0, dtype=complex)
    out = np.empty((len(ts),) + y.shape, dtype=complex)
    out[0] = y
    for i in range(len(ts) - 1):
        h = ts[i + 1] - ts[i]
        k1 = f(2 * i, y)
        k2 = f(2 * i + 1, y + 0.5 * h * k1)
        k3 = f(2 * i + 1, y + 0.5 * h * k2)
        k4 = f(2 * i + 2, y + h * k3)
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        out[i + 1] = y
    return out


def rk4(f, y0, ts):
    """Plain RK4 with ``f(t, y)``; convenience wrapper over the staged form."""
    st = stage_times(np.asarray(ts, dtype=float))
    return rk4_staged(lambda i, y: f(st[i], y), y0, ts)


def refine_grid(ts: np.ndarray, substeps: int) -> np.ndarray:
    """Insert ``substeps - 1`` equidistant points in every interval of ``ts``."""
    ts = np.asarray(ts, dtype=float)
    if substeps <= 1:
        return ts
    parts = [np.linspace(ts[i], ts[i + 1], substeps + 1)[:-1] for i in range(len(ts) - 1)]
    return np.concatenate(parts + [ts[-1:]])


def default_step(max_frequency: float) -> float:
    """Step resolving the fastest coefficient scale: min(0.01, 1/(20 f))."""
    if max_frequency <= 0:
        return 0.01
    return min(0.01, 1.0 / (20.0 * max_frequency))
