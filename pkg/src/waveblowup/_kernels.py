"""Leapfrog time-stepping kernels for the radial semilinear wave equation.

Two implementations of the same update: a numba @njit loop (default) and a
pure-numpy vectorized path. Selection is per call via the environment
variable WAVEBLOWUP_BACKEND ("numba" or "numpy"); numba silently falls back
to numpy when unavailable. Both paths compute the identical update

    u_next = 2 u - u_prev + dt^2 (lap(u) + nonlin * u |u|^{p-1} + forcing)

with lap(u) = u_rr + u_r / r away from the axis and the regularized value
2 u_rr at r = 0 (Neumann ghost), Dirichlet 0 at the outer edge.
"""

import os

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn

        return wrap(args[0]) if args and callable(args[0]) else wrap


def backend_name():
    env = os.environ.get("WAVEBLOWUP_BACKEND", "numba").strip().lower()
    if env not in ("numba", "numpy"):
        raise ValueError(f"unknown WAVEBLOWUP_BACKEND={env!r}")
    if env == "numba" and not HAVE_NUMBA:
        return "numpy"
    return env


def _advance_py(
    u_prev,
    u_curr,
    h,
    dt,
    p,
    nonlinear,
    forcing,
    n_steps,
    threshold,
    amps,
    snap_every,
    snaps,
    snap_stride_r,
):
    nr = u_curr.shape[0]
    dt2 = dt * dt
    inv_h2 = 1.0 / (h * h)
    u_next = np.empty(nr)
    blow_step = -1
    n = 1
    quadratic = p == 2.0  # avoid pow in the hot loop for the default power
    for n in range(2, n_steps + 1):
        for i in range(1, nr - 1):
            lap = (u_curr[i + 1] - 2.0 * u_curr[i] + u_curr[i - 1]) * inv_h2 + (
                u_curr[i + 1] - u_curr[i - 1]
            ) * inv_h2 / (2.0 * i)
            nl = 0.0
            if nonlinear:
                if quadratic:
                    nl = u_curr[i] * abs(u_curr[i])
                else:
                    nl = u_curr[i] * abs(u_curr[i]) ** (p - 1.0)
            u_next[i] = (
                2.0 * u_curr[i] - u_prev[i] + dt2 * (lap + nl + forcing)
            )
        lap0 = 4.0 * (u_curr[1] - u_curr[0]) * inv_h2
        nl0 = 0.0
        if nonlinear:
            if quadratic:
                nl0 = u_curr[0] * abs(u_curr[0])
            else:
                nl0 = u_curr[0] * abs(u_curr[0]) ** (p - 1.0)
        u_next[0] = 2.0 * u_curr[0] - u_prev[0] + dt2 * (lap0 + nl0 + forcing)
        u_next[nr - 1] = 0.0

        amp = 0.0
        for i in range(nr):
            a = abs(u_next[i])
            if a > amp:
                amp = a
        amps[n] = amp

        u_prev, u_curr, u_next = u_curr, u_next, u_prev

        if n % snap_every == 0:
            row = n // snap_every
            if row < snaps.shape[0]:
                snaps[row, :] = u_curr[::snap_stride_r]

        if not np.isfinite(amp) or amp > threshold:
            blow_step = n
            break
    return blow_step, (n if blow_step >= 0 else n_steps)


if HAVE_NUMBA:
    _advance_nb = njit(cache=True, nogil=True)(_advance_py)


def _advance_np(
    u_prev,
    u_curr,
    h,
    dt,
    p,
    nonlinear,
    forcing,
    n_steps,
    threshold,
    amps,
    snap_every,
    snaps,
    snap_stride_r,
):
    nr = u_curr.shape[0]
    dt2 = dt * dt
    inv_h2 = 1.0 / (h * h)
    idx = np.arange(1, nr - 1, dtype=float)
    u_next = np.empty(nr)
    blow_step = -1
    n = 1
    for n in range(2, n_steps + 1):
        lap = (u_curr[2:] - 2.0 * u_curr[1:-1] + u_curr[:-2]) * inv_h2 + (
            u_curr[2:] - u_curr[:-2]
        ) * inv_h2 / (2.0 * idx)
        if nonlinear:
            if p == 2.0:
                nl = u_curr[1:-1] * np.abs(u_curr[1:-1])
            else:
                nl = u_curr[1:-1] * np.abs(u_curr[1:-1]) ** (p - 1.0)
        else:
            nl = 0.0
        u_next[1:-1] = 2.0 * u_curr[1:-1] - u_prev[1:-1] + dt2 * (lap + nl + forcing)
        lap0 = 4.0 * (u_curr[1] - u_curr[0]) * inv_h2
        if nonlinear:
            nl0 = u_curr[0] * abs(u_curr[0])
            if p != 2.0:
                nl0 = u_curr[0] * abs(u_curr[0]) ** (p - 1.0)
        else:
            nl0 = 0.0
        u_next[0] = 2.0 * u_curr[0] - u_prev[0] + dt2 * (lap0 + nl0 + forcing)
        u_next[-1] = 0.0

        amp = float(np.max(np.abs(u_next)))
        amps[n] = amp

        u_prev, u_curr, u_next = u_curr, u_next, u_prev

        if n % snap_every == 0:
            row = n // snap_every
            if row < snaps.shape[0]:
                snaps[row, :] = u_curr[::snap_stride_r]

        if not np.isfinite(amp) or amp > threshold:
            blow_step = n
            break
    return blow_step, (n if blow_step >= 0 else n_steps)


def advance(*args):
    """Dispatch one full time integration to the selected backend."""
    if backend_name() == "numba":
        return _advance_nb(*args)
    return _advance_np(*args)
