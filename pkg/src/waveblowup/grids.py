"""Space-time grid container with bilinear interpolation."""

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class GridFunction:
    """Values of a function of (r, t) on a uniform grid.

    values[n, i] is the value at (i * dr, t0 + n * dt). Immutable after
    construction; calling the instance interpolates bilinearly.
    """

    values: np.ndarray
    dr: float
    dt: float
    t0: float = 0.0

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 2:
            raise ValueError("values must be a 2-D (time, radius) array")
        object.__setattr__(self, "values", v)

    @property
    def r_max(self):
        return (self.values.shape[1] - 1) * self.dr

    @property
    def t_max(self):
        return self.t0 + (self.values.shape[0] - 1) * self.dt

    def covers(self, r, t):
        return 0.0 <= r <= self.r_max and self.t0 <= t <= self.t_max

    def __call__(self, r, t):
        """Bilinear interpolation; r and t may be scalars or broadcastable
        arrays."""
        r, t = np.broadcast_arrays(np.asarray(r, dtype=float), np.asarray(t, dtype=float))
        eps_r = 1e-12 * (1.0 + self.r_max)
        eps_t = 1e-12 * (1.0 + abs(self.t_max))
        if np.any(r < -eps_r) or np.any(r > self.r_max + eps_r):
            raise ValueError("radius outside the stored grid")
        if np.any(t < self.t0 - eps_t) or np.any(t > self.t_max + eps_t):
            raise ValueError("time outside the stored grid")
        nt, nr = self.values.shape
        x = np.clip(r / self.dr, 0.0, nr - 1.0)
        i0 = np.minimum(x.astype(int), nr - 2)
        wx = x - i0
        y = np.clip((t - self.t0) / self.dt, 0.0, nt - 1.0)
        n0 = np.minimum(y.astype(int), max(nt - 2, 0))
        wy = y - n0
        v = self.values
        n1 = np.minimum(n0 + 1, nt - 1)
        row0 = v[n0, i0] * (1 - wx) + v[n0, i0 + 1] * wx
        row1 = v[n1, i0] * (1 - wx) + v[n1, i0 + 1] * wx
        return row0 * (1 - wy) + row1 * wy

    def max_abs(self):
        return float(np.max(np.abs(self.values)))


def constant_field(value, r_max, t_range, dr=1.0, dt=1.0):
    """GridFunction equal to `value` everywhere on [0, r_max] x t_range."""
    t0, t1 = t_range
    nr = max(int(np.ceil(r_max / dr)) + 1, 2)
    nt = max(int(np.ceil((t1 - t0) / dt)) + 1, 2)
    vals = np.full((nt, nr), float(value))
    return GridFunction(values=vals, dr=r_max / (nr - 1), dt=(t1 - t0) / (nt - 1), t0=t0)
