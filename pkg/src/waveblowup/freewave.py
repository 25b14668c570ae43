"""Free-wave solution for radial data via the 2D Poisson formula, plus the
point-wise linear estimates that seed the blow-up iteration.

All data are radial with compact support in {r <= k}, so the spherical mean
of u^0 coincides with u^0(r, t) and every estimate below is a point
statement.
"""

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .quadrature import (
    DEFAULT_SPEC,
    QuadSpec,
    integrate_smooth,
    integrate_sqrt_singular,
)


@dataclass
class RadialData:
    """Compactly supported radial initial data (f, g) with support radius k.

    f is the initial displacement profile (may be None for identically
    zero), g the initial speed profile. Both must vanish for r >= k.
    moment is 2*pi * int_0^k g(r) r dr, the quantity whose sign selects
    the lifespan law.
    """

    k: float
    g: Callable[[np.ndarray], np.ndarray]
    f: Optional[Callable[[np.ndarray], np.ndarray]] = None
    moment: float = field(default=None)
    name: str = "custom"
    _u0_cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"support radius k must be >= 1, got {self.k}")
        if self.moment is None:
            self.moment = g_moment(self.g, self.k)


def g_moment(g, k, spec=DEFAULT_SPEC):
    """2*pi * int_0^k g(r) r dr."""
    return 2.0 * math.pi * integrate_smooth(lambda r: g(r) * r, 0.0, k, spec)


def bump_data(k=1.0, amplitude=1.0):
    """Default positive-moment family: f = 0, g = A*(1 - (r/k)^2)^3 on r < k.

    g is C^2 at r = k and has moment A * pi * k^2 / 4.
    """

    def g(r):
        r = np.asarray(r, dtype=float)
        s = np.clip(r / k, 0.0, 1.0)
        return amplitude * (1.0 - s * s) ** 3

    moment = amplitude * math.pi * k * k / 4.0
    return RadialData(k=k, g=g, moment=moment, name=f"bump(k={k},A={amplitude})")


def zero_moment_data(k=1.0, amplitude=1.0):
    """Moment-free variant: g = A*(1 - (r/k)^2)^3 * (1 - 5*(r/k)^2).

    The factor 5 makes int_0^1 (1-s^2)^3 (1 - c s^2) s ds vanish exactly
    (1/8 - c/40 = 0 at c = 5).
    """

    def g(r):
        r = np.asarray(r, dtype=float)
        s = np.clip(r / k, 0.0, 1.0)
        return amplitude * (1.0 - s * s) ** 3 * (1.0 - 5.0 * s * s)

    return RadialData(k=k, g=g, moment=0.0, name=f"zero_moment(k={k},A={amplitude})")


def _angular_mean(profile, k, r, rho, spec):
    """int_0^{2pi} profile(sqrt(r^2 + rho^2 - 2 r rho cos(th))) dth for a
    profile supported in [0, k].

    Uses the symmetry about th = pi and restricts to the angular window
    where the argument actually enters the support; at r = 0 or rho = 0
    the integrand is constant.
    """
    if r * rho == 0.0:
        return 2.0 * math.pi * float(profile(np.array([abs(r - rho)]))[0])

    # distance <= k iff cos(th) >= (r^2 + rho^2 - k^2) / (2 r rho)
    c_min = (r * r + rho * rho - k * k) / (2.0 * r * rho)
    if c_min >= 1.0:
        return 0.0
    th_max = math.pi if c_min <= -1.0 else math.acos(c_min)

    def integrand(th):
        d2 = r * r + rho * rho - 2.0 * r * rho * np.cos(th)
        return profile(np.sqrt(np.maximum(d2, 0.0)))

    return 2.0 * integrate_smooth(integrand, 0.0, th_max, spec)


def _poisson_g_part(profile, k, r, t, spec):
    """(1/2pi) int_{|y|<=t} profile(|x+y|) / sqrt(t^2-|y|^2) dy at |x| = r.

    The rho-integration is restricted to the support band [r-k, r+k]; the
    sqrt singularity at rho = t is only active when the band reaches it.
    """
    lo = max(0.0, r - k)
    hi = min(t, r + k)
    if hi <= lo:
        return 0.0

    def band(rho_arr, weight):
        out = np.empty_like(rho_arr)
        for i, rho in enumerate(rho_arr):
            out[i] = rho * _angular_mean(profile, k, r, rho, spec) * weight(rho)
        return out

    if hi < t:
        def integrand(rho_arr):
            return band(rho_arr, lambda rho: 1.0 / math.sqrt(t * t - rho * rho))

        val = integrate_smooth(integrand, lo, hi, spec)
    else:
        # singular endpoint: split 1/sqrt(t^2-rho^2) = (t+rho)^{-1/2} (t-rho)^{-1/2}
        def integrand(rho_arr):
            return band(rho_arr, lambda rho: 1.0 / math.sqrt(t + rho))

        val = integrate_sqrt_singular(integrand, lo, hi, spec)
    return val / (2.0 * math.pi)


def eval_u0(data: RadialData, r: float, t: float, spec: QuadSpec = DEFAULT_SPEC):
    """Free-wave solution u^0(r, t) for the data (f, g), without the eps factor.

    g-part by the 2D Poisson formula; f-part as the time derivative of the
    analogous integral, computed by central differencing with step
    delta = 1e-4 * (t + k). Returns 0 outside the support cone r > t + k.
    """
    if r < 0 or t < 0:
        raise ValueError("eval_u0 requires r >= 0 and t >= 0")
    key = (r, t, spec.rel_tol, spec.abs_tol)
    cached = data._u0_cache.get(key)
    if cached is not None:
        return cached

    if r > t + data.k:
        data._u0_cache[key] = 0.0
        return 0.0
    if t == 0.0:
        val = float(data.f(np.array([r]))[0]) if data.f is not None else 0.0
        data._u0_cache[key] = val
        return val

    val = _poisson_g_part(data.g, data.k, r, t, spec)
    if data.f is not None:
        delta = 1e-4 * (t + data.k)
        if t >= delta:
            fp = _poisson_g_part(data.f, data.k, r, t + delta, spec)
            fm = _poisson_g_part(data.f, data.k, r, t - delta, spec)
            val += (fp - fm) / (2.0 * delta)
        else:
            f0 = _poisson_g_part(data.f, data.k, r, t, spec)
            fp = _poisson_g_part(data.f, data.k, r, t + delta, spec)
            val += (fp - f0) / delta

    data._u0_cache[key] = val
    return val


@dataclass
class LinearFit:
    """Fitted constants for the two-sided linear decay estimate.

    The estimate reads
        |u^0 - D1 * moment * (t+r+2k)^{-1/2} (t-r+2k)^{-1/2}|
            <= D2 * (t+r+2k)^{-1/2} (t-r+2k)^{-3/2}
    on the sample set. max_violation <= 0 certifies it there.
    """

    D1: float
    D2: float
    max_violation: float
    sample_count: int
    d1_sigma: float


def _leading_shape(r, t, k):
    return 1.0 / (math.sqrt(t + r + 2 * k) * math.sqrt(t - r + 2 * k))


def _remainder_shape(r, t, k):
    return 1.0 / (math.sqrt(t + r + 2 * k) * (t - r + 2 * k) ** 1.5)


def fit_linear_constants(data: RadialData, samples, spec: QuadSpec = DEFAULT_SPEC):
    """Fit (D1, D2) certifying the linear decay estimate on the samples.

    samples: iterable of (r, t) pairs inside the support cone r <= t + k.
    D1 is set by least squares on the samples in the top quartile of t - r
    (where the leading term dominates); D2 is then the smallest constant
    bounding every residual, inflated by 1 + 1e-12 so max_violation <= 0
    holds by construction when the shape fits.
    """
    samples = [(float(r), float(t)) for r, t in samples]
    if not samples:
        raise ValueError("sample set is empty")
    if len({s for s in samples}) == 1:
        raise ValueError("degenerate sample set: all samples identical")

    k = data.k
    u = np.array([eval_u0(data, r, t, spec) for r, t in samples])
    shape = np.array([_leading_shape(r, t, k) for r, t in samples])
    tmr = np.array([t - r for r, t in samples])

    far = tmr >= np.quantile(tmr, 0.75)
    if far.sum() < 2:
        raise ValueError("degenerate sample set: no spread in t - r")
    # coefficient of u0 against the bare shape; D1 is per unit moment
    beta = float(u[far] @ shape[far] / (shape[far] @ shape[far]))
    resid_far = u[far] - beta * shape[far]
    dof = max(int(far.sum()) - 1, 1)
    sigma = math.sqrt(float(resid_far @ resid_far) / dof / float(shape[far] @ shape[far]))
    d1 = beta / data.moment if data.moment != 0.0 else beta

    resid = u - beta * shape
    bshape = np.array([_remainder_shape(r, t, k) for r, t in samples])
    d2 = float(np.max(np.abs(resid) / bshape)) * (1.0 + 1e-12)
    max_violation = float(np.max(np.abs(resid) - d2 * bshape))
    return LinearFit(
        D1=d1,
        D2=d2,
        max_violation=max_violation,
        sample_count=len(samples),
        d1_sigma=sigma,
    )


def lowerbound_samples(k, m, n_beta=64, n_r=64, beta_max_factor=40.0, r_max_factor=4.0):
    """Log-spaced (r, t) sample grid inside the wedge m <= t - r <= r.

    beta = t - r runs over [m, beta_max_factor * k]; for each beta, r runs
    over [beta, r_max_factor * beta_max_factor * k].
    """
    beta_max = beta_max_factor * k
    if m >= beta_max:
        raise ValueError("M exceeds the sample range")
    betas = np.geomspace(m, beta_max, n_beta)
    r_hi = r_max_factor * beta_max
    out = []
    for beta in betas:
        for r in np.geomspace(beta, r_hi, n_r):
            out.append((float(r), float(r + beta)))
    return out


def find_lowerbound_constants(
    data: RadialData,
    m_grid=None,
    spec: QuadSpec = DEFAULT_SPEC,
    n_beta=64,
    n_r=64,
    beta_max_factor=40.0,
):
    """Certify u^0(r,t) * sqrt(t+r) * sqrt(t-r) >= B on M <= t - r <= r.

    Scans M over m_grid (default {2k, 2.5k, ..., 16k}), smallest first, and
    returns the first (B, M) with B > 0, B being the exhaustive minimum of
    the scaled solution over the sample grid. Requires positive moment.
    """
    if data.moment <= 0:
        raise ValueError("lower-bound constants require positive moment")
    k = data.k
    if m_grid is None:
        m_grid = [2.0 * k + 0.5 * k * i for i in range(29)]  # 2k .. 16k

    master = lowerbound_samples(k, min(m_grid), n_beta, n_r, beta_max_factor)
    scaled = {}
    for r, t in master:
        u = eval_u0(data, r, t, spec)
        scaled[(r, t)] = u * math.sqrt(t + r) * math.sqrt(t - r)

    for m in sorted(m_grid):
        vals = [v for (r, t), v in scaled.items() if t - r >= m]
        if not vals:
            continue
        b = min(vals)
        if b > 0:
            return b, m
    raise ValueError("no certifiable (B, M) on the search grid")
