"""Lifespan scale a(eps), exponent formulas, eps-sweep orchestration and
scaling-law fits against the observed numerical blow-up times."""

import math
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import List

import numpy as np

from .freewave import RadialData
from .simulator import SimConfig, detect_blowup, run


def solve_a(eps: float, tol: float = 1e-13) -> float:
    """Unique a > 0 with a^2 eps^2 log(1+a) = 1, by safeguarded Newton.

    The left side is continuous and strictly increasing from 0 to infinity,
    so the bracket [0, 1/eps^2 + 2] always contains the root.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    e2 = eps * eps

    def F(a):
        return a * a * e2 * math.log1p(a) - 1.0

    lo, hi = 0.0, 1.0 / e2 + 2.0
    a = min(1.0 / eps, hi)  # decent starting scale
    for _ in range(200):
        f = F(a)
        if abs(f) < tol:
            return a
        if f > 0:
            hi = a
        else:
            lo = a
        df = 2.0 * a * e2 * math.log1p(a) + a * a * e2 / (1.0 + a)
        step = a - f / df if df > 0 else math.nan
        if not (lo < step < hi):
            step = 0.5 * (lo + hi)  # bisection safeguard
        a = step
    raise RuntimeError(f"a(eps) iteration did not reach tol={tol} for eps={eps}")


def gamma(n: int, p: float) -> float:
    """gamma(n, p) = 1 + (n+1)/2 * p - (n-1)/2 * p^2."""
    return 1.0 + 0.5 * (n + 1) * p - 0.5 * (n - 1) * p * p


def strauss_exponent(n: int) -> float:
    """p0(n) = (n + 1 + sqrt(n^2 + 10n - 7)) / (2(n-1)), the positive root
    of gamma(n, p) = 0."""
    if n < 2:
        raise ValueError("defined for n >= 2")
    return (n + 1 + math.sqrt(n * n + 10.0 * n - 7.0)) / (2.0 * (n - 1))


@dataclass(frozen=True)
class ScalingModel:
    """Lifespan model family. kind is one of "a_eps", "power", "exponential";
    for "power" the prediction is eps^{-exponent}."""

    kind: str
    exponent: float = 0.0

    def __call__(self, eps):
        if self.kind == "a_eps":
            return solve_a(eps)
        if self.kind == "power":
            return eps ** (-self.exponent)
        if self.kind == "exponential":
            return math.exp(eps ** (-self.exponent))
        raise ValueError(f"unknown model kind {self.kind!r}")

    def describe(self):
        if self.kind == "a_eps":
            return "a(eps)"
        if self.kind == "power":
            return f"eps^-{self.exponent:g}"
        return f"exp(C*eps^-{self.exponent:g})"


def predicted_lifespan_model(n: int, p: float, moment_is_zero: bool) -> ScalingModel:
    """Model family for T(eps) in the tabulated blow-up regimes."""
    p0 = strauss_exponent(n) if n >= 2 else None
    if n == 2 and p == 2:
        if moment_is_zero:
            return ScalingModel(kind="power", exponent=1.0)
        return ScalingModel(kind="a_eps")
    if n >= 2 and p == p0:
        return ScalingModel(kind="exponential", exponent=p * (p - 1.0))
    if n == 2 and 1.0 < p < 2.0 and not moment_is_zero:
        return ScalingModel(kind="power", exponent=(p - 1.0) / (3.0 - p))
    if n >= 1 and 1.0 < p and (p0 is None or p < p0):
        g = gamma(n, p)
        if g <= 0:
            raise ValueError(f"no model: gamma({n}, {p}) = {g} <= 0")
        return ScalingModel(kind="power", exponent=p * (p - 1.0) / g)
    raise ValueError(f"no model for (n, p) = ({n}, {p})")


@dataclass
class LifespanRecord:
    eps: float
    T_num: float
    h_used: float
    grid_agreement: float
    refined: bool
    support_ok: bool


def _single_lifespan(data, eps, cfg, snap_every):
    # keep the stored field to ~2000 radial columns; the lifespan comes from
    # the amplitude history and the cone check tolerates decimation
    nr = int(round(cfg.r_max / cfg.h)) + 1
    stride = max(1, nr // 2048)
    res = run(data, eps, cfg, snap_every=snap_every, snap_stride_r=stride)
    if not res.blew_up:
        return None, res
    est = detect_blowup(res.times, res.amps, cfg.blowup_threshold)
    return est, res


def sweep(
    data: RadialData,
    eps_list,
    cfg: SimConfig,
    agreement_tol: float = 0.02,
    check_cone: bool = True,
) -> List[LifespanRecord]:
    """Numerical lifespans over a decreasing eps grid, two-grid validated.

    Each eps is run at cfg.h and cfg.h / 2; a record is accepted only when
    the two blow-up times agree to agreement_tol. Points where t_max is
    reached without blow-up are skipped with a warning.

    The independent (eps, grid) runs are dispatched to a thread pool (the
    stepping kernel releases the GIL); results are folded deterministically
    in eps order. Worker count comes from WAVEBLOWUP_WORKERS (default: the
    CPU count, capped at the number of runs).
    """
    from .simulator import check_support

    eps_seen = []
    for e in eps_list:
        if e not in eps_seen:
            eps_seen.append(e)

    cfg_fine = replace(cfg, h=cfg.h / 2.0)
    workers = int(os.environ.get("WAVEBLOWUP_WORKERS", os.cpu_count() or 1))
    workers = max(1, min(workers, 2 * len(eps_seen)))
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = {
            (eps, which): pool.submit(_single_lifespan, data, eps, c, None)
            for eps in eps_seen
            for which, c in (("coarse", cfg), ("fine", cfg_fine))
        }
        results = {key: fut.result() for key, fut in futures.items()}

    records = []
    for eps in eps_seen:
        est_c, res_c = results[(eps, "coarse")]
        if est_c is None:
            warnings.warn(f"eps={eps}: no blow-up before t_max={cfg.t_max}, skipped")
            continue
        est_f, res_f = results[(eps, "fine")]
        if est_f is None:
            warnings.warn(f"eps={eps}: fine grid reached t_max without blow-up, skipped")
            continue
        gap = abs(est_c.t - est_f.t) / est_f.t
        if gap > agreement_tol:
            warnings.warn(
                f"eps={eps}: grids disagree ({gap:.3%} > {agreement_tol:.0%}), skipped"
            )
            continue
        support_ok = check_support(res_c.grid, data.k) if check_cone else True
        records.append(
            LifespanRecord(
                eps=eps,
                T_num=est_f.t,
                h_used=cfg_fine.h,
                grid_agreement=gap,
                refined=est_f.refined,
                support_ok=support_ok,
            )
        )
    if not records:
        raise RuntimeError("sweep produced no accepted records")
    return records


@dataclass
class ScalingFit:
    model: ScalingModel
    prefactor: float
    dispersion: float
    ratios: np.ndarray


def fit_scaling(records: List[LifespanRecord], model: ScalingModel) -> ScalingFit:
    """Flatness fit of T_num against a model: geometric-mean prefactor of
    the ratios T_num / model(eps) and their relative spread
    (max - min) / mean."""
    if len(records) < 3:
        raise ValueError("need at least 3 accepted records")
    ratios = np.array([rec.T_num / model(rec.eps) for rec in records])
    prefactor = float(np.exp(np.mean(np.log(ratios))))
    dispersion = float((ratios.max() - ratios.min()) / ratios.mean())
    return ScalingFit(model=model, prefactor=prefactor, dispersion=dispersion, ratios=ratios)


def geometric_eps_grid(eps_hi: float, eps_lo: float, factor: float = math.sqrt(2.0)):
    """Decreasing geometric grid from eps_hi down to eps_lo."""
    if not 0 < eps_lo < eps_hi:
        raise ValueError("need 0 < eps_lo < eps_hi")
    out = []
    e = eps_hi
    while e >= eps_lo * (1 - 1e-12):
        out.append(e)
        e /= factor
    return out
