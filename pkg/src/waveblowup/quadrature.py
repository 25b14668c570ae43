"""Adaptive quadrature for smooth integrands and inverse-square-root endpoint
singularities.

The error estimate on each panel is the difference between a 10-point and a
21-point Gauss-Legendre rule; the higher-order value is kept. Panels are
subdivided by bisecting the one with the largest current error, in a
deterministic order, so results are bit-reproducible for fixed inputs.

Integrands must accept a 1-D numpy array of nodes and return an array of
values (vectorized contract).
"""

import math
from dataclasses import dataclass

import numpy as np

_XLO, _WLO = np.polynomial.legendre.leggauss(10)
_XHI, _WHI = np.polynomial.legendre.leggauss(21)


@dataclass(frozen=True)
class QuadSpec:
    """Tolerances and work limit for one adaptive integration."""

    rel_tol: float = 1e-9
    abs_tol: float = 1e-12
    max_subdivisions: int = 4000

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise ValueError("rel_tol must be positive")
        if self.abs_tol < 0:
            raise ValueError("abs_tol must be nonnegative")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be >= 1")


DEFAULT_SPEC = QuadSpec()


class QuadratureError(RuntimeError):
    """Raised when the adaptive scheme exhausts its subdivision budget.

    Carries the best available estimate and the residual error bound.
    """

    def __init__(self, message, best_estimate, residual):
        super().__init__(message)
        self.best_estimate = best_estimate
        self.residual = residual


def _panel(h, a, b):
    """High-order estimate and error indicator for one panel [a, b]."""
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    fhi = np.asarray(h(mid + half * _XHI), dtype=float)
    flo = np.asarray(h(mid + half * _XLO), dtype=float)
    hi = half * float(_WHI @ fhi)
    lo = half * float(_WLO @ flo)
    return hi, abs(hi - lo)


def integrate_smooth(h, a, b, spec=DEFAULT_SPEC):
    """Integrate a smooth vectorized integrand h over [a, b] adaptively.

    Returns Q with |Q - integral| <= max(abs_tol, rel_tol * |Q|) for
    integrands resolvable by the scheme; raises QuadratureError otherwise.
    """
    if a > b:
        raise ValueError(f"requires a <= b, got a={a}, b={b}")
    if a == b:
        return 0.0

    est, err = _panel(h, a, b)
    panels = [(a, b, est, err)]
    for _ in range(spec.max_subdivisions):
        total = math.fsum(p[2] for p in panels)
        total_err = math.fsum(p[3] for p in panels)
        if total_err <= max(spec.abs_tol, spec.rel_tol * abs(total)):
            return total
        worst = max(range(len(panels)), key=lambda i: panels[i][3])
        pa, pb, _, _ = panels.pop(worst)
        pm = 0.5 * (pa + pb)
        left = _panel(h, pa, pm)
        right = _panel(h, pm, pb)
        panels.append((pa, pm, left[0], left[1]))
        panels.append((pm, pb, right[0], right[1]))

    total = math.fsum(p[2] for p in panels)
    total_err = math.fsum(p[3] for p in panels)
    if total_err <= max(spec.abs_tol, spec.rel_tol * abs(total)):
        return total
    raise QuadratureError(
        f"no convergence after {spec.max_subdivisions} subdivisions "
        f"(estimate {total:.6e}, residual {total_err:.3e})",
        best_estimate=total,
        residual=total_err,
    )


def integrate_sqrt_singular(h, a, b, spec=DEFAULT_SPEC):
    """Integrate h(x) / sqrt(b - x) over [a, b) with h bounded near b.

    The substitution x = b - s**2 removes the singularity:
        int_a^b h(x) (b-x)^{-1/2} dx = 2 int_0^{sqrt(b-a)} h(b - s^2) ds.
    """
    if not a < b:
        raise ValueError(f"requires a < b, got a={a}, b={b}")

    def transformed(s):
        return h(b - s * s)

    return 2.0 * integrate_smooth(transformed, 0.0, math.sqrt(b - a), spec)
