"""Duhamel operator, the Agemi spherical-mean inequality over the light-cone
trapezoid, and the numerical validation of the slicing iteration steps.

Conventions: points are (r, t); characteristic variables are
alpha = tau + lambda, beta = tau - lambda with Jacobian d(lambda,tau) =
(1/2) d(alpha,beta). The trapezoid behind (r, t) is

    T_{r,t} = {(lambda, tau) : t - r <= lambda, tau + lambda <= t + r,
               k <= tau - lambda <= t - r}

i.e. beta in [k, t - r], alpha in [2(t-r) + beta, t + r].
"""

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import certificate
from .freewave import RadialData, eval_u0
from .quadrature import DEFAULT_SPEC, QuadSpec, integrate_smooth, integrate_sqrt_singular


@dataclass(frozen=True)
class ConeDomain:
    """The trapezoid T_{r,t}; nonempty iff t - r >= k."""

    r: float
    t: float
    k: float

    @property
    def nonempty(self):
        return self.t - self.r >= self.k

    def require_nonempty(self):
        if not self.nonempty:
            raise ValueError(
                f"T_(r,t) is empty: t - r = {self.t - self.r} < k = {self.k}"
            )


@dataclass(frozen=True)
class LowerBoundFn:
    """Iterated lower bound
    w_j(r, t) = C_j (t+r)^{-1/2} ((t-r)/(l_j M))^{a_j} (log((t-r)/(l_j M)))^{b_j},
    valid on the slab t - r >= l_j * M. Stored via log_C for large j.
    """

    j: int
    M: float
    log_C: float
    a: float
    b: float
    l: float

    @property
    def beta_min(self):
        return self.l * self.M

    def __call__(self, lam, tau):
        """Evaluate as a function of (lambda, tau); vectorized."""
        lam = np.asarray(lam, dtype=float)
        tau = np.asarray(tau, dtype=float)
        x = (tau - lam) / self.beta_min
        if np.any(x < 1.0 - 1e-12):
            raise ValueError("evaluation below the slab t - r >= l_j M")
        x = np.maximum(x, 1.0)
        logw = (
            self.log_C
            - 0.5 * np.log(tau + lam)
            + self.a * np.log(x)
        )
        val = np.exp(logw) * np.log(x) ** self.b
        return val

    def value_at(self, r, t):
        return float(self(np.array([r]), np.array([t]))[0])


def iterate_state(j, B, M, eps):
    """LowerBoundFn for iteration index j >= 1 built from (B, M, eps)."""
    st = certificate.slice_state(j, B, M, eps)
    return LowerBoundFn(j=j, M=M, log_C=st.log_C, a=st.a, b=st.b, l=st.l)


def _angular_mean(v, s, r, rho, spec):
    """int_0^{2pi} v(sqrt(r^2 + rho^2 + 2 r rho cos th), s) dth."""
    if r * rho == 0.0:
        return 2.0 * math.pi * float(np.asarray(v(np.array([r + rho]), s))[0])

    def integrand(th):
        d2 = r * r + rho * rho + 2.0 * r * rho * np.cos(th)
        return v(np.sqrt(np.maximum(d2, 0.0)), s)

    return 2.0 * integrate_smooth(integrand, 0.0, math.pi, spec)


def duhamel_L(v, r, t, spec: QuadSpec = DEFAULT_SPEC):
    """Duhamel term at |x| = r for a radial source v(radius, time):

        (1/2pi) int_0^t ds int_{|x-y| <= t-s} v(|y|, s)
                ((t-s)^2 - |x-y|^2)^{-1/2} dy,

    reduced to nested 1-D quadratures. v may be a GridFunction (must cover
    radii up to r + t and times [0, t]) or any vectorized callable.
    """
    if hasattr(v, "covers"):
        if not (v.covers(r + t, 0.0) and v.covers(0.0, t)):
            raise ValueError("grid does not cover the backward cone")

    def s_integrand(s_arr):
        out = np.empty_like(s_arr)
        for idx, s in enumerate(s_arr):
            tp = t - s
            if tp <= 0.0:
                out[idx] = 0.0
                continue

            def rho_part(rho_arr):
                vals = np.empty_like(rho_arr)
                for m, rho in enumerate(rho_arr):
                    vals[m] = (
                        rho
                        * _angular_mean(v, s, r, rho, spec)
                        / math.sqrt(tp + rho)
                    )
                return vals

            out[idx] = integrate_sqrt_singular(rho_part, 0.0, tp, spec)
        return out

    return integrate_smooth(s_integrand, 0.0, t, spec) / (2.0 * math.pi)


def agemi_integral_term(w, dom: ConeDomain, spec: QuadSpec = DEFAULT_SPEC):
    """(1/(2 pi sqrt r)) iint_{T_{r,t}} sqrt(lambda) w(lambda, tau)^2,
    computed in characteristic variables."""
    dom.require_nonempty()
    r, t, k = dom.r, dom.t, dom.k
    tmr = t - r

    def beta_integrand(beta_arr):
        out = np.empty_like(beta_arr)
        for i, beta in enumerate(beta_arr):
            lo, hi = 2.0 * tmr + beta, t + r
            if hi <= lo:
                out[i] = 0.0
                continue

            def alpha_integrand(alpha):
                lam = 0.5 * (alpha - beta)
                tau = 0.5 * (alpha + beta)
                wv = np.asarray(w(lam, tau), dtype=float)
                return np.sqrt(lam) * wv * wv

            out[i] = integrate_smooth(alpha_integrand, lo, hi, spec)
        return out

    # Jacobian 1/2 from (lambda, tau) -> (alpha, beta)
    dbl = 0.5 * integrate_smooth(beta_integrand, k, tmr, spec)
    return dbl / (2.0 * math.pi * math.sqrt(r))


def agemi_rhs(
    data: RadialData,
    eps: float,
    w,
    dom: ConeDomain,
    spec: QuadSpec = DEFAULT_SPEC,
):
    """Right side of the basic spherical-mean inequality:
    eps * u0(r, t) + the T_{r,t} integral term for the candidate bound w."""
    dom.require_nonempty()
    return eps * eval_u0(data, dom.r, dom.t, spec) + agemi_integral_term(w, dom, spec)


def frame_rhs(w, r, t, spec: QuadSpec = DEFAULT_SPEC, beta_min=None):
    """Right side of the iteration frame:

        (D / sqrt(t+r)) int_{beta_min}^{t-r} dbeta
            int_{2(t-r)+beta}^{3(t-r)} sqrt(alpha-beta) w(lambda, tau)^2 dalpha

    with D = (4 sqrt(2) pi)^{-1}. beta_min defaults to w.beta_min (= l_j M).
    Requires (r, t) in the slab t - r >= beta_min; the derivation also uses
    t + r >= 3 (t - r), which is enforced.
    """
    if beta_min is None:
        beta_min = w.beta_min
    tmr = t - r
    if tmr < beta_min:
        raise ValueError(f"(r, t) outside the slab: t - r = {tmr} < {beta_min}")
    if t + r < 3.0 * tmr - 1e-12 * (t + r):
        raise ValueError("frame requires t + r >= 3(t - r)")

    def beta_integrand(beta_arr):
        out = np.empty_like(beta_arr)
        for i, beta in enumerate(beta_arr):
            lo, hi = 2.0 * tmr + beta, 3.0 * tmr
            if hi <= lo:
                out[i] = 0.0
                continue

            def alpha_integrand(alpha):
                lam = 0.5 * (alpha - beta)
                tau = 0.5 * (alpha + beta)
                wv = np.asarray(w(lam, tau), dtype=float)
                return np.sqrt(alpha - beta) * wv * wv

            out[i] = integrate_smooth(alpha_integrand, lo, hi, spec)
        return out

    outer = integrate_smooth(beta_integrand, beta_min, tmr, spec)
    return certificate.D_FRAME / math.sqrt(t + r) * outer


@dataclass
class InductionReport:
    j: int
    samples: list
    lhs: list
    rhs: list
    slack: list

    @property
    def min_slack(self):
        return min(self.slack)


def verify_induction_step(j, M, C1, samples, spec: QuadSpec = DEFAULT_SPEC):
    """Check one induction step of the iteration numerically.

    For each sample (r, t) in the next slab Sigma_{j+1}, evaluates the frame
    with the current bound w_j inserted and compares against the next bound
    w_{j+1}; reports the slack ratio frame / w_{j+1} per sample.

    The frame is quadratic in the amplitude C_j while the next bound carries
    C_{j+1} = (E / 4^j) C_j^2, so the slack ratio does not depend on C1. The
    computation therefore runs with w_j normalized to unit amplitude and the
    next bound carrying only the recursion factor E / 4^j — this keeps every
    intermediate representable even though the true C_j underflow
    double-exponentially. lhs and rhs are reported in the same normalization
    (divided by C_j^2).
    """
    if C1 <= 0:
        raise ValueError("C1 must be positive")
    a_j, b_j = certificate.exponents(j)
    a_n, b_n = certificate.exponents(j + 1)
    log_factor = math.log(certificate.E_AMPLITUDE) - j * math.log(4.0)
    w_j = LowerBoundFn(j=j, M=M, log_C=0.0, a=a_j, b=b_j, l=certificate.slicer(j))
    w_n = LowerBoundFn(
        j=j + 1, M=M, log_C=log_factor, a=a_n, b=b_n, l=certificate.slicer(j + 1)
    )

    samples = list(samples)
    if not samples:
        raise ValueError("sample set is empty")
    for r, t in samples:
        if t - r <= w_n.beta_min:
            raise ValueError(
                f"sample ({r}, {t}) is not strictly inside Sigma_{j + 1}"
            )
        if t - r > r:
            raise ValueError(f"sample ({r}, {t}) violates t - r <= r")

    lhs, rhs, slack = [], [], []
    for r, t in samples:
        left = frame_rhs(w_j, r, t, spec)
        right = w_n.value_at(r, t)
        lhs.append(left)
        rhs.append(right)
        slack.append(left / right)
    return InductionReport(j=j, samples=samples, lhs=lhs, rhs=rhs, slack=slack)


@dataclass
class AgemiViolation:
    r: float
    t: float
    lhs: float
    rhs: float
    deficit: float


def check_agemi_on_solution(u, data: RadialData, eps, samples, spec=DEFAULT_SPEC):
    """Assert the basic inequality u >= eps*u0 + cone integral of u^2 on a
    simulator field, up to the discrete tolerance 5*h*(1 + max|u|).

    u is a GridFunction holding a (not yet blown up) run. Returns the list
    of violations; empty means the inequality held at every sample.
    """
    tol = 5.0 * u.dr * (1.0 + u.max_abs())
    violations = []
    for r, t in samples:
        if not (data.k <= t - r <= r):
            raise ValueError(f"sample ({r}, {t}) outside k <= t - r <= r")
        dom = ConeDomain(r=r, t=t, k=data.k)
        rhs = agemi_rhs(data, eps, u, dom, spec)
        lhs = float(u(np.array([r]), t)[0])
        if lhs < rhs - tol:
            violations.append(
                AgemiViolation(r=r, t=t, lhs=lhs, rhs=rhs, deficit=rhs - tol - lhs)
            )
    return violations
