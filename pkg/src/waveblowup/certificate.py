"""Bookkeeping of the slicing iteration: slicer, exponent and amplitude
sequences, the assembled constants, the blow-up functional and the lifespan
upper bound they certify.

Amplitudes grow double-exponentially, so all amplitude arithmetic is done
in log space.
"""

import math
from dataclasses import dataclass, replace

D_FRAME = 1.0 / (4.0 * math.sqrt(2.0) * math.pi)
E_AMPLITUDE = min(1.0, math.sqrt(2.0) * D_FRAME / 96.0)


@dataclass(frozen=True)
class SliceState:
    """Iteration bookkeeping at index j: slicer l_j and the lower-bound
    amplitude/exponent triple (C_j, a_j, b_j)."""

    j: int
    l: float
    a: float
    b: float
    log_C: float

    @property
    def C(self):
        return math.exp(self.log_C)


@dataclass(frozen=True)
class CertificateConstants:
    D: float
    E: float
    S: float
    B: float
    M: float
    C1: float
    B1: float
    B2: float
    eps0: float


def slicer(j):
    """l_j = sum_{i=0}^{j} 2^{-i} = 2 - 2^{-j}."""
    if j < 0:
        raise ValueError("slicer index must be >= 0")
    return 2.0 - 0.5**j


def exponents(j):
    """Closed forms a_j = 2^j - 3/2, b_j = 2^{j-1}, defined from j = 1."""
    if j < 1:
        raise ValueError("exponent sequences start at j = 1")
    return 2.0**j - 1.5, 2.0 ** (j - 1)


def exponents_by_recursion(j):
    """Same sequences via a_{j+1} = 2 a_j + 3/2, b_{j+1} = 2 b_j."""
    if j < 1:
        raise ValueError("exponent sequences start at j = 1")
    a, b = 0.5, 1.0
    for _ in range(j - 1):
        a = 2.0 * a + 1.5
        b = 2.0 * b
    return a, b


def amplitude_seq(C1, j_max, E=E_AMPLITUDE):
    """log C_j for j = 1..j_max via C_{j+1} = (E / 4^j) C_j^2, in log space."""
    if C1 <= 0:
        raise ValueError("C1 must be positive")
    log_c = [math.log(C1)]
    log_e = math.log(E)
    log4 = math.log(4.0)
    for j in range(1, j_max):
        log_c.append(log_e - j * log4 + 2.0 * log_c[-1])
    return log_c


def amplitude_closed_form(C1, j, E=E_AMPLITUDE):
    """log C_j from the solved product form
    C_{j+1} = E^{2^j - 1} C_1^{2^j} / 4^{j + 2(j-1) + ... + 2^{j-1}}."""
    if j == 1:
        return math.log(C1)
    m = j - 1  # solved form indexed as C_{m+1}
    exp_e = 2.0**m - 1.0
    exp4 = sum((m - i) * 2.0**i for i in range(m))
    return exp_e * math.log(E) + 2.0**m * math.log(C1) - exp4 * math.log(4.0)


def series_S(tol=1e-12, j_cap=200):
    """Limit of the increasing partial sums sum_{m=1}^{j} m * 2^{1-m}.

    Stops when successive partial sums differ by less than tol.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    total = 0.0
    for m in range(1, j_cap + 1):
        term = m * 2.0 ** (1 - m)
        total += term
        if term < tol:
            return total
    raise RuntimeError("series did not converge within the term cap")


def series_S_partial(j):
    """Partial sum sum_{m=1}^{j} m * 2^{1-m}."""
    return math.fsum(m * 2.0 ** (1 - m) for m in range(1, j + 1))


def seed_amplitude(B, eps):
    """C_1 = sqrt(2) D B^2 eps^2 / 9, the first-step amplitude."""
    return math.sqrt(2.0) * D_FRAME * B * B * eps * eps / 9.0


def slice_state(j, B, M, eps, E=E_AMPLITUDE):
    """Full SliceState at index j >= 1 for given (B, M, eps)."""
    a, b = exponents(j)
    log_c = amplitude_seq(seed_amplitude(B, eps), j, E)[-1]
    return SliceState(j=j, l=slicer(j), a=a, b=b, log_C=log_c)


def eps0_from_M(M):
    """eps0 with a(eps0) = (8M)^2, from the defining relation
    a^2 eps^2 log(1+a) = 1 solved explicitly for eps."""
    a0 = (8.0 * M) ** 2
    return 1.0 / math.sqrt(a0 * a0 * math.log1p(a0))


def build_constants(B, M, eps, k=1.0, s_tol=1e-12):
    """Assemble all certificate constants for one (B, M, eps) choice."""
    if B <= 0 or M <= 0 or eps <= 0:
        raise ValueError("B, M, eps must all be positive")
    if M < 2.0 * k:
        raise ValueError(f"M must be >= 2k = {2.0 * k}, got {M}")
    s = series_S(s_tol)
    c1 = seed_amplitude(B, eps)
    b1 = (
        math.sqrt(2.0)
        * D_FRAME
        * B
        * B
        * E_AMPLITUDE
        / (4.0 ** (s / 2.0 + 2.0) * 9.0 * M * M)
    )
    b2 = min(1.0, math.sqrt(b1 / 4.0))
    return CertificateConstants(
        D=D_FRAME,
        E=E_AMPLITUDE,
        S=s,
        B=B,
        M=M,
        C1=c1,
        B1=b1,
        B2=b2,
        eps0=eps0_from_M(M),
    )


def blowup_functional_I(r, t, consts: CertificateConstants):
    """I(r,t) = (E C1 / 4^{S/2}) ((t-r)/(2M))^2 log((t-r)/(2M)).

    Divergence of the iterated lower bounds (hence blow-up) is certified at
    any point of the limit wedge 2M <= t - r <= r where I > 1.
    """
    beta = t - r
    if not (2.0 * consts.M <= beta <= r):
        raise ValueError(f"(r, t) = ({r}, {t}) is outside the limit wedge")
    x = beta / (2.0 * consts.M)
    return consts.E * consts.C1 / 4.0 ** (consts.S / 2.0) * x * x * math.log(x)


def lifespan_upper(eps, consts: CertificateConstants, solve_a=None):
    """Certified lifespan upper bound T_upper = B2^{-1} a(eps), 0 < eps <= eps0.

    Self-checks the concluding chain: at t0 = B2^{-1} a(eps) the blow-up
    functional at (t0/2, t0) must be >= 2 (up to 1e-9).
    """
    if not 0.0 < eps <= consts.eps0:
        raise ValueError(f"eps must lie in (0, eps0 = {consts.eps0:.6g}], got {eps}")
    if solve_a is None:
        from .lifespan import solve_a as _solve
        solve_a = _solve
    a = solve_a(eps)
    t0 = a / consts.B2
    consts_eps = replace(consts, C1=seed_amplitude(consts.B, eps))
    i_val = blowup_functional_I(t0 / 2.0, t0, consts_eps)
    if i_val < 2.0 - 1e-9:
        raise RuntimeError(
            f"certificate chain failed: I(t0/2, t0) = {i_val:.6g} < 2 at eps = {eps}"
        )
    return t0
