import math

import numpy as np
import pytest

from waveblowup import certificate
from waveblowup.duhamel import (
    ConeDomain,
    LowerBoundFn,
    agemi_integral_term,
    agemi_rhs,
    check_agemi_on_solution,
    duhamel_L,
    frame_rhs,
    iterate_state,
    verify_induction_step,
)
from waveblowup.freewave import bump_data
from waveblowup.grids import constant_field
from waveblowup.quadrature import QuadSpec
from waveblowup.simulator import SimConfig, run

FAST = QuadSpec(rel_tol=1e-7, abs_tol=1e-12, max_subdivisions=2000)


def test_cone_domain():
    dom = ConeDomain(r=2.0, t=5.0, k=1.0)
    assert dom.nonempty
    empty = ConeDomain(r=2.0, t=2.5, k=1.0)
    assert not empty.nonempty
    with pytest.raises(ValueError):
        empty.require_nonempty()


def test_duhamel_constant_source():
    # u_tt - lap(u) = 1 with zero data has u = t^2 / 2, at every radius
    one = lambda rho, s: np.ones_like(np.asarray(rho, dtype=float))
    for r, t in [(0.0, 1.0), (0.0, 2.0), (1.0, 1.5)]:
        assert duhamel_L(one, r, t, FAST) == pytest.approx(t * t / 2.0, rel=1e-6)


def test_duhamel_linear_in_time_source():
    # u_tt - lap(u) = t has u = t^3 / 6
    src = lambda rho, s: np.full_like(np.asarray(rho, dtype=float), float(s))
    t = 2.0
    assert duhamel_L(src, 0.5, t, FAST) == pytest.approx(t**3 / 6.0, rel=1e-6)


def test_duhamel_grid_source_and_coverage():
    g = constant_field(1.0, r_max=5.0, t_range=(0.0, 3.0))
    assert duhamel_L(g, 1.0, 2.0, FAST) == pytest.approx(2.0, rel=1e-6)
    with pytest.raises(ValueError):
        duhamel_L(g, 4.0, 2.0, FAST)  # backward cone reaches r = 6 > r_max


def test_lowerbound_fn_evaluation():
    w = LowerBoundFn(j=1, M=2.0, log_C=math.log(0.25), a=0.5, b=1.0, l=1.5)
    assert w.beta_min == 3.0
    lam, tau = 10.0, 10.0 + 2.0 * w.beta_min
    x = (tau - lam) / w.beta_min
    expected = 0.25 / math.sqrt(tau + lam) * x**0.5 * math.log(x)
    assert w.value_at(lam, tau) == pytest.approx(expected, rel=1e-12)
    with pytest.raises(ValueError):
        w(np.array([10.0]), np.array([10.0 + 0.5 * w.beta_min]))


def test_iterate_state_matches_certificate():
    st = iterate_state(2, B=0.125, M=2.0, eps=0.01)
    a, b = certificate.exponents(2)
    assert (st.a, st.b) == (a, b)
    assert st.l == certificate.slicer(2)
    assert st.log_C == pytest.approx(
        certificate.amplitude_closed_form(certificate.seed_amplitude(0.125, 0.01), 2),
        abs=1e-12,
    )


def _brute_agemi(w, dom, n=400):
    """Midpoint-rule oracle for the trapezoid integral in characteristic
    variables: beta in [k, t-r], alpha in [2(t-r)+beta, t+r], Jacobian 1/2."""
    r, t, k = dom.r, dom.t, dom.k
    tmr = t - r
    beta_edges = np.linspace(k, tmr, n + 1)
    beta_mid = 0.5 * (beta_edges[1:] + beta_edges[:-1])
    dbeta = np.diff(beta_edges)
    total = 0.0
    for beta, db in zip(beta_mid, dbeta):
        lo, hi = 2.0 * tmr + beta, t + r
        if hi <= lo:
            continue
        alpha_edges = np.linspace(lo, hi, n + 1)
        alpha_mid = 0.5 * (alpha_edges[1:] + alpha_edges[:-1])
        da = np.diff(alpha_edges)
        lam = 0.5 * (alpha_mid - beta)
        tau = 0.5 * (alpha_mid + beta)
        wv = np.asarray(w(lam, tau), dtype=float)
        total += float(np.sum(np.sqrt(lam) * wv * wv * da)) * db
    return 0.5 * total / (2.0 * math.pi * math.sqrt(r))


def test_agemi_integral_vs_brute_force():
    w = lambda lam, tau: np.exp(-np.asarray(lam, dtype=float) / 10.0) * (
        np.asarray(tau, dtype=float) - np.asarray(lam, dtype=float)
    )
    dom = ConeDomain(r=3.0, t=8.0, k=1.0)
    val = agemi_integral_term(w, dom, FAST)
    assert val == pytest.approx(_brute_agemi(w, dom), rel=1e-4)


def test_agemi_integral_empty_trapezoid():
    with pytest.raises(ValueError):
        agemi_integral_term(lambda lam, tau: lam, ConeDomain(r=3.0, t=3.5, k=1.0), FAST)


def test_frame_rhs_constant_closed_form():
    # w = c constant: the double integral has the closed form
    # int_bm^{tmr} (2/3)[(3 tmr - beta)^{3/2} - (2 tmr)^{3/2}] dbeta
    c = 0.7
    r, t, beta_min = 20.0, 26.0, 3.0
    tmr = t - r
    # inner: int_{2tmr+beta}^{3tmr} sqrt(alpha-beta) dalpha
    #      = (2/3)[(3tmr-beta)^{3/2} - (2tmr)^{3/2}], then integrate in beta
    exact = (
        certificate.D_FRAME
        / math.sqrt(t + r)
        * c
        * c
        * (
            (2.0 / 3.0)
            * ((2.0 / 5.0) * ((3.0 * tmr - beta_min) ** 2.5 - (2.0 * tmr) ** 2.5))
            - (2.0 / 3.0) * (2.0 * tmr) ** 1.5 * (tmr - beta_min)
        )
    )
    w = lambda lam, tau: np.full_like(np.asarray(lam, dtype=float), c)
    val = frame_rhs(w, r, t, FAST, beta_min=beta_min)
    assert val == pytest.approx(exact, rel=1e-8)


def test_frame_rhs_preconditions():
    w = iterate_state(1, B=0.125, M=2.0, eps=0.01)
    with pytest.raises(ValueError):
        frame_rhs(w, 100.0, 100.0 + 0.5 * w.beta_min, FAST)  # below the slab
    with pytest.raises(ValueError):
        frame_rhs(w, 2.0, 12.0, FAST)  # t + r < 3 (t - r)


def test_verify_induction_step_first_step():
    c1 = certificate.seed_amplitude(0.125, 0.01)
    m = 2.0
    beta = 1.3 * certificate.slicer(2) * m
    samples = [(r, r + beta) for r in (2.0 * beta, 5.0 * beta, 20.0 * beta)]
    report = verify_induction_step(1, m, c1, samples, FAST)
    assert report.min_slack >= 1.0
    assert len(report.slack) == len(samples)


def test_verify_induction_step_sample_validation():
    c1 = certificate.seed_amplitude(0.125, 0.01)
    with pytest.raises(ValueError):
        verify_induction_step(1, 2.0, c1, [], FAST)
    with pytest.raises(ValueError):
        verify_induction_step(1, 2.0, c1, [(100.0, 101.0)], FAST)  # below next slab
    with pytest.raises(ValueError):
        verify_induction_step(1, 2.0, c1, [(3.0, 12.0)], FAST)  # t - r > r


def test_agemi_holds_on_simulated_solution():
    data = bump_data()
    cfg = SimConfig(h=1.0 / 64.0, r_max=12.0, t_max=10.0)
    res = run(data, 0.2, cfg, snap_every=4)
    assert not res.blew_up
    samples = [(2.0, 4.0), (3.0, 6.0), (4.0, 7.5)]
    violations = check_agemi_on_solution(
        res.grid, data, 0.2, samples, QuadSpec(rel_tol=1e-6, abs_tol=1e-10)
    )
    assert violations == []
    with pytest.raises(ValueError):
        check_agemi_on_solution(res.grid, data, 0.2, [(5.0, 5.5)], FAST)


def test_agemi_rhs_dominated_by_linear_part_for_small_eps():
    data = bump_data()
    dom = ConeDomain(r=3.0, t=6.0, k=1.0)
    zero = lambda lam, tau: np.zeros_like(np.asarray(lam, dtype=float))
    eps = 1e-3
    from waveblowup.freewave import eval_u0

    assert agemi_rhs(data, eps, zero, dom, FAST) == pytest.approx(
        eps * eval_u0(data, 3.0, 6.0, FAST), rel=1e-10
    )
