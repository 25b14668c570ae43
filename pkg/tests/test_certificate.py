import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from waveblowup import certificate as cert
from waveblowup.lifespan import solve_a


def test_frame_and_amplitude_constants():
    assert cert.D_FRAME == pytest.approx(1.0 / (4.0 * math.sqrt(2.0) * math.pi), rel=1e-15)
    # sqrt(2) * D / 96 = 1 / (384 pi) < 1, so the min picks it
    assert cert.E_AMPLITUDE == pytest.approx(1.0 / (384.0 * math.pi), rel=1e-15)


def test_slicer_values_and_monotonicity():
    assert cert.slicer(0) == 1.0
    assert cert.slicer(1) == 1.5
    assert cert.slicer(2) == 1.75
    prev = 0.0
    for j in range(0, 50):  # beyond j ~ 53 the value rounds to exactly 2.0
        l = cert.slicer(j)
        assert prev < l < 2.0
        prev = l
    with pytest.raises(ValueError):
        cert.slicer(-1)


def test_exponents_closed_form_vs_recursion():
    for j in range(1, 41):
        a_c, b_c = cert.exponents(j)
        a_r, b_r = cert.exponents_by_recursion(j)
        assert a_c == a_r
        assert b_c == b_r
    assert cert.exponents(1) == (0.5, 1.0)
    assert cert.exponents(2) == (2.5, 2.0)
    with pytest.raises(ValueError):
        cert.exponents(0)


def test_amplitude_recursion_vs_closed_form():
    c1 = 3.7e-4
    logs = cert.amplitude_seq(c1, 40)
    for j in range(1, 41):
        closed = cert.amplitude_closed_form(c1, j)
        assert logs[j - 1] == pytest.approx(closed, rel=1e-12, abs=1e-12)
    with pytest.raises(ValueError):
        cert.amplitude_seq(0.0, 5)


@given(c1=st.floats(1e-8, 10.0), e=st.floats(1e-4, 1.0))
@settings(max_examples=50, deadline=None)
def test_property_amplitude_recursion_matches_closed_form(c1, e):
    logs = cert.amplitude_seq(c1, 12, E=e)
    for j in (1, 5, 12):
        closed = cert.amplitude_closed_form(c1, j, E=e)
        assert logs[j - 1] == pytest.approx(closed, abs=1e-9)


def test_series_limit():
    # sum_{m>=1} m 2^{1-m} = 4
    assert cert.series_S(1e-12) == pytest.approx(4.0, abs=1e-9)
    partials = [cert.series_S_partial(j) for j in range(1, 81)]
    # strictly increasing until the terms fall below one ulp of the limit
    assert all(b > a for a, b in zip(partials[:50], partials[1:50]))
    assert all(b >= a for a, b in zip(partials, partials[1:]))
    assert partials[-1] == pytest.approx(4.0, abs=1e-9)


def test_seed_amplitude():
    b, eps = 0.125, 0.01
    expected = math.sqrt(2.0) * cert.D_FRAME * b * b * eps * eps / 9.0
    assert cert.seed_amplitude(b, eps) == pytest.approx(expected, rel=1e-15)


def test_eps0_round_trip():
    for m in (2.0, 3.5, 8.0):
        eps0 = cert.eps0_from_M(m)
        assert solve_a(eps0) == pytest.approx((8.0 * m) ** 2, rel=1e-9)


def test_build_constants_structure():
    c = cert.build_constants(B=0.125, M=2.0, eps=1e-3)
    assert c.S == pytest.approx(4.0, abs=1e-9)
    assert 0.0 < c.B2 <= 1.0
    assert c.B2 == pytest.approx(min(1.0, math.sqrt(c.B1 / 4.0)), rel=1e-15)
    # B1 and the seed amplitude are tied: C1 = B1 * (4^{S/2+2} M^2 / E) eps^2
    assert c.C1 == pytest.approx(
        c.B1 * 4.0 ** (c.S / 2.0 + 2.0) * c.M**2 / c.E * 1e-6, rel=1e-9
    )
    with pytest.raises(ValueError):
        cert.build_constants(B=0.0, M=2.0, eps=1e-3)
    with pytest.raises(ValueError):
        cert.build_constants(B=0.1, M=1.0, eps=1e-3, k=1.0)  # M < 2k


def test_blowup_functional_domain():
    c = cert.build_constants(B=0.125, M=2.0, eps=1e-3)
    with pytest.raises(ValueError):
        cert.blowup_functional_I(10.0, 10.0 + 2.0 * c.M - 0.5, c)  # below the wedge
    with pytest.raises(ValueError):
        cert.blowup_functional_I(3.0, 3.0 + 5.0 * c.M, c)  # t - r > r
    # positive beyond x = 1, increasing in t - r
    r = 1e4
    v1 = cert.blowup_functional_I(r, r + 3.0 * c.M, c)
    v2 = cert.blowup_functional_I(r, r + 6.0 * c.M, c)
    assert 0.0 < v1 < v2


def test_lifespan_upper_chain_and_domain():
    c = cert.build_constants(B=0.125, M=2.0, eps=1e-3)
    with pytest.raises(ValueError):
        cert.lifespan_upper(2.0 * c.eps0, c)
    t0 = cert.lifespan_upper(c.eps0, c)
    assert t0 == pytest.approx(solve_a(c.eps0) / c.B2, rel=1e-12)
    # smaller eps: bound grows
    t1 = cert.lifespan_upper(c.eps0 / 4.0, c)
    assert t1 > t0


def test_slice_state_consistency():
    st_ = cert.slice_state(3, B=0.125, M=2.0, eps=1e-3)
    assert st_.j == 3
    assert st_.l == cert.slicer(3)
    a, b = cert.exponents(3)
    assert (st_.a, st_.b) == (a, b)
    assert st_.log_C == pytest.approx(
        cert.amplitude_closed_form(cert.seed_amplitude(0.125, 1e-3), 3), abs=1e-12
    )
