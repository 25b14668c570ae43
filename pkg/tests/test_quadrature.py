import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from waveblowup.quadrature import (
    DEFAULT_SPEC,
    QuadratureError,
    QuadSpec,
    integrate_smooth,
    integrate_sqrt_singular,
)


def test_spec_validation():
    with pytest.raises(ValueError):
        QuadSpec(rel_tol=0.0)
    with pytest.raises(ValueError):
        QuadSpec(abs_tol=-1.0)
    with pytest.raises(ValueError):
        QuadSpec(max_subdivisions=0)


def test_degenerate_and_reversed_interval():
    assert integrate_smooth(np.sin, 2.0, 2.0) == 0.0
    with pytest.raises(ValueError):
        integrate_smooth(np.sin, 3.0, 2.0)
    with pytest.raises(ValueError):
        integrate_sqrt_singular(np.sin, 2.0, 2.0)


def test_polynomial_exactness():
    # the 10-point panel alone is exact through degree 19
    val = integrate_smooth(lambda x: 7.0 * x**9 - x**4 + 2.0, -1.0, 3.0)
    exact = 7.0 / 10.0 * (3.0**10 - 1.0) - (3.0**5 + 1.0) / 5.0 + 2.0 * 4.0
    assert val == pytest.approx(exact, rel=1e-13)


def test_smooth_oracles():
    assert integrate_smooth(np.sin, 0.0, math.pi) == pytest.approx(2.0, rel=1e-10)
    assert integrate_smooth(np.exp, 0.0, 1.0) == pytest.approx(math.e - 1.0, rel=1e-10)
    # oscillatory integrand forcing real subdivision
    val = integrate_smooth(lambda x: np.sin(40.0 * x), 0.0, 1.0)
    assert val == pytest.approx((1.0 - math.cos(40.0)) / 40.0, rel=1e-8)


def test_narrow_spike_subdivides():
    # Gaussian spike of width 1e-2 inside [0, 1]
    val = integrate_smooth(
        lambda x: np.exp(-(((x - 0.3) / 1e-2) ** 2)), 0.0, 1.0
    )
    assert val == pytest.approx(1e-2 * math.sqrt(math.pi), rel=1e-8)


def test_budget_exhaustion_carries_best_estimate():
    spec = QuadSpec(rel_tol=1e-14, abs_tol=0.0, max_subdivisions=3)
    with pytest.raises(QuadratureError) as exc_info:
        integrate_smooth(lambda x: np.abs(x - 0.123456) ** 0.1, 0.0, 1.0, spec)
    err = exc_info.value
    assert math.isfinite(err.best_estimate)
    assert err.residual > 0


def test_determinism():
    f = lambda x: np.sin(17.0 * x) * np.exp(-x)
    a = integrate_smooth(f, 0.0, 4.0)
    b = integrate_smooth(f, 0.0, 4.0)
    assert a == b  # bit-identical


def _graded_mesh_sqrt(h, a, b, n=10**5):
    """Brute-force oracle for int_a^b h(x)/sqrt(b-x) dx: the substitution
    x = b - s^2 on a uniform midpoint mesh in s."""
    s_edges = np.linspace(0.0, math.sqrt(b - a), n + 1)
    s_mid = 0.5 * (s_edges[1:] + s_edges[:-1])
    ds = np.diff(s_edges)
    return float(np.sum(2.0 * h(b - s_mid**2) * ds))


def test_sqrt_singular_oracles():
    # int_0^1 1/sqrt(1-x) dx = 2
    assert integrate_sqrt_singular(lambda x: np.ones_like(x), 0.0, 1.0) == pytest.approx(
        2.0, rel=1e-12
    )
    # int_0^1 x/sqrt(1-x) dx = 4/3
    assert integrate_sqrt_singular(lambda x: x, 0.0, 1.0) == pytest.approx(
        4.0 / 3.0, rel=1e-12
    )
    for h, a, b in [
        (lambda x: np.cos(x), 0.25, 2.0),
        (lambda x: np.exp(-x) * x, 0.0, 3.0),
        (lambda x: 1.0 / (1.0 + x * x), 0.5, 1.5),
    ]:
        assert integrate_sqrt_singular(h, a, b) == pytest.approx(
            _graded_mesh_sqrt(h, a, b), rel=1e-6
        )


@given(
    c0=st.floats(-3, 3),
    c1=st.floats(-3, 3),
    c2=st.floats(-3, 3),
    a=st.floats(-2, 2),
    width=st.floats(0.1, 4),
)
@settings(max_examples=40, deadline=None)
def test_property_quadratic_exact(c0, c1, c2, a, width):
    b = a + width
    val = integrate_smooth(lambda x: c0 + c1 * x + c2 * x * x, a, b)
    exact = c0 * (b - a) + c1 * (b * b - a * a) / 2.0 + c2 * (b**3 - a**3) / 3.0
    assert val == pytest.approx(exact, rel=1e-10, abs=1e-10)


@given(scale=st.floats(0.1, 5), a=st.floats(0, 2), width=st.floats(0.5, 3))
@settings(max_examples=25, deadline=None)
def test_property_sqrt_singular_linearity(scale, a, width):
    b = a + width
    base = integrate_sqrt_singular(lambda x: np.cos(x), a, b)
    scaled = integrate_sqrt_singular(lambda x: scale * np.cos(x), a, b)
    assert scaled == pytest.approx(scale * base, rel=1e-9, abs=1e-12)


def test_error_contract_holds():
    spec = QuadSpec(rel_tol=1e-9, abs_tol=1e-14)
    val = integrate_smooth(lambda x: np.sqrt(np.abs(np.sin(3 * x)) + 0.1), 0.0, 2.0, spec)
    ref = integrate_smooth(
        lambda x: np.sqrt(np.abs(np.sin(3 * x)) + 0.1), 0.0, 2.0, QuadSpec(rel_tol=1e-12)
    )
    assert abs(val - ref) <= 1e-8 * abs(ref)
