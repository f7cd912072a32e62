import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from zeromodes.radial import (DivergenceError, RadialGrid, RadialProfile, differentiate, erf,
                              integrate_radial, sphere_area)


def prof(name, fn, **kw):
    return RadialProfile.analytic(name, fn, **kw)


@pytest.mark.parametrize("fn, N, expected", [
    (lambda r: np.exp(-r * r), 2, math.pi),
    (lambda r: 4.0 / (1 + r * r) ** 2, 2, 4 * math.pi),
    (lambda r: 8.0 / (1 + r * r) ** 3, 2, 4 * math.pi),
    (lambda r: np.exp(-2 * r) / r, 2, math.pi),
    (lambda r: np.exp(-r * r), 3, math.pi ** 1.5),
    (lambda r: np.exp(-r * r), 1, math.sqrt(math.pi)),
])
def test_known_integrals(fn, N, expected):
    assert integrate_radial(prof("f", fn), N) == pytest.approx(expected, rel=1e-10)


def test_matches_scipy_quad_oracle():
    fn = lambda r: r ** 0.3 * np.exp(-r) / (1 + r)  # noqa: E731
    ref, _ = integrate.quad(lambda r: fn(r) * r, 0, np.inf, epsabs=0, epsrel=1e-13, limit=500)
    assert integrate_radial(fn, 2) == pytest.approx(2 * math.pi * ref, rel=1e-10)


@pytest.mark.parametrize("R", [0.5, 1.0, 3.0])
def test_disk_area(R):
    ind = prof("disk", lambda r: (r <= R).astype(float))
    assert integrate_radial(ind, 2, breakpoints=(R,)) == pytest.approx(math.pi * R * R, rel=1e-10)


def test_sphere_area():
    assert sphere_area(2) == pytest.approx(2 * math.pi)
    assert sphere_area(3) == pytest.approx(4 * math.pi)
    assert sphere_area(1) == pytest.approx(2.0)


def test_never_evaluates_origin():
    def f(r):
        assert np.all(r > 0)
        return np.exp(-r) / r
    assert integrate_radial(f, 2) == pytest.approx(2 * math.pi, rel=1e-10)


def test_cutoffs():
    val = integrate_radial(lambda r: np.ones_like(r), 2, r_min=1.0, r_max=2.0)
    assert val == pytest.approx(3 * math.pi, rel=1e-12)


def test_divergence_reported_with_partial_data():
    with pytest.raises(DivergenceError) as info:
        integrate_radial(lambda r: r ** -2.109, 2, r_max=1.0)
    assert info.value.ratio > 1.0
    assert math.isfinite(info.value.partial_sum)


def test_divergent_tail():
    with pytest.raises(DivergenceError):
        integrate_radial(lambda r: 1.0 / (1 + r * r), 2)


@pytest.mark.parametrize("tol", [1e-15, 1e-3])
def test_tolerance_range(tol):
    with pytest.raises(ValueError):
        integrate_radial(lambda r: np.exp(-r), 2, tol)


@settings(max_examples=25, deadline=None)
@given(a=st.floats(-5, 5), b=st.floats(-5, 5))
def test_linearity(a, b):
    f = lambda r: np.exp(-r * r)  # noqa: E731
    g = lambda r: 1.0 / (1 + r * r) ** 2  # noqa: E731
    tol = 1e-10
    lhs = integrate_radial(lambda r: a * f(r) + b * g(r), 2, tol)
    rhs = a * integrate_radial(f, 2, tol) + b * integrate_radial(g, 2, tol)
    scale = abs(a) * math.pi + abs(b) * math.pi + 1e-300
    assert abs(lhs - rhs) <= 2 * tol * scale


def test_grid_validation():
    with pytest.raises(ValueError):
        RadialGrid(np.linspace(0.1, 1, 15))
    with pytest.raises(ValueError):
        RadialGrid(np.linspace(0.0, 1, 20))
    with pytest.raises(ValueError):
        RadialGrid(np.r_[np.linspace(0.1, 1, 20), 0.5])
    assert RadialGrid.logarithmic(1e-3, 10, 16).count == 16


def test_sampled_profile_one_value_per_node():
    grid = RadialGrid.linear(0.1, 5, 64)
    with pytest.raises(ValueError):
        RadialProfile.sampled(grid, np.ones(63))


def test_sampled_profile_integrates_on_support():
    grid = RadialGrid.linear(0.5, 2.0, 400)
    p = RadialProfile.sampled(grid, np.ones(grid.count))
    assert integrate_radial(p, 2) == pytest.approx(math.pi * (4 - 0.25), rel=1e-9)


R = np.geomspace(0.01, 100, 41)


@pytest.mark.parametrize("fn, order, exact", [
    (lambda r: r * r, 1, lambda r: 2 * r),
    (lambda r: np.log1p(r * r), 1, lambda r: 2 * r / (1 + r * r)),
    (lambda r: np.log1p(r * r), 2, lambda r: 2 * (1 - r * r) / (1 + r * r) ** 2),
    (lambda r: np.exp(-r), 2, lambda r: np.exp(-r)),
])
def test_numerical_derivatives(fn, order, exact):
    d = differentiate(prof("f", fn), order)
    ref = exact(R)
    scale = np.maximum(np.abs(ref), 1e-300)
    mask = np.abs(ref) > 1e-30
    assert np.max(np.abs(d(R) - ref)[mask] / scale[mask]) < 1e-6


def test_derivative_uses_exact_when_carried():
    p = prof("x2", lambda r: r * r, d1=lambda r: 2 * r)
    assert differentiate(p, 1)(3.0) == 6.0


def test_derivative_errors():
    with pytest.raises(ValueError):
        differentiate(prof("f", np.exp), 3)
    coarse = RadialProfile.sampled(RadialGrid.linear(0.1, 1, 20), np.arange(20.0))
    with pytest.raises(ValueError):
        differentiate(coarse, 1)


def test_differentiate_then_integrate():
    f = prof("f", lambda r: np.sin(r) * np.exp(-0.1 * r))
    d = differentiate(f, 1)
    a, b = 0.5, 4.0
    # 1D integral of f' over [a, b] via N = 1 (the factor 2 is the 0-sphere)
    val = integrate_radial(d, 1, r_min=a, r_max=b) / 2.0
    assert val == pytest.approx(float(f(b) - f(a)), abs=1e-6)


@pytest.mark.parametrize("x", [0.0, 1.0, -0.3, 2.5, 6.0])
def test_erf_against_mpmath(x):
    assert abs(erf(x) - float(mpmath.erf(x))) <= 1e-12


def test_erf_oracles():
    assert erf(0.0) == 0.0
    assert erf(1.0) == pytest.approx(0.842700793, abs=1e-9)
    assert abs(erf(6.0) - 1.0) <= 1e-12


def test_profile_algebra():
    f = prof("f", lambda r: r, d1=lambda r: np.ones_like(r))
    g = 2.0 * f + f
    assert g(2.0) == pytest.approx(6.0)
    assert differentiate(g, 1)(2.0) == pytest.approx(3.0)
    assert (f * f)(3.0) == pytest.approx(9.0)
