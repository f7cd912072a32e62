import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from zeromodes.modes import (NoSquareIntegrableModeError, ac_construct, family_historical,
                             family_power, family_step, l2_of, normalize, rescale)
from zeromodes.radial import RadialProfile, differentiate, integrate_radial

R = np.geomspace(0.01, 100, 57)


def stokes_flux(B, r, bps=()):
    return np.array([integrate_radial(B, 2, r_max=x, breakpoints=[b for b in bps if b < x])
                     for x in r]) / (2 * math.pi)


def test_historical_closed_forms(historical):
    assert l2_of(historical) == pytest.approx(1.0, abs=1e-12)
    assert historical.flux == 2.0
    assert historical.a(1.0) == pytest.approx(1.0)
    assert historical.f(0.0) == pytest.approx(1 / math.sqrt(math.pi))
    assert historical.normalized


def test_historical_stokes(historical):
    lhs = R * historical.a(R)
    assert np.max(np.abs(lhs - stokes_flux(historical.B, R))) < 1e-8


def test_ac_round_trip_historical(historical):
    B = RadialProfile.analytic("B", lambda r: 4.0 / (1 + r * r) ** 2)
    mode = ac_construct(B)
    assert mode.flux == pytest.approx(2.0, rel=1e-12)
    for got, ref in ((mode.f, historical.f), (mode.a, historical.a)):
        assert np.max(np.abs(got(R) / ref(R) - 1)) < 1e-8


def test_ac_round_trip_step():
    b = 2.82
    B = RadialProfile.analytic("B", lambda r: np.where(r <= 1, b, 0.0), breakpoints=(1.0,))
    mode = ac_construct(B, normalize_mode=False)
    ref = family_step(b, normalize_mode=False)
    assert mode.flux == pytest.approx(b / 2, rel=1e-12)
    assert np.max(np.abs(mode.a(R) / ref.a(R) - 1)) < 1e-8
    assert np.max(np.abs(mode.f(R) / ref.f(R) - 1)) < 1e-8


def test_ac_round_trip_power():
    al, be = 1.5, 1.2
    ref = family_power(al, be, normalize_mode=False)
    mode = ac_construct(ref.B, normalize_mode=False)
    assert mode.flux == pytest.approx(al * be, rel=1e-8)
    assert np.max(np.abs(mode.f(R) / ref.f(R) - 1)) < 1e-8


def test_ac_potential_solves_poisson():
    B = RadialProfile.analytic("B", lambda r: 3.0 / (1 + r * r) ** 1.5)
    mode = ac_construct(B)
    r = np.geomspace(0.01, 100, 21)
    lap = differentiate(mode.phi, 2)(r) + mode.a(r) / r
    assert np.max(np.abs(lap / B(r) - 1)) < 1e-6


def test_ac_rejects_small_flux():
    with pytest.raises(NoSquareIntegrableModeError):
        ac_construct(RadialProfile.analytic("0", lambda r: np.zeros_like(r)))
    with pytest.raises(NoSquareIntegrableModeError):
        ac_construct(RadialProfile.analytic("B", lambda r: 1.0 / (1 + r * r) ** 2))


def test_power_family():
    m = family_power(2.77, 0.594)
    assert m.flux == pytest.approx(1.64538, abs=1e-12)
    assert l2_of(m) == pytest.approx(1.0, abs=1e-9)
    hist = family_power(1.0, 2.0)
    assert np.max(np.abs(hist.f(R) / family_historical().f(R) - 1)) < 1e-9
    assert np.max(np.abs(hist.B(R) / family_historical().B(R) - 1)) < 1e-12
    with pytest.raises(ValueError):
        family_power(1.0, 0.5)
    with pytest.raises(ValueError):
        family_power(-1.0, -3.0)


def test_step_family():
    m = family_step(2.82)
    assert m.a(2.0) == pytest.approx(0.705)
    m4 = family_step(4.0)
    eps = 1e-12
    assert m4.f(1 - eps) == pytest.approx(m4.f(1 + eps), rel=1e-9)
    assert m4.f(1.0) == pytest.approx(math.exp(-1) * m4.norm)
    assert m4.flux == 2.0
    with pytest.raises(ValueError):
        family_step(2.0)


@pytest.mark.parametrize("b", [2.5, 2.82, 4.0])
def test_step_stokes(b):
    m = family_step(b)
    r = np.array([0.3, 0.9, 1.5, 7.0])
    assert np.max(np.abs(r * m.a(r) - stokes_flux(m.B, r, (1.0,)))) < 1e-8


def test_normalize_idempotent():
    m = family_step(3.3, normalize_mode=False)
    once = normalize(m)
    twice = normalize(once)
    assert l2_of(once) == pytest.approx(1.0, abs=1e-12)
    assert twice.norm == pytest.approx(once.norm, rel=1e-12)


def test_rescale_identity(historical):
    assert rescale(historical, 1) is historical


@settings(max_examples=15, deadline=None)
@given(n=st.floats(0.05, 50))
def test_rescale_preserves_norm_and_flux(n):
    m = rescale(family_historical(), n)
    assert l2_of(m) == pytest.approx(1.0, abs=1e-9)
    flux = integrate_radial(m.B, 2) / (2 * math.pi)
    assert flux == pytest.approx(2.0, abs=1e-10)
    assert m.flux == 2.0
    r = np.array([0.1, 1.0, 3.0])
    assert np.allclose(m.f(r), n * family_historical().f(n * r))
    assert np.allclose(m.a(r), n * family_historical().a(n * r))


def test_rescale_moves_breakpoints():
    m = rescale(family_step(3.0), 2.0)
    assert m.breakpoints == (0.5,)
    assert l2_of(m) == pytest.approx(1.0, abs=1e-10)


def test_rescaled_mode_still_zero_mode():
    # f'(r) = -a(r) f(r) is the radial form of the Dirac-Weyl equation
    m = rescale(family_historical(), 3.0)
    r = np.geomspace(0.01, 10, 11)
    df = differentiate(m.f, 1)(r)
    assert np.max(np.abs(df + m.a(r) * m.f(r))) < 1e-8
