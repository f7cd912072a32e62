"""Radial zero modes of the two-dimensional Dirac-Weyl operator.

A radial field ``B(r)`` generates the potential ``phi`` with
``Delta phi = B``, i.e. ``phi'(r) = (1/r) int_0^r B(s) s ds``.  The vector
potential is tangential, ``A = a(r) e_theta`` with ``a = phi'``, and the
spinor ``psi = (0, C exp(-phi))`` solves ``sigma.(p + A) psi = 0``.  It is
square integrable exactly when the flux ``(1/2pi) int B`` exceeds 1.
"""

from __future__ import annotations

import math
from collections.abc import Iterable
from dataclasses import dataclass, replace

import numpy as np

from .radial import DEFAULT_TOL, RadialProfile, integrate_radial

# Nodes of the cumulative grid in t = log r used by ac_construct.
_T_START = math.log(1e-10)
_T_STOP = math.log(1e30)
_T_STEP = 0.05
_GL_X, _GL_W = np.polynomial.legendre.leggauss(10)


class NoSquareIntegrableModeError(ValueError):
    """The field's flux is too small for a square-integrable zero mode."""


@dataclass(frozen=True)
class ZeroMode:
    """Radial zero mode ``psi = (0, f)``, ``A = a e_theta``, ``B``.

    ``f = norm * exp(-phi)``.  ``breakpoints`` are radii where ``B`` jumps.
    """

    f: RadialProfile
    a: RadialProfile
    B: RadialProfile
    phi: RadialProfile
    flux: float
    norm: float
    normalized: bool
    label: str
    params: dict
    breakpoints: tuple[float, ...] = ()

    def with_norm(self, norm: float, normalized: bool) -> ZeroMode:
        phi = self.phi
        f = RadialProfile.analytic(
            f"{self.label}.f", lambda r: norm * np.exp(-phi(r)),
            d1=lambda r: -norm * self.a(r) * np.exp(-phi(r)),
            breakpoints=self.breakpoints)
        return replace(self, f=f, norm=norm, normalized=normalized)


def l2_of(mode: ZeroMode, tol: float = DEFAULT_TOL) -> float:
    f = mode.f
    return integrate_radial(lambda r: f(r) ** 2, 2, tol, breakpoints=mode.breakpoints)


def normalize(mode: ZeroMode, tol: float = DEFAULT_TOL) -> ZeroMode:
    """Rescale the amplitude so that ``int |psi|^2 = 1``."""
    return mode.with_norm(mode.norm / math.sqrt(l2_of(mode, tol)), True)


def _check_flux(flux: float) -> None:
    if not flux > 1.0:
        raise NoSquareIntegrableModeError(
            f"flux {flux:.6g} <= 1: no square-integrable zero mode with P = 1")


class _StokesPotential:
    """Cumulative ``r a(r) = int_0^r B s ds`` and ``phi = int_0^r a``.

    Both are tabulated on a fine grid in ``t = log r`` by Gauss-Legendre
    quadrature per cell; queries add the partial cell exactly, so no
    interpolation error is introduced.
    """

    def __init__(self, B: RadialProfile, breakpoints: Iterable[float], tol: float):
        self.B = B
        t = np.arange(_T_START, _T_STOP + _T_STEP, _T_STEP)
        cuts = [math.log(b) for b in breakpoints if _T_START < math.log(b) < _T_STOP]
        t = np.unique(np.concatenate([t, cuts]))
        self.t = t
        r0 = math.exp(t[0])
        m0 = integrate_radial(B, 2, tol, r_max=r0) / (2.0 * math.pi)

        lo, hi = t[:-1], t[1:]
        dm, inner = self._cell(lo, hi)
        self.m = np.concatenate([[m0], m0 + np.cumsum(dm)])
        a = self.m / np.exp(t)
        # a ~ r^kappa below the first node fixes phi(r0).
        self.kappa = math.log(a[1] / a[0]) / (t[1] - t[0]) if a[0] > 0 and a[1] > 0 else 1.0
        phi0 = a[0] * r0 / (self.kappa + 1.0)
        dphi = self.m[:-1] * (hi - lo) + inner
        self.phi = np.concatenate([[phi0], phi0 + np.cumsum(dphi)])

    def _integrand(self, t):
        return np.asarray(self.B(np.exp(t)), dtype=float) * np.exp(2.0 * t)

    def _cell(self, lo, hi):
        """Per cell: ``int B s ds`` and ``int (int_lo^tau B s ds) dtau``."""
        half = 0.5 * (hi - lo)
        mid = 0.5 * (hi + lo)
        tau = mid[:, None] + half[:, None] * _GL_X[None, :]
        dm = half * (self._integrand(tau) @ _GL_W)
        # inner integrals from lo to each tau
        ih = 0.5 * (tau - lo[:, None])
        im = 0.5 * (tau + lo[:, None])
        s = im[..., None] + ih[..., None] * _GL_X
        partial = ih * (self._integrand(s) @ _GL_W)
        inner = half * (partial @ _GL_W)
        return dm, inner

    def evaluate(self, r):
        """Return ``(m, phi)`` at radii ``r``."""
        r = np.asarray(r, dtype=float)
        shape = r.shape
        t = np.log(np.ravel(r))
        m = np.empty_like(t)
        phi = np.empty_like(t)
        below = t < self.t[0]
        above = t >= self.t[-1]
        mid = ~(below | above)
        if np.any(mid):
            tm = t[mid]
            k = np.clip(np.searchsorted(self.t, tm, side="right") - 1, 0, self.t.size - 2)
            lo = self.t[k]
            dm, inner = self._cell(lo, tm)
            m[mid] = self.m[k] + dm
            phi[mid] = self.phi[k] + self.m[k] * (tm - lo) + inner
        if np.any(below):
            x = np.exp(t[below] - self.t[0])
            m[below] = self.m[0] * x ** (self.kappa + 1.0)
            phi[below] = self.phi[0] * x ** (self.kappa + 1.0)
        if np.any(above):
            m[above] = self.m[-1]
            phi[above] = self.phi[-1] + self.m[-1] * (t[above] - self.t[-1])
        return m.reshape(shape), phi.reshape(shape)


def ac_construct(
    B: RadialProfile,
    normalize_mode: bool = True,
    tol: float = DEFAULT_TOL,
    breakpoints: Iterable[float] = (),
) -> ZeroMode:
    """Aharonov-Casher zero mode (polynomial factor 1) for a radial field.

    Raises:
        NoSquareIntegrableModeError: flux <= 1.
        DivergenceError: the flux integral diverges.
    """
    bps = tuple(sorted(set(breakpoints) | set(B.breakpoints)))
    flux = integrate_radial(B, 2, tol, breakpoints=bps) / (2.0 * math.pi)
    _check_flux(flux)
    pot = _StokesPotential(B, bps, tol)

    def a(r):
        r = np.asarray(r, dtype=float)
        return pot.evaluate(r)[0] / r

    def phi(r):
        return pot.evaluate(r)[1]

    mode = ZeroMode(
        f=RadialProfile.analytic("ac.f", lambda r: np.exp(-phi(r))),
        a=RadialProfile.analytic("ac.a", a, breakpoints=bps),
        B=B,
        phi=RadialProfile.analytic("ac.phi", phi, d1=a, breakpoints=bps),
        flux=flux, norm=1.0, normalized=False, label=f"ac[{B.name}]",
        params=dict(B.params), breakpoints=bps,
    ).with_norm(1.0, False)
    return normalize(mode, tol) if normalize_mode else mode


def family_historical() -> ZeroMode:
    """The 2D reduction of the Loss-Yau mode: f = 1/(sqrt(pi)(1 + r^2))."""
    c = 1.0 / math.sqrt(math.pi)
    return ZeroMode(
        f=RadialProfile.analytic(
            "historical.f", lambda r: c / (1.0 + r * r),
            d1=lambda r: -2.0 * c * r / (1.0 + r * r) ** 2,
            d2=lambda r: c * (6.0 * r * r - 2.0) / (1.0 + r * r) ** 3),
        a=RadialProfile.analytic(
            "historical.a", lambda r: 2.0 * r / (1.0 + r * r),
            d1=lambda r: 2.0 * (1.0 - r * r) / (1.0 + r * r) ** 2),
        B=RadialProfile.analytic(
            "historical.B", lambda r: 4.0 / (1.0 + r * r) ** 2,
            d1=lambda r: -16.0 * r / (1.0 + r * r) ** 3),
        phi=RadialProfile.analytic(
            "historical.phi", lambda r: np.log1p(r * r),
            d1=lambda r: 2.0 * r / (1.0 + r * r),
            d2=lambda r: 2.0 * (1.0 - r * r) / (1.0 + r * r) ** 2),
        flux=2.0, norm=c, normalized=True, label="historical", params={},
    )


def family_power(alpha: float, beta: float, normalize_mode: bool = True,
                 tol: float = DEFAULT_TOL) -> ZeroMode:
    """Modes ``f = C (1 + r^beta)^(-alpha)`` with ``phi = alpha log(1 + r^beta)``.

    Then ``a = alpha beta r^(beta-1) / (1 + r^beta)`` and
    ``B = alpha beta^2 r^(beta-2) / (1 + r^beta)^2``; the flux is ``alpha beta``.
    """
    if alpha <= 0 or beta <= 0:
        raise ValueError("alpha and beta must be positive")
    flux = alpha * beta
    _check_flux(flux)

    def a(r):
        rb = r ** beta
        return alpha * beta * rb / (r * (1.0 + rb))

    mode = ZeroMode(
        f=RadialProfile.analytic("power.f", lambda r: (1.0 + r ** beta) ** -alpha),
        a=RadialProfile.analytic("power.a", a),
        B=RadialProfile.analytic(
            "power.B",
            lambda r: alpha * beta ** 2 * r ** (beta - 2.0) / (1.0 + r ** beta) ** 2),
        phi=RadialProfile.analytic("power.phi", lambda r: alpha * np.log1p(r ** beta), d1=a),
        flux=flux, norm=1.0, normalized=False, label="power",
        params={"alpha": alpha, "beta": beta},
    ).with_norm(1.0, False)
    return normalize(mode, tol) if normalize_mode else mode


def family_step(b: float, normalize_mode: bool = True, tol: float = DEFAULT_TOL) -> ZeroMode:
    """Constant field ``b`` on the unit disk, zero outside (``b > 2``)."""
    if not b > 2.0:
        raise NoSquareIntegrableModeError("step field needs b > 2 (flux b/2 > 1)")
    inside = lambda r: r <= 1.0  # noqa: E731

    def phi(r):
        r = np.asarray(r, dtype=float)
        with np.errstate(divide="ignore"):
            return np.where(inside(r), b * r * r / 4.0, b / 4.0 + 0.5 * b * np.log(r))

    def a(r):
        r = np.asarray(r, dtype=float)
        with np.errstate(divide="ignore"):
            return np.where(inside(r), 0.5 * b * r, 0.5 * b / r)

    mode = ZeroMode(
        f=RadialProfile.analytic("step.f", lambda r: np.exp(-phi(r))),
        a=RadialProfile.analytic("step.a", a, breakpoints=(1.0,)),
        B=RadialProfile.analytic("step.B", lambda r: np.where(inside(r), b, 0.0),
                                 breakpoints=(1.0,)),
        phi=RadialProfile.analytic("step.phi", phi, d1=a, breakpoints=(1.0,)),
        flux=0.5 * b, norm=1.0, normalized=False, label="step", params={"b": b},
        breakpoints=(1.0,),
    ).with_norm(1.0, False)
    return normalize(mode, tol) if normalize_mode else mode


def rescale(mode: ZeroMode, n: float) -> ZeroMode:
    """Concentrate a mode: ``psi_n(x) = n psi(n x)``, ``A_n = n A(n x)``,
    ``B_n = n^2 B(n x)``.  Flux and L^2 norm are unchanged."""
    if n <= 0:
        raise ValueError("scale factor must be positive")
    if n == 1:
        return mode
    a, B, phi = mode.a, mode.B, mode.phi
    bps = tuple(x / n for x in mode.breakpoints)
    scaled = replace(
        mode,
        a=RadialProfile.analytic(f"{a.name}@{n:g}", lambda r: n * a(n * r), breakpoints=bps),
        B=RadialProfile.analytic(f"{B.name}@{n:g}", lambda r: n * n * B(n * r), breakpoints=bps),
        phi=RadialProfile.analytic(f"{phi.name}@{n:g}", lambda r: phi(n * r),
                                   d1=lambda r: n * a(n * r), breakpoints=bps),
        label=f"{mode.label}@{n:g}",
        params={**mode.params, "scale": n * mode.params.get("scale", 1.0)},
        breakpoints=bps,
    )
    return scaled.with_norm(n * mode.norm, mode.normalized)
