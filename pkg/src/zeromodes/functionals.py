"""Scalar functionals of a radial zero mode.

Conventions: every integral is over the plane; ``psi = (0, f)`` so
``|psi|^2 = f^2``.  The stability ratio is

    K_l = z * int |psi|^2/|x|  /  ( int |B|^{3/2} * int |psi|^2 ),

which is amplitude independent because of the L^2 divisor.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass

import numpy as np

from .modes import ZeroMode
from .radial import DEFAULT_TOL, RadialProfile, differentiate, erf, integrate_radial

# Half width of the window excluded around jumps of B in the EL residual.
EL_EXCLUSION = 1e-3


@dataclass(frozen=True)
class FunctionalReport:
    coulomb: float
    l2: float
    magnetic: float
    p: float
    kl_over_z: float
    tol: float
    r_min: float | None = None

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class ELCoefficients:
    alpha: float
    beta: float
    gamma: float


def coulomb(mode: ZeroMode, tol: float = DEFAULT_TOL) -> float:
    """``int |psi|^2 / |x|`` = ``2 pi int_0^inf f^2 dr``."""
    f = mode.f
    return integrate_radial(lambda r: f(r) ** 2 / r, 2, tol, breakpoints=mode.breakpoints)


def l2_norm_sq(mode: ZeroMode, tol: float = DEFAULT_TOL) -> float:
    f = mode.f
    return integrate_radial(lambda r: f(r) ** 2, 2, tol, breakpoints=mode.breakpoints)


def magnetic_energy(mode: ZeroMode, p: float = 1.5, tol: float = DEFAULT_TOL,
                    r_min: float | None = None) -> float:
    """``int |B|^p``; ``r_min`` cuts off a neighbourhood of the origin."""
    if p < 1:
        raise ValueError("p must be >= 1")
    B = mode.B
    return integrate_radial(lambda r: np.abs(B(r)) ** p, 2, tol, r_min=r_min,
                            breakpoints=mode.breakpoints)


def kl(mode: ZeroMode, z: float = 1.0, tol: float = DEFAULT_TOL,
       r_min: float | None = None) -> float:
    """Lower bound on the critical constant contributed by ``mode``.

    Raises ``DivergenceError`` if ``int |B|^{3/2}`` diverges (the true value
    is then 0, but that is reported rather than silently returned).
    """
    return z * coulomb(mode, tol) / (magnetic_energy(mode, 1.5, tol, r_min) * l2_norm_sq(mode, tol))


def functional_report(mode: ZeroMode, p: float = 1.5, tol: float = DEFAULT_TOL,
                      r_min: float | None = None) -> FunctionalReport:
    c = coulomb(mode, tol)
    n2 = l2_norm_sq(mode, tol)
    mag = magnetic_energy(mode, p, tol, r_min)
    m32 = mag if p == 1.5 else magnetic_energy(mode, 1.5, tol, r_min)
    return FunctionalReport(coulomb=c, l2=n2, magnetic=mag, p=p,
                            kl_over_z=c / (m32 * n2), tol=tol, r_min=r_min)


def energy(mode: ZeroMode, z: float, K: float, p: float, tol: float = DEFAULT_TOL) -> float:
    """``E_K^p`` of a zero mode (kinetic term vanishes): ``-z coul + K int |B|^p``."""
    return -z * coulomb(mode, tol) + K * magnetic_energy(mode, p, tol)


def scaled_energy(mode: ZeroMode, z: float, K: float, p: float, n: float,
                  tol: float = DEFAULT_TOL) -> float:
    """Energy along the concentrating sequence, in the exponent convention
    ``-n^2 z coul + n^(2p-1) K int |B|^p``.

    This equals ``n * energy(rescale(mode, n))``: the common factor ``n``
    does not change the sign, so the comparison of the two terms (and the
    p < 3/2 collapse) reads off directly.
    """
    if n <= 0:
        raise ValueError("n must be positive")
    return -n ** 2 * z * coulomb(mode, tol) + n ** (2 * p - 1) * K * magnetic_energy(mode, p, tol)


# ---------------------------------------------------------------------------
# step field closed forms


def step_closed_forms(b: float) -> dict[str, float]:
    """Closed-form integrals for the step-field mode with amplitude 1.

    ``l2_paper_form`` carries ``pi e^{-b/2}/(b-2)`` for the outer part of the
    norm, as in the published K(b) curve; ``l2`` is the exact integral of the
    displayed spinor, whose outer part is ``2 pi e^{-b/2}/(b-2)``.
    """
    if not b > 2.0:
        raise ValueError("b must exceed 2")
    e = math.exp(-b / 2.0)
    inner = (2.0 * math.pi / b) * (1.0 - e)
    return {
        "coulomb": math.pi * math.sqrt(2.0 * math.pi / b) * erf(math.sqrt(b / 2.0))
        + 2.0 * math.pi * e / (b - 1.0),
        "l2": inner + 2.0 * math.pi * e / (b - 2.0),
        "l2_paper_form": inner + math.pi * e / (b - 2.0),
        "magnetic32": math.pi * b ** 1.5,
    }


def kl_step_paper_form(b: float, z: float = 1.0) -> float:
    c = step_closed_forms(b)
    return z * c["coulomb"] / (c["magnetic32"] * c["l2_paper_form"])


def kl_step_closed_form(b: float, z: float = 1.0) -> float:
    c = step_closed_forms(b)
    return z * c["coulomb"] / (c["magnetic32"] * c["l2"])


# ---------------------------------------------------------------------------
# Euler-Lagrange residual


def el_coefficients(mode: ZeroMode, tol: float = DEFAULT_TOL) -> ELCoefficients:
    c = coulomb(mode, tol)
    n2 = l2_norm_sq(mode, tol)
    m32 = magnetic_energy(mode, 1.5, tol)
    return ELCoefficients(alpha=2.0 * m32 * n2, beta=2.0 * m32 * c, gamma=1.5 * c * n2)


def el_residual(mode: ZeroMode, tol: float = DEFAULT_TOL, r_lo: float = 1e-2,
                r_hi: float = 1e2) -> tuple[ELCoefficients, RadialProfile, float]:
    """Residual of the radial Euler-Lagrange equation for maximizers of K_l.

    ``R = alpha f^2/r - beta f^2 + gamma (s'' + s'/r)`` with ``s = |B|^{1/2}``.
    The norm ``(int R^2 r dr)^{1/2}`` is taken over ``[r_lo, r_hi]``: the
    ``f^2/r`` term makes it diverge at the origin unless ``B`` is singular
    there.  Windows of half width ``EL_EXCLUSION`` around jumps of ``B`` are
    left out, with a warning.
    """
    coef = el_coefficients(mode, tol)
    sqrt_b = mode.B.map("sqrtB", lambda v: np.sqrt(np.abs(v)))
    s1 = differentiate(sqrt_b, 1, mode.breakpoints)
    s2 = differentiate(sqrt_b, 2, mode.breakpoints)
    f = mode.f
    excluded = [(x - EL_EXCLUSION, x + EL_EXCLUSION) for x in mode.breakpoints]
    if excluded:
        warnings.warn(f"|B|^(1/2) is not differentiable at r = {list(mode.breakpoints)}; "
                      f"excluding windows of half width {EL_EXCLUSION:g}", stacklevel=2)

    def residual(r):
        r = np.asarray(r, dtype=float)
        fr2 = f(r) ** 2
        out = coef.alpha * fr2 / r - coef.beta * fr2 + coef.gamma * (s2(r) + s1(r) / r)
        for lo, hi in excluded:
            out = np.where((r > lo) & (r < hi), 0.0, out)
        return out

    profile = RadialProfile.analytic(f"el_residual[{mode.label}]", residual)
    cuts = [x for pair in excluded for x in pair]
    norm_sq = integrate_radial(lambda r: residual(r) ** 2, 2, max(tol, 1e-8), r_min=r_lo,
                               r_max=r_hi, breakpoints=cuts) / (2.0 * math.pi)
    return coef, profile, math.sqrt(norm_sq)
