"""Uncertainty-type inequalities generated by one quadratic-form lemma.

For a radial weight ``g(x) = G(|x|)`` and every real ``lambda``,
``sum_k int |(d_k + lambda x_k g) psi|^2 >= 0``.  Expanding and optimizing
over ``lambda`` gives

    (int |grad psi|^2)(int |x|^2 g^2 |psi|^2) >= 1/4 (int [N g + |x| G'] |psi|^2)^2,

and ``G = 1, 1/r, 1/r^2, 1/(1+r^2)`` lead to the Heisenberg, hydrogen, Hardy
and linearized Sobolev inequalities.  Test functions here are radial, so
``|grad psi| = |psi'(r)|``.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .radial import DEFAULT_TOL, RadialProfile, differentiate, integrate_radial

MIN_DIMENSION = {"heisenberg": 1, "hydrogen": 2, "hardy": 3, "lin_sobolev": 3}
RANDOM_SEED = 12345


@dataclass(frozen=True)
class InequalityResult:
    kind: str
    N: int
    lhs: float
    rhs: float

    @property
    def slack(self) -> float:
        return self.lhs - self.rhs

    def to_dict(self) -> dict:
        return {**asdict(self), "slack": self.slack}


WEIGHTS = {
    "heisenberg": RadialProfile.analytic(
        "1", lambda r: np.ones_like(r), d1=lambda r: np.zeros_like(r)),
    "hydrogen": RadialProfile.analytic("1/r", lambda r: 1.0 / r, d1=lambda r: -1.0 / r ** 2),
    "hardy": RadialProfile.analytic("1/r^2", lambda r: r ** -2.0, d1=lambda r: -2.0 * r ** -3.0),
    "lin_sobolev": RadialProfile.analytic(
        "1/(1+r^2)", lambda r: 1.0 / (1.0 + r * r), d1=lambda r: -2.0 * r / (1.0 + r * r) ** 2),
}


def _moments(psi: RadialProfile, G: RadialProfile, N: int, tol: float):
    dpsi = differentiate(psi, 1)
    dG = differentiate(G, 1)
    bps = psi.breakpoints
    kinetic = integrate_radial(lambda r: dpsi(r) ** 2, N, tol, breakpoints=bps)
    weight = integrate_radial(lambda r: (r * G(r) * psi(r)) ** 2, N, tol, breakpoints=bps)
    drift = integrate_radial(lambda r: (N * G(r) + r * dG(r)) * psi(r) ** 2, N, tol,
                             breakpoints=bps)
    return kinetic, weight, drift


def lemma_check(psi: RadialProfile, G: RadialProfile, N: int,
                tol: float = DEFAULT_TOL) -> tuple[float, float, float]:
    """Both sides of the lemma and their difference ``(lhs, rhs, slack)``."""
    kinetic, weight, drift = _moments(psi, G, N, tol)
    lhs = kinetic * weight
    rhs = 0.25 * drift ** 2
    return lhs, rhs, lhs - rhs


def optimal_lambda(psi: RadialProfile, G: RadialProfile, N: int,
                   tol: float = DEFAULT_TOL) -> float:
    """Minimizer of the quadratic ``lambda -> sum_k F_k``."""
    _, weight, drift = _moments(psi, G, N, tol)
    if weight == 0.0:
        raise ValueError("test function vanishes identically")
    return drift / (2.0 * weight)


def fk_sum(psi: RadialProfile, G: RadialProfile, N: int, lam: float,
           tol: float = DEFAULT_TOL) -> float:
    """``sum_k F_k = int |psi' + lambda r G psi|^2``, integrated directly."""
    dpsi = differentiate(psi, 1)
    return integrate_radial(lambda r: (dpsi(r) + lam * r * G(r) * psi(r)) ** 2, N, tol,
                            breakpoints=psi.breakpoints)


def named_inequality(kind: str, psi: RadialProfile, N: int,
                     tol: float = DEFAULT_TOL) -> InequalityResult:
    """One of the four named inequalities for ``psi`` normalized in L^2.

    The normalization is applied internally; for the hydrogen case the two
    sides are not homogeneous of the same degree otherwise.
    """
    if kind not in MIN_DIMENSION:
        raise ValueError(f"unknown inequality {kind!r}")
    if N < MIN_DIMENSION[kind]:
        raise ValueError(f"{kind} requires N >= {MIN_DIMENSION[kind]}")
    bps = psi.breakpoints
    dpsi = differentiate(psi, 1)
    mass = integrate_radial(lambda r: psi(r) ** 2, N, tol, breakpoints=bps)
    if mass == 0.0:
        raise ValueError("test function vanishes identically")
    kinetic = integrate_radial(lambda r: dpsi(r) ** 2, N, tol, breakpoints=bps) / mass

    def moment(w):
        return integrate_radial(lambda r: w(r) * psi(r) ** 2, N, tol, breakpoints=bps) / mass

    if kind == "heisenberg":
        lhs = kinetic * moment(lambda r: r * r)
        rhs = N ** 2 / 4.0
    elif kind == "hydrogen":
        lhs = kinetic
        rhs = (N - 1) ** 2 / 4.0 * moment(lambda r: 1.0 / r) ** 2
    elif kind == "hardy":
        lhs = kinetic
        rhs = (N - 2) ** 2 / 4.0 * moment(lambda r: r ** -2.0)
    else:
        lhs = kinetic
        rhs = N * (N - 2) * moment(lambda r: (1.0 + r * r) ** -2.0)
    return InequalityResult(kind, N, lhs, rhs)


def poly_exp(a: float, b: float, c: float) -> RadialProfile:
    """``(a + b r) exp(-c r)`` with its exact derivative."""
    return RadialProfile.analytic(
        "poly_exp", lambda r: (a + b * r) * np.exp(-c * r), params={"a": a, "b": b, "c": c},
        d1=lambda r: (b - c * (a + b * r)) * np.exp(-c * r))


def gaussian(width: float = 1.0) -> RadialProfile:
    """``exp(-r^2 / (2 width^2))``."""
    s2 = width * width
    return RadialProfile.analytic(
        "gaussian", lambda r: np.exp(-r * r / (2 * s2)), params={"width": width},
        d1=lambda r: -(r / s2) * np.exp(-r * r / (2 * s2)))


def exponential(c: float = 1.0) -> RadialProfile:
    return poly_exp(1.0, 0.0, c)


def random_test_functions(n: int = 100, seed: int = RANDOM_SEED) -> list[RadialProfile]:
    """``(a + b r) e^{-c r}`` with ``a, b`` in [0, 1] and ``c`` in [0.5, 2]; the
    first k functions do not depend on ``n``."""
    u = np.random.default_rng(seed).uniform(size=(n, 3))
    return [poly_exp(a, b, 0.5 + 1.5 * c) for a, b, c in u]


def verify_random(n: int = 100, seed: int = RANDOM_SEED,
                  tol: float = DEFAULT_TOL) -> list[InequalityResult]:
    """All four named inequalities at their minimal dimension for ``n``
    seeded test functions, in input order."""
    return [named_inequality(kind, psi, N, tol)
            for psi in random_test_functions(n, seed)
            for kind, N in MIN_DIMENSION.items()]
