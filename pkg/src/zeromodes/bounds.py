"""Closed-form bound calculators.

Sobolev constants from Lieb-Thirring constants, the upper bound on the
critical coupling, the coercivity threshold ``K_u``, the 3D critical charge
bound and the stability envelope ``g_p``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

L2_DEFAULT = 0.09
L3_DEFAULT = 0.0135
ALPHA_DEFAULT = 1.0 / 137.035999


def sobolev_lower(N: int, L_N: float) -> float:
    """Lower bound on ``S_N`` obtained by optimizing the Lieb-Thirring bound
    over potentials ``V = C rho^(2/(N-1))``."""
    if N < 2:
        raise ValueError("N must be >= 2")
    if L_N <= 0:
        raise ValueError("Lieb-Thirring constant must be positive")
    return N ** (N / (N - 1)) / ((1 + N) ** ((N + 1) / (N - 1)) * L_N ** (2 / (N - 1)))


def kc_upper(z: float, S2: float) -> float:
    """Upper bound ``z / sqrt(2 S2)`` on the critical coupling."""
    if S2 <= 0:
        raise ValueError("S2 must be positive")
    return z / math.sqrt(2.0 * S2)


def ku(z: float, S2: float) -> float:
    """Coupling above which ``g_{3/2}`` is coercive: ``2 z / sqrt(S2)``."""
    if S2 <= 0:
        raise ValueError("S2 must be positive")
    return 2.0 * z / math.sqrt(S2)


def zc_3d(S3: float, alpha: float = ALPHA_DEFAULT) -> float:
    """Lower bound on the 3D critical nuclear charge, ``(3/2)^2 S3 / (8 pi alpha^2)``."""
    if not 0 < alpha < 1:
        raise ValueError("fine-structure constant must lie in (0, 1)")
    if S3 <= 0:
        raise ValueError("S3 must be positive")
    return 2.25 * S3 / (8.0 * math.pi * alpha ** 2)


def _check_p(p: float) -> None:
    if p <= 1:
        raise ValueError("p must exceed 1")


def f_p(p: float, C: float, z: float, alpha, x):
    """``(1 - alpha) x^2 + C alpha^p x^(2p-2) - 2 z x``."""
    _check_p(p)
    alpha = np.asarray(alpha, dtype=float)
    x = np.asarray(x, dtype=float)
    return (1.0 - alpha) * x ** 2 + C * alpha ** p * x ** (2 * p - 2) - 2.0 * z * x


def envelope_constant(p: float, C: float) -> float:
    """``C' = (p - 1) / (p^(p/(p-1)) C^(1/(p-1)))``."""
    _check_p(p)
    return (p - 1) / (p ** (p / (p - 1)) * C ** (1 / (p - 1)))


def stability_envelope(p: float, C: float, z: float, x):
    """``g_p(x) = min over alpha in [0, 1] of f_p(alpha, x)`` in closed form.

    The interior minimizer is admissible when ``x^(2(2-p)) <= p C``; otherwise
    the minimum sits at ``alpha = 1``.
    """
    _check_p(p)
    if C <= 0:
        raise ValueError("C must be positive")
    x = np.asarray(x, dtype=float)
    interior = x ** (2 * (2 - p)) <= p * C
    cp = envelope_constant(p, C)
    g_in = x ** 2 - cp * x ** (2 / (p - 1)) - 2.0 * z * x
    g_out = C * x ** (2 * p - 2) - 2.0 * z * x
    out = np.where(interior, g_in, g_out)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class BoundReport:
    S2: float
    S3: float
    kc_upper_over_z: float
    ku_over_z: float
    zc3d: float
    L2: float
    L3: float
    alpha: float

    def to_dict(self) -> dict:
        return asdict(self)


def bound_report(L2: float = L2_DEFAULT, L3: float = L3_DEFAULT,
                 alpha: float = ALPHA_DEFAULT) -> BoundReport:
    S2 = sobolev_lower(2, L2)
    S3 = sobolev_lower(3, L3)
    return BoundReport(S2=S2, S3=S3, kc_upper_over_z=kc_upper(1.0, S2),
                       ku_over_z=ku(1.0, S2), zc3d=zc_3d(S3, alpha),
                       L2=L2, L3=L3, alpha=alpha)
