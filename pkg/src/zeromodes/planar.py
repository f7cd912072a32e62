"""Cartesian-grid checks of zero modes by second-order finite differences.

Arrays use ``indexing="ij"``: axis 0 is ``x1`` and axis 1 is ``x2``.  All
norms skip the outermost ring of nodes and, for fields with a jump in
``B``, a band of half width ``2h`` around each jump radius.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, replace
from os import PathLike

import numpy as np

from .modes import ZeroMode
from .radial import RadialProfile

MIN_RESOLUTION = 65
PROJECTOR_SEED = 20240917

SIGMA1 = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA2 = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA3 = np.array([[1, 0], [0, -1]], dtype=complex)

# Orthogonal projector on R^2 (x) C^2 in the basis (e_i (x) xi_j), i major.
PROJECTOR = 0.5 * np.array([
    [1, 0, -1j, 0],
    [0, 1, 0, 1j],
    [1j, 0, 1, 0],
    [0, -1j, 0, 1],
], dtype=complex)


@dataclass(frozen=True)
class PlanarFieldSet:
    """Samples of ``psi`` (2, M, M), ``A`` (2, M, M) and ``B`` (M, M)."""

    L: float
    M: int
    psi: np.ndarray
    A: np.ndarray
    B: np.ndarray
    mask: np.ndarray  # nodes used in norms

    @property
    def h(self) -> float:
        return 2.0 * self.L / (self.M - 1)

    @property
    def x(self) -> np.ndarray:
        return np.linspace(-self.L, self.L, self.M)

    def coords(self) -> tuple[np.ndarray, np.ndarray]:
        return np.meshgrid(self.x, self.x, indexing="ij")


def _check_resolution(M: int) -> None:
    if M < MIN_RESOLUTION or M % 2 == 0:
        raise ValueError(f"resolution M must be odd and >= {MIN_RESOLUTION}")


def sample_profiles(f: RadialProfile, a: RadialProfile, B: RadialProfile, L: float, M: int,
                    exclude_radii: tuple[float, ...] = ()) -> PlanarFieldSet:
    """Sample ``psi = (0, f)``, ``A = a e_theta`` and ``B`` on ``[-L, L]^2``."""
    if L <= 0:
        raise ValueError("half width L must be positive")
    _check_resolution(M)
    x = np.linspace(-L, L, M)
    X1, X2 = np.meshgrid(x, x, indexing="ij")
    r = np.hypot(X1, X2)
    origin = r == 0.0
    # The origin takes the r -> 0 limit of f and B.
    r_eval = np.where(origin, 1e-12, r)
    with np.errstate(all="ignore"):
        fv = np.asarray(f(r_eval), dtype=float)
        av = np.asarray(a(r_eval), dtype=float)
        bv = np.asarray(B(r_eval), dtype=float)
    if not np.all(np.isfinite(fv)):
        raise ValueError("spinor profile is not finite on the sampling disk")
    av = np.where(origin, 0.0, av)
    if not np.all(np.isfinite(av)):
        raise ValueError("vector potential is not finite on the sampling disk")
    psi = np.zeros((2, M, M), dtype=complex)
    psi[1] = fv
    A = np.zeros((2, M, M))
    with np.errstate(invalid="ignore", divide="ignore"):
        A[0] = np.where(origin, 0.0, -av * X2 / r)
        A[1] = np.where(origin, 0.0, av * X1 / r)
    mask = np.zeros((M, M), dtype=bool)
    mask[1:-1, 1:-1] = True
    h = 2.0 * L / (M - 1)
    for rad in exclude_radii:
        mask &= np.abs(r - rad) >= 2.0 * h
    return PlanarFieldSet(L=L, M=M, psi=psi, A=A, B=bv, mask=mask)


def sample(mode: ZeroMode, L: float = 8.0, M: int = 257) -> PlanarFieldSet:
    return sample_profiles(mode.f, mode.a, mode.B, L, M, mode.breakpoints)


def _d(u: np.ndarray, h: float, axis: int) -> np.ndarray:
    """Central difference along ``axis`` (last two axes are x1, x2); the
    outer ring is left at zero and must be masked by the caller."""
    out = np.zeros_like(u)
    ax = u.ndim - 2 + axis
    lo = [slice(None)] * u.ndim
    hi = [slice(None)] * u.ndim
    mid = [slice(None)] * u.ndim
    lo[ax], hi[ax], mid[ax] = slice(None, -2), slice(2, None), slice(1, -1)
    out[tuple(mid)] = (u[tuple(hi)] - u[tuple(lo)]) / (2.0 * h)
    return out


def covariant_derivatives(fields: PlanarFieldSet) -> np.ndarray:
    """``(-i d_k + A_k) psi`` for k = 1, 2; shape (2, 2, M, M)."""
    h = fields.h
    return np.stack([-1j * _d(fields.psi, h, k) + fields.A[k] * fields.psi for k in (0, 1)])


def pauli_field(fields: PlanarFieldSet) -> np.ndarray:
    """``sigma . (p + A) psi`` at every node; shape (2, M, M)."""
    D = covariant_derivatives(fields)
    return np.einsum("ab,bij->aij", SIGMA1, D[0]) + np.einsum("ab,bij->aij", SIGMA2, D[1])


def _norm(values: np.ndarray, fields: PlanarFieldSet) -> float:
    """Discrete L^2 norm over the masked nodes; leading axes are summed."""
    dens = np.abs(values) ** 2
    while dens.ndim > 2:
        dens = dens.sum(axis=0)
    return math.sqrt(fields.h ** 2 * float(dens[fields.mask].sum()))


def pauli_residual(fields: PlanarFieldSet) -> float:
    """Discrete ``|| sigma.(p + A) psi ||_2``; O(h^2) for a true zero mode."""
    _check_resolution(fields.M)
    return _norm(pauli_field(fields), fields)


def gradient_norm(fields: PlanarFieldSet) -> float:
    """Discrete ``|| grad psi ||_2`` on the same nodes."""
    h = fields.h
    return _norm(np.stack([_d(fields.psi, h, 0), _d(fields.psi, h, 1)]), fields)


def diamagnetic_slack(fields: PlanarFieldSet) -> tuple[float, np.ndarray]:
    """Pointwise ``|(p + A) psi|^2 - 2 |grad |psi||^2``.

    Returns the minimum over the masked nodes and the full field (NaN off
    the mask).
    """
    h = fields.h
    D = covariant_derivatives(fields)
    kinetic = (np.abs(D) ** 2).sum(axis=(0, 1))
    modulus = np.sqrt((np.abs(fields.psi) ** 2).sum(axis=0))
    grad_mod_sq = _d(modulus, h, 0) ** 2 + _d(modulus, h, 1) ** 2
    slack = np.where(fields.mask, kinetic - 2.0 * grad_mod_sq, np.nan)
    return float(np.nanmin(slack)), slack


def energy_identity(fields: PlanarFieldSet) -> tuple[float, float]:
    """Both sides of ``int |sigma.(p+A)psi|^2 = int |(p+A)psi|^2 + int B <psi, sigma3 psi>``."""
    h2 = fields.h ** 2
    m = fields.mask
    lhs = h2 * float((np.abs(pauli_field(fields)) ** 2).sum(axis=0)[m].sum())
    kinetic = (np.abs(covariant_derivatives(fields)) ** 2).sum(axis=(0, 1))
    spin = np.abs(fields.psi[0]) ** 2 - np.abs(fields.psi[1]) ** 2
    rhs = h2 * float((kinetic + fields.B * spin)[m].sum())
    return lhs, rhs


def gauge_transform(fields: PlanarFieldSet, c: float) -> PlanarFieldSet:
    """``A -> A + grad(c x1)``, ``psi -> exp(-i c x1) psi``."""
    X1, _ = fields.coords()
    A = fields.A.copy()
    A[0] = A[0] + c
    return replace(fields, A=A, psi=fields.psi * np.exp(-1j * c * X1))


def projector_fixed_point_residual(fields: PlanarFieldSet) -> float:
    """``|| P v - v ||_2`` for ``v = (grad + i A) psi`` seen in R^2 (x) C^2."""
    h = fields.h
    v = np.stack([_d(fields.psi, h, k) + 1j * fields.A[k] * fields.psi for k in (0, 1)])
    v = v.reshape(4, fields.M, fields.M)
    return _norm(np.einsum("ab,bij->aij", PROJECTOR, v) - v, fields)


def projector_checks(n_random: int = 100, seed: int = PROJECTOR_SEED) -> dict:
    """Idempotence, self-adjointness and ``|P(u (x) xi)|^2 = |u|^2 |xi|^2 / 2``."""
    P = PROJECTOR
    rng = np.random.default_rng(seed)
    theta = rng.uniform(0.0, 2.0 * np.pi, n_random)
    us = np.stack([np.cos(theta), np.sin(theta)], axis=1)
    xis = rng.normal(size=(n_random, 2)) + 1j * rng.normal(size=(n_random, 2))
    xis /= np.linalg.norm(xis, axis=1, keepdims=True)
    fixed_u = np.array([[1.0, 0.0], [0.0, 1.0], [1.0, 0.0], [0.0, 1.0]])
    fixed_xi = np.array([[1, 0], [1, 0], [0, 1], [0, 1]], dtype=complex)
    us = np.concatenate([fixed_u, us])
    xis = np.concatenate([fixed_xi, xis])
    vecs = np.einsum("ni,nj->nij", us, xis).reshape(-1, 4)
    images = vecs @ P.T
    norms = np.sum(np.abs(images) ** 2, axis=1)
    expected = 0.5 * np.sum(us ** 2, axis=1) * np.sum(np.abs(xis) ** 2, axis=1)
    return {
        "idempotence_dev": float(np.max(np.abs(P @ P - P))),
        "hermitian_dev": float(np.max(np.abs(P - P.conj().T))),
        "norm_dev": float(np.max(np.abs(norms - expected))),
        "first_case_norm_sq": float(norms[0]),
        "cases": int(len(vecs)),
        "seed": seed,
    }


def write_slack_csv(path: str | PathLike, fields: PlanarFieldSet, slack: np.ndarray) -> None:
    """Dump the masked slack field as ``x1,x2,slack`` rows."""
    X1, X2 = fields.coords()
    m = fields.mask
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x1", "x2", "slack"])
        for row in zip(X1[m], X2[m], slack[m]):
            w.writerow([f"{v:.10g}" for v in row])
