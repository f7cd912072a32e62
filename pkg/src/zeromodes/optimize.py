"""Derivative-free maximization of K_l and the step-field K(b) scan."""

from __future__ import annotations

import csv
import io
import math
from collections.abc import Callable, Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import astuple, dataclass
from typing import NamedTuple

import numpy as np

from . import functionals as fn
from .modes import NoSquareIntegrableModeError, family_power, family_step
from .radial import DEFAULT_TOL, DivergenceError

INVPHI = (math.sqrt(5.0) - 1.0) / 2.0
# reflection, expansion, contraction, shrink
NM_COEFFICIENTS = (1.0, 2.0, 0.5, 0.5)
CSV_HEADER = ("b", "coulomb", "l2", "magnetic32", "kl_paper_form", "kl_quadrature")


def golden_max(f: Callable[[float], float], lo: float, hi: float,
               tol: float = 1e-6) -> tuple[float, float]:
    """Golden-section search for the maximum of a unimodal ``f`` on ``[lo, hi]``."""
    if not lo < hi:
        raise ValueError("need lo < hi")

    def value(x):
        y = float(f(x))
        if not math.isfinite(y):
            raise ValueError(f"objective is not finite at x = {x!r}")
        return y

    a, b = lo, hi
    c = b - INVPHI * (b - a)
    d = a + INVPHI * (b - a)
    fc, fd = value(c), value(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - INVPHI * (b - a)
            fc = value(c)
        else:
            a, c, fc = c, d, fd
            d = a + INVPHI * (b - a)
            fd = value(d)
    x = 0.5 * (a + b)
    return x, value(x)


class NelderMeadResult(NamedTuple):
    params: tuple[float, ...]
    value: float
    iterations: int


def nelder_mead_max(f: Callable[[np.ndarray], float], init: Sequence[float],
                    tol: float = 1e-8, max_iters: int = 2000,
                    step: float | Sequence[float] = 0.1) -> NelderMeadResult:
    """Nelder-Mead maximization.

    Evaluations raising ``DivergenceError`` or returning NaN count as ``-inf``.
    Stops when the simplex diameter drops below ``tol`` or after
    ``max_iters`` iterations.
    """
    rho, chi, psi, sigma = NM_COEFFICIENTS

    def cost(x):
        try:
            y = float(f(x))
        except DivergenceError:
            return math.inf
        return math.inf if math.isnan(y) else -y

    x0 = np.asarray(init, dtype=float)
    n = x0.size
    steps = np.broadcast_to(np.asarray(step, dtype=float), (n,))
    simplex = np.vstack([x0] + [x0 + steps[i] * np.eye(n)[i] for i in range(n)])
    values = np.array([cost(x) for x in simplex])
    if np.all(np.isinf(values) & (values > 0)):
        raise ValueError("objective is -inf on the whole initial simplex")

    it = 0
    while it < max_iters:
        order = np.argsort(values, kind="stable")
        simplex, values = simplex[order], values[order]
        diam = max(np.linalg.norm(simplex[i] - simplex[j])
                   for i in range(n + 1) for j in range(i + 1, n + 1))
        if diam < tol:
            break
        it += 1
        centroid = simplex[:-1].mean(axis=0)
        worst = simplex[-1]
        xr = centroid + rho * (centroid - worst)
        fr = cost(xr)
        if fr < values[0]:
            xe = centroid + rho * chi * (centroid - worst)
            fe = cost(xe)
            simplex[-1], values[-1] = (xe, fe) if fe < fr else (xr, fr)
            continue
        if fr < values[-2]:
            simplex[-1], values[-1] = xr, fr
            continue
        if fr < values[-1]:
            xc = centroid + psi * rho * (centroid - worst)
            fc = cost(xc)
            if fc <= fr:
                simplex[-1], values[-1] = xc, fc
                continue
        else:
            xcc = centroid - psi * (centroid - worst)
            fcc = cost(xcc)
            if fcc < values[-1]:
                simplex[-1], values[-1] = xcc, fcc
                continue
        simplex[1:] = simplex[0] + sigma * (simplex[1:] - simplex[0])
        values[1:] = [cost(x) for x in simplex[1:]]
    best = int(np.argmin(values))
    return NelderMeadResult(tuple(float(v) for v in simplex[best]), -float(values[best]), it)


def power_family_objective(z: float = 1.0, r_min: float | None = 1e-6,
                           tol: float = DEFAULT_TOL) -> Callable[[np.ndarray], float]:
    """``(alpha, beta) -> K_l`` with an inner cutoff; infeasible points give -inf."""

    def objective(params):
        alpha, beta = float(params[0]), float(params[1])
        try:
            mode = family_power(alpha, beta, tol=tol)
        except (ValueError, NoSquareIntegrableModeError):
            return -math.inf
        return fn.kl(mode, z, tol, r_min=r_min)

    return objective


@dataclass(frozen=True)
class ScanRow:
    b: float
    coulomb: float
    l2: float
    magnetic32: float
    kl_paper_form: float
    kl_quadrature: float


@dataclass(frozen=True)
class ScanTable:
    rows: tuple[ScanRow, ...]
    z: float = 1.0

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.rows])

    def argmax(self, name: str) -> tuple[float, float]:
        col = self.column(name)
        i = int(np.nanargmax(col))
        return self.rows[i].b, float(col[i])

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for row in self.rows:
            w.writerow([repr(float(v)) for v in astuple(row)])
        return buf.getvalue()

    def summary(self) -> dict:
        b_p, k_p = self.argmax("kl_paper_form")
        b_q, k_q = self.argmax("kl_quadrature")
        gap = self.column("kl_paper_form") - self.column("kl_quadrature")
        return {
            "rows": len(self.rows),
            "argmax_paper_form": {"b": b_p, "kl_over_z": k_p / self.z},
            "argmax_quadrature": {"b": b_q, "kl_over_z": k_q / self.z},
            "paper_minus_quadrature": {"min": float(gap.min()) / self.z,
                                       "max": float(gap.max()) / self.z},
        }


def _scan_row(b: float, z: float, tol: float) -> ScanRow:
    mode = family_step(b, normalize_mode=False, tol=tol)
    c = fn.coulomb(mode, tol)
    n2 = fn.l2_norm_sq(mode, tol)
    m32 = fn.magnetic_energy(mode, 1.5, tol)
    return ScanRow(b=b, coulomb=c, l2=n2, magnetic32=m32,
                   kl_paper_form=fn.kl_step_paper_form(b, z),
                   kl_quadrature=z * c / (m32 * n2))


def scan_step_family(lo: float, hi: float, steps: int, z: float = 1.0,
                     tol: float = DEFAULT_TOL, workers: int = 1) -> ScanTable:
    """Tabulate K(b) for the step field: published closed form and direct quadrature."""
    if not 2.0 < lo < hi:
        raise ValueError("need 2 < lo < hi")
    if steps < 10:
        raise ValueError("need at least 10 steps")
    bs = np.linspace(lo, hi, steps)
    args = [(float(b), z, tol) for b in bs]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_scan_row, *zip(*args)))
    else:
        rows = [_scan_row(*a) for a in args]
    return ScanTable(tuple(rows), z)
