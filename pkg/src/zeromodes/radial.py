"""Radial grids, profiles and quadrature over R^N for radial integrands.

Every integral over the plane (or space) of a radially symmetric integrand is
reduced to ``Omega_{N-1} * int_0^inf f(r) r^(N-1) dr`` and evaluated in the
logarithmic variable ``t = log r``.  In that variable both the ``1/r``
singularity at the origin and power-law tails become exponentials, so the
adaptive Gauss-Kronrod rule sees smooth integrands and the truncation window
can be grown until the integrand is negligible.
"""

from __future__ import annotations

import math
from collections.abc import Callable, Iterable, Mapping
from dataclasses import dataclass, field
from typing import Any

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.special import erf as _erf

DEFAULT_TOL = 1e-10

# Integrand is dropped once it falls below this fraction of its running maximum.
TRUNCATION_RATIO = 1e-18
# Hard limits on t = log r; keeps exp(3 t) finite.
T_BUDGET = 230.0
# Consecutive non-decaying unit slices before divergence is declared.
DIVERGENCE_RUN = 8
MAX_INTERVALS = 20000

# Gauss-Kronrod 7/15 nodes and weights on [-1, 1] (QUADPACK qk15).
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])
GK_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
GK_WEIGHTS = np.concatenate([_WGK[:-1], _WGK[::-1]])
# Gauss weights live on the odd Kronrod nodes (the center included).
GAUSS_WEIGHTS = np.zeros(15)
GAUSS_WEIGHTS[1:14:2] = np.concatenate([_WG[:-1], _WG[::-1]])


class DivergenceError(ArithmeticError):
    """Raised when a radial integral looks divergent or does not converge.

    Attributes:
        partial_sum: Integral accumulated before giving up.
        ratio: Ratio of the last two unit-slice increments (>= 1 means the
            integrand is not decaying in ``log r``).
    """

    def __init__(self, message: str, partial_sum: float, ratio: float):
        super().__init__(message)
        self.partial_sum = partial_sum
        self.ratio = ratio


@dataclass(frozen=True)
class RadialGrid:
    """Strictly increasing positive radii; the origin is never a node."""

    nodes: np.ndarray

    def __post_init__(self) -> None:
        nodes = np.asarray(self.nodes, dtype=float)
        if nodes.ndim != 1 or nodes.size < 16:
            raise ValueError("a radial grid needs at least 16 nodes")
        if nodes[0] <= 0.0:
            raise ValueError("grid nodes must be strictly positive")
        if np.any(np.diff(nodes) <= 0.0):
            raise ValueError("grid nodes must be strictly increasing")
        nodes.flags.writeable = False
        object.__setattr__(self, "nodes", nodes)

    @property
    def count(self) -> int:
        return int(self.nodes.size)

    @classmethod
    def logarithmic(cls, r_min: float, r_max: float, count: int) -> RadialGrid:
        return cls(np.geomspace(r_min, r_max, count))

    @classmethod
    def linear(cls, r_min: float, r_max: float, count: int) -> RadialGrid:
        return cls(np.linspace(r_min, r_max, count))


def _as_array(r: Any) -> np.ndarray:
    return np.asarray(r, dtype=float)


@dataclass(frozen=True)
class RadialProfile:
    """A scalar function of the radius.

    Analytic profiles wrap a vectorized callable and may carry exact first
    and second derivatives.  Sampled profiles hold one value per grid node and
    are evaluated by cubic-spline interpolation inside the grid range (NaN
    outside it).  ``breakpoints`` lists radii where the profile or one of its
    low derivatives jumps; quadrature splits there.
    """

    func: Callable[[np.ndarray], np.ndarray]
    name: str = "anonymous"
    params: Mapping[str, float] = field(default_factory=dict)
    d1: Callable[[np.ndarray], np.ndarray] | None = None
    d2: Callable[[np.ndarray], np.ndarray] | None = None
    breakpoints: tuple[float, ...] = ()
    grid: RadialGrid | None = None
    values: np.ndarray | None = None

    @classmethod
    def analytic(
        cls,
        name: str,
        func: Callable[[np.ndarray], np.ndarray],
        params: Mapping[str, float] | None = None,
        d1: Callable[[np.ndarray], np.ndarray] | None = None,
        d2: Callable[[np.ndarray], np.ndarray] | None = None,
        breakpoints: Iterable[float] = (),
    ) -> RadialProfile:
        return cls(func=func, name=name, params=dict(params or {}), d1=d1,
                   d2=d2, breakpoints=tuple(sorted(breakpoints)))

    @classmethod
    def sampled(cls, grid: RadialGrid, values: Any, name: str = "sampled") -> RadialProfile:
        values = np.asarray(values, dtype=float)
        if values.shape != grid.nodes.shape:
            raise ValueError("sampled profile needs exactly one value per grid node")
        spline = CubicSpline(grid.nodes, values, extrapolate=False)
        return cls(func=spline, name=name, grid=grid, values=values,
                   d1=spline.derivative(1), d2=spline.derivative(2))

    @property
    def is_sampled(self) -> bool:
        return self.grid is not None

    @property
    def support(self) -> tuple[float, float] | None:
        """Radial range on which the profile is defined (sampled only)."""
        if self.grid is None:
            return None
        return float(self.grid.nodes[0]), float(self.grid.nodes[-1])

    def __call__(self, r: Any) -> np.ndarray:
        return self.func(_as_array(r))

    def map(self, name: str, fn: Callable[[np.ndarray], np.ndarray]) -> RadialProfile:
        """Pointwise transform ``fn(self(r))``; derivatives are not carried."""
        return RadialProfile.analytic(name, lambda r: fn(self(r)),
                                      breakpoints=self.breakpoints)

    def __mul__(self, other: float | RadialProfile) -> RadialProfile:
        if isinstance(other, RadialProfile):
            return RadialProfile.analytic(
                f"({self.name})*({other.name})", lambda r: self(r) * other(r),
                breakpoints=set(self.breakpoints) | set(other.breakpoints))
        c = float(other)
        return RadialProfile.analytic(
            f"{c:g}*({self.name})", lambda r: c * self(r),
            d1=None if self.d1 is None else (lambda r: c * self.d1(_as_array(r))),
            d2=None if self.d2 is None else (lambda r: c * self.d2(_as_array(r))),
            breakpoints=self.breakpoints)

    __rmul__ = __mul__

    def __add__(self, other: RadialProfile) -> RadialProfile:
        d1 = d2 = None
        if self.d1 is not None and other.d1 is not None:
            d1 = lambda r: self.d1(_as_array(r)) + other.d1(_as_array(r))  # noqa: E731
        if self.d2 is not None and other.d2 is not None:
            d2 = lambda r: self.d2(_as_array(r)) + other.d2(_as_array(r))  # noqa: E731
        return RadialProfile.analytic(
            f"({self.name})+({other.name})", lambda r: self(r) + other(r), d1=d1, d2=d2,
            breakpoints=set(self.breakpoints) | set(other.breakpoints))


def sphere_area(N: int) -> float:
    """Surface measure of the unit sphere in R^N (2 for N = 1)."""
    return 2.0 * math.pi ** (N / 2) / math.gamma(N / 2)


def erf(x: Any) -> Any:
    """Error function; scalar in, scalar out."""
    out = _erf(x)
    return float(out) if np.ndim(out) == 0 else out


# ---------------------------------------------------------------------------
# quadrature


def _gk15(g: Callable[[np.ndarray], np.ndarray], lo: np.ndarray, hi: np.ndarray):
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    x = mid[:, None] + half[:, None] * GK_NODES[None, :]
    with np.errstate(all="ignore"):
        y = np.asarray(g(x.ravel()), dtype=float).reshape(x.shape)
    if not np.all(np.isfinite(y)):
        raise ValueError("integrand is not finite on the integration window")
    kron = half * (y @ GK_WEIGHTS)
    gauss = half * (y @ GAUSS_WEIGHTS)
    roundoff = 50.0 * np.finfo(float).eps * np.abs(half) * (np.abs(y) @ GK_WEIGHTS)
    return kron, np.maximum(np.abs(kron - gauss), roundoff)


def _adaptive(g, edges: np.ndarray, tol: float, abs_floor: float = 0.0) -> float:
    """Globally adaptive G7/K15 over consecutive intervals ``edges``."""
    lo, hi = edges[:-1].astype(float), edges[1:].astype(float)
    width = float(edges[-1] - edges[0])
    if width <= 0.0:
        return 0.0
    done_val = 0.0
    done_err = 0.0
    n_total = lo.size
    while True:
        val, err = _gk15(g, lo, hi)
        total = done_val + float(val.sum())
        budget = max(tol * abs(total), abs_floor)
        if done_err + float(err.sum()) <= budget:
            return total
        share = np.maximum(budget, 1e-300) * (hi - lo) / width
        keep = err <= share
        done_val += float(val[keep].sum())
        done_err += float(err[keep].sum())
        lo, hi = lo[~keep], hi[~keep]
        if lo.size == 0:
            return total
        mid = 0.5 * (lo + hi)
        lo, hi = np.concatenate([lo, mid]), np.concatenate([mid, hi])
        order = np.argsort(lo)
        lo, hi = lo[order], hi[order]
        n_total += lo.size // 2
        if n_total > MAX_INTERVALS:
            raise DivergenceError("subdivision budget exhausted", total, math.nan)


def _slice_edges(t0: float, t1: float, cuts: Iterable[float]) -> np.ndarray:
    pts = set(np.arange(math.ceil(t0), math.floor(t1) + 1, dtype=float).tolist())
    pts.update(c for c in cuts if t0 < c < t1)
    pts.update((t0, t1))
    return np.array(sorted(pts))


def integrate_radial(
    f: Callable[[np.ndarray], np.ndarray],
    N: int = 2,
    tol: float = DEFAULT_TOL,
    *,
    r_min: float | None = None,
    r_max: float | None = None,
    breakpoints: Iterable[float] = (),
) -> float:
    """Integral of the radial function ``f`` over R^N.

    Returns ``Omega_{N-1} * int f(r) r^(N-1) dr`` over ``(r_min, r_max)``,
    which defaults to ``(0, inf)``.  The origin is never evaluated.

    The integrand is handled in ``t = log r``.  A coarse scan locates the
    bulk, which is integrated adaptively; the window is then grown one unit
    of ``t`` at a time on each open side until the integrand drops below
    ``1e-18`` of its running maximum, or until successive unit slices decay
    geometrically with a stable ratio, in which case the remaining tail is
    summed in closed form.

    Args:
        f: Vectorized radial function (a ``RadialProfile`` or any callable).
        N: Dimension.
        tol: Relative tolerance, within ``[1e-14, 1e-4]``.
        r_min: Optional inner cutoff.
        r_max: Optional outer cutoff.
        breakpoints: Radii where ``f`` is not smooth.

    Raises:
        DivergenceError: Slices stop decaying, the ``t`` budget runs out or
            the subdivision budget is exhausted.
    """
    if not 1e-14 <= tol <= 1e-4:
        raise ValueError("tol must lie in [1e-14, 1e-4]")
    if N < 1:
        raise ValueError("dimension must be >= 1")
    support = getattr(f, "support", None)
    if support is not None:
        r_min = support[0] if r_min is None else max(r_min, support[0])
        r_max = support[1] if r_max is None else min(r_max, support[1])
    t_lo = math.log(r_min) if r_min is not None else None
    t_hi = math.log(r_max) if r_max is not None else None
    if t_lo is not None and t_hi is not None and t_lo >= t_hi:
        return 0.0

    omega = sphere_area(N)
    cuts = [math.log(b) for b in set(breakpoints) | set(getattr(f, "breakpoints", ())) if b > 0]

    def g(t: np.ndarray) -> np.ndarray:
        with np.errstate(all="ignore"):
            return np.asarray(f(np.exp(t)), dtype=float) * np.exp(N * t)

    scan_lo = t_lo if t_lo is not None else (-40.0 if t_hi is None else min(-40.0, t_hi - 80.0))
    scan_hi = t_hi if t_hi is not None else max(40.0, scan_lo + 80.0)
    ts = np.linspace(scan_lo, scan_hi, int(round((scan_hi - scan_lo) / 0.25)) + 1)
    gs = np.abs(g(ts))
    gs = np.where(np.isfinite(gs), gs, 0.0)
    gmax = float(gs.max())
    if gmax == 0.0:
        return 0.0
    above = np.nonzero(gs > TRUNCATION_RATIO * gmax)[0]
    core_lo = ts[max(above[0] - 1, 0)]
    core_hi = ts[min(above[-1] + 1, ts.size - 1)]

    total = _adaptive(g, _slice_edges(core_lo, core_hi, cuts), 0.5 * tol)

    for direction, edge, limit in ((-1, core_lo, t_lo), (+1, core_hi, t_hi)):
        if limit is not None and edge == limit:
            continue
        if limit is None:
            limit = -T_BUDGET if direction < 0 else T_BUDGET
        slices: list[float] = []
        rising = 0
        while True:
            if (edge - limit) * direction >= 0.0:
                if r_min is None and direction < 0 or r_max is None and direction > 0:
                    raise DivergenceError("integration window exhausted",
                                          omega * total, _ratio(slices))
                break
            nxt = edge + direction
            if (nxt - limit) * direction > 0.0:
                nxt = limit
            a, b = min(edge, nxt), max(edge, nxt)
            s = _adaptive(g, _slice_edges(a, b, cuts), 0.25 * tol, 0.01 * tol * abs(total))
            total += s
            slices.append(s)
            edge = nxt
            g_edge = abs(float(g(np.array([edge]))[0]))
            gmax = max(gmax, g_edge)
            if g_edge <= TRUNCATION_RATIO * gmax and abs(s) <= TRUNCATION_RATIO * gmax:
                break
            q = _ratio(slices)
            if q >= 1.0:
                rising += 1
                if rising >= DIVERGENCE_RUN:
                    raise DivergenceError("integrand does not decay in log r",
                                          omega * total, q)
                continue
            rising = 0
            if len(slices) >= 3 and 0.0 < q < 1.0:
                q_prev = slices[-2] / slices[-3] if slices[-3] != 0.0 else math.nan
                if 0.0 < q_prev < 1.0:
                    tail = s * q / (1.0 - q)
                    tail_prev = s * q_prev / (1.0 - q_prev)
                    if abs(tail - tail_prev) <= 0.1 * tol * abs(total):
                        if abs(b - a) == 1.0:
                            total += tail
                            break
    return omega * total


def _ratio(slices: list[float]) -> float:
    if len(slices) < 2 or slices[-2] == 0.0:
        return math.nan
    return abs(slices[-1] / slices[-2])


# ---------------------------------------------------------------------------
# differentiation


def _ridders(fn, r: np.ndarray, order: int, h0: np.ndarray, levels: int = 6) -> np.ndarray:
    """Central differences extrapolated to h -> 0 (Ridders' scheme)."""

    def central(h):
        if order == 1:
            return (fn(r + h) - fn(r - h)) / (2.0 * h)
        return (fn(r + h) - 2.0 * fn(r) + fn(r - h)) / (h * h)

    table = [[central(h0)]]
    best = table[0][0]
    best_err = np.full(r.shape, np.inf)
    h = h0
    for i in range(1, levels):
        h = h / 2.0
        row = [central(h)]
        fac = 1.0
        for j in range(1, i + 1):
            fac *= 4.0
            row.append((fac * row[j - 1] - table[i - 1][j - 1]) / (fac - 1.0))
            err = np.maximum(np.abs(row[j] - row[j - 1]), np.abs(row[j] - table[i - 1][j - 1]))
            better = err < best_err
            best = np.where(better, row[j], best)
            best_err = np.where(better, err, best_err)
        table.append(row)
    return best


def differentiate(
    f: RadialProfile, order: int, breakpoints: Iterable[float] = ()
) -> RadialProfile:
    """First or second radial derivative of a profile.

    Exact derivatives carried by the profile are used when present (sampled
    profiles carry their spline derivatives).  Otherwise Ridders-extrapolated
    central differences are used, with the step kept clear of the origin and
    of any breakpoint.
    """
    if order not in (1, 2):
        raise ValueError("order must be 1 or 2")
    if f.is_sampled and f.grid.count < 32:
        raise ValueError("grid too coarse for differentiation (need >= 32 nodes)")
    exact = f.d1 if order == 1 else f.d2
    if exact is not None:
        return RadialProfile.analytic(f"d{order}({f.name})", lambda r: exact(_as_array(r)),
                                      breakpoints=f.breakpoints)
    bps = np.array(sorted(set(breakpoints) | set(f.breakpoints)), dtype=float)

    def deriv(r):
        r = _as_array(r)
        h0 = 0.1 * r
        if bps.size:
            dist = np.min(np.abs(r[..., None] - bps), axis=-1)
            h0 = np.minimum(h0, np.maximum(0.5 * dist, 1e-9 * np.maximum(r, 1.0)))
        return _ridders(f.func, r, order, h0)

    return RadialProfile.analytic(f"d{order}({f.name})", deriv, breakpoints=f.breakpoints)
