"""Command-line entry point.

Every subcommand prints a JSON report (or CSV with ``--format csv``) that
echoes the resolved run configuration.  Exit codes: 0 success, 1 usage or
parameter error, 2 divergence suspected (partial data is still printed).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from . import bounds as bd
from . import functionals as fn
from . import inequalities as ineq
from . import optimize as opt
from . import planar
from .modes import (NoSquareIntegrableModeError, ZeroMode, family_historical, family_power,
                    family_step)
from .radial import DEFAULT_TOL, DivergenceError, RadialProfile

EXIT_OK, EXIT_USAGE, EXIT_DIVERGENCE = 0, 1, 2
CUTOFFS = (1e-2, 1e-4, 1e-6, 1e-8, 1e-10)
# Power-family parameters reported to give K_l = 0.1308 z.
POWER_REFERENCE = (2.77, 0.594)
DIAMAGNETIC_C = 2.0
STEP_ORDER_FLOOR = 2.0
GAUGE_SHIFT = 1e-3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """Exits with status 1 (not argparse's 2, which is reserved for divergence)."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@dataclass
class RunConfig:
    subcommand: str
    z: float = 1.0
    tol: float = DEFAULT_TOL
    grid_L: float = 8.0
    grid_M: int = 257
    out: str | None = None
    format: str = "json"
    options: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# helpers


def _config(args) -> RunConfig:
    common = {"subcommand", "z", "tol", "grid_L", "grid_M", "out", "format", "handler"}
    options = {k: v for k, v in vars(args).items() if k not in common}
    return RunConfig(subcommand=args.subcommand, z=args.z, tol=args.tol, grid_L=args.grid_L,
                     grid_M=args.grid_M, out=args.out, format=args.format, options=options)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        obj = obj.item()
    if isinstance(obj, float) and not math.isfinite(obj):
        return None if math.isnan(obj) else ("inf" if obj > 0 else "-inf")
    return obj


def _flatten(obj, prefix=""):
    if isinstance(obj, dict):
        for k, v in obj.items():
            yield from _flatten(v, f"{prefix}{k}.")
    elif isinstance(obj, list):
        for i, v in enumerate(obj):
            yield from _flatten(v, f"{prefix}{i}.")
    else:
        yield prefix[:-1], obj


def _render(report: dict, fmt: str) -> str:
    report = _jsonable(report)
    if fmt == "json":
        return json.dumps(report, indent=2) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["key", "value"])
    w.writerows(_flatten(report))
    return buf.getvalue()


def _write(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc}") from exc


def _emit(cfg: RunConfig, report: dict) -> None:
    _write(_render({"config": asdict(cfg), **report}, cfg.format), cfg.out)


def _build_mode(args, normalize_mode: bool = True) -> ZeroMode:
    family = args.family
    try:
        if family == "historical":
            return family_historical()
        if family == "step":
            return family_step(args.b, normalize_mode=normalize_mode, tol=args.tol)
        if family == "power":
            return family_power(args.alpha, args.beta, normalize_mode=normalize_mode, tol=args.tol)
    except (ValueError, NoSquareIntegrableModeError) as exc:
        raise UsageError(str(exc)) from exc
    raise UsageError(f"unknown family {family!r}")


def _cutoff_table(mode: ZeroMode, z: float, tol: float) -> list[dict]:
    rows = []
    for r_min in CUTOFFS:
        try:
            rows.append({"r_min": r_min, "magnetic32": fn.magnetic_energy(mode, 1.5, tol, r_min),
                         "kl_over_z": fn.kl(mode, z, tol, r_min) / z})
        except DivergenceError:
            rows.append({"r_min": r_min, "magnetic32": None, "kl_over_z": None})
    return rows


def _divergence_report(mode: ZeroMode, z: float, tol: float, exc: DivergenceError) -> dict:
    return {
        "status": "divergence_suspected",
        "message": str(exc),
        "partial_sum": exc.partial_sum,
        "ratio": exc.ratio,
        "coulomb": fn.coulomb(mode, tol),
        "l2": fn.l2_norm_sq(mode, tol),
        "cutoff_sensitivity": _cutoff_table(mode, z, tol),
    }


def _check(name: str, value, threshold, passed: bool, **extra) -> dict:
    return {"name": name, "value": value, "threshold": threshold, "passed": bool(passed), **extra}


# ---------------------------------------------------------------------------
# subcommands


def cmd_kl(args, cfg: RunConfig) -> int:
    mode = _build_mode(args)
    try:
        rep = fn.functional_report(mode, args.p, args.tol, args.r_min)
    except DivergenceError as exc:
        _emit(cfg, {"family": args.family, "params": mode.params,
                    **_divergence_report(mode, args.z, args.tol, exc)})
        return EXIT_DIVERGENCE
    report = {"family": args.family, "params": mode.params, "status": "ok", **rep.to_dict()}
    if args.family == "step":
        report["kl_quadrature"] = rep.kl_over_z
        report["kl_paper_form"] = fn.kl_step_paper_form(args.b)
        report["closed_forms_unit_amplitude"] = fn.step_closed_forms(args.b)
    _emit(cfg, report)
    return EXIT_OK


def cmd_bounds(args, cfg: RunConfig) -> int:
    try:
        rep = bd.bound_report(args.L2, args.L3, args.alpha)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    _emit(cfg, {"status": "ok", **rep.to_dict()})
    return EXIT_OK


def cmd_scan(args, cfg: RunConfig) -> int:
    try:
        table = opt.scan_step_family(args.lo, args.hi, args.steps, args.z, args.tol, args.workers)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    summary = _render({"config": asdict(cfg), "status": "ok", **table.summary()}, "json")
    if args.out is None:
        sys.stdout.write(table.to_csv())
        sys.stderr.write(summary)
    else:
        _write(table.to_csv(), args.out)
        sys.stdout.write(summary)
    return EXIT_OK


def cmd_optimize(args, cfg: RunConfig) -> int:
    if args.family == "step":
        try:
            b_q, k_q = opt.golden_max(lambda b: fn.kl(family_step(b, tol=args.tol), 1.0, args.tol),
                                      args.lo, args.hi, args.opt_tol)
            b_p, k_p = opt.golden_max(fn.kl_step_paper_form, args.lo, args.hi, args.opt_tol)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
        _emit(cfg, {"status": "ok", "family": "step",
                    "quadrature": {"b": b_q, "kl_over_z": k_q},
                    "paper_form": {"b": b_p, "kl_over_z": k_p}})
        return EXIT_OK
    if args.family != "power":
        raise UsageError("optimize supports --family step or power")
    objective = opt.power_family_objective(1.0, args.r_min, args.tol)
    try:
        res = opt.nelder_mead_max(objective, args.init, args.opt_tol, args.max_iters)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    ref = family_power(*POWER_REFERENCE, tol=args.tol)
    try:
        ref_report = {"status": "ok", "kl_over_z": fn.kl(ref, 1.0, args.tol)}
    except DivergenceError as exc:
        ref_report = _divergence_report(ref, 1.0, args.tol, exc)
    _emit(cfg, {"status": "ok", "family": "power", "r_min": args.r_min,
                "optimum": {"alpha": res.params[0], "beta": res.params[1],
                            "kl_over_z": res.value, "iterations": res.iterations},
                "reference": {"alpha": POWER_REFERENCE[0], "beta": POWER_REFERENCE[1],
                              **ref_report}})
    return EXIT_OK


def cmd_el_residual(args, cfg: RunConfig) -> int:
    mode = _build_mode(args)
    try:
        coef, profile, norm = fn.el_residual(mode, args.tol, args.r_lo, args.r_hi)
    except DivergenceError as exc:
        _emit(cfg, {"family": args.family, **_divergence_report(mode, args.z, args.tol, exc)})
        return EXIT_DIVERGENCE
    r = np.geomspace(args.r_lo, args.r_hi, args.samples)
    report = {"status": "ok", "family": args.family, "params": mode.params,
              "coefficients": asdict(coef), "residual_norm": norm,
              "window": [args.r_lo, args.r_hi]}
    if cfg.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["r", "residual"])
        w.writerows(zip(r.tolist(), np.asarray(profile(r)).tolist()))
        _write(buf.getvalue(), cfg.out)
        sys.stderr.write(_render({"config": asdict(cfg), **report}, "json"))
    else:
        _emit(cfg, report)
    return EXIT_OK


# verify suites ---------------------------------------------------------------


def _suite_zeromode(args) -> list[dict]:
    mode = _build_mode(args)
    L, M = args.grid_L, args.grid_M
    coarse_M = (M + 1) // 2
    fine = planar.sample(mode, L, M)
    coarse = planar.sample(mode, L, coarse_M)
    r_fine, r_coarse = planar.pauli_residual(fine), planar.pauli_residual(coarse)
    grad = planar.gradient_norm(fine)
    ratio = r_coarse / r_fine
    checks = []
    if mode.breakpoints:
        checks.append(_check("convergence_ratio", ratio, [STEP_ORDER_FLOOR, None],
                             ratio >= STEP_ORDER_FLOOR, M=[coarse_M, M]))
    else:
        checks.append(_check("convergence_ratio", ratio, [3.5, 4.5], 3.5 <= ratio <= 4.5,
                             M=[coarse_M, M]))
    checks.append(_check("relative_residual", r_fine / grad, 1e-3, r_fine / grad < 1e-3,
                         residual=r_fine, grad_norm=grad))
    flipped = planar.replace(fine, A=-fine.A)
    r_flip = planar.pauli_residual(flipped)
    checks.append(_check("negated_potential_residual", r_flip / grad, 0.1, r_flip / grad > 0.1))
    gauge = planar.pauli_residual(planar.gauge_transform(fine, GAUGE_SHIFT))
    checks.append(_check("gauge_covariance", abs(gauge - r_fine), 1e-8,
                         abs(gauge - r_fine) <= 1e-8, c=GAUGE_SHIFT))
    return checks


def _gaussian_fields(L: float, M: int) -> planar.PlanarFieldSet:
    f = RadialProfile.analytic("exp(-r^2)", lambda r: np.exp(-r * r))
    zero = RadialProfile.analytic("0", lambda r: np.zeros_like(r))
    return planar.sample_profiles(f, zero, zero, L, M)


def _suite_diamagnetic(args) -> list[dict]:
    L, M = args.grid_L, args.grid_M
    cases = [args.family] if args.family else ["historical", "step", "gaussian"]
    checks = []
    for case in cases:
        if case == "gaussian":
            fields = _gaussian_fields(L, M)
        else:
            ns = argparse.Namespace(**{**vars(args), "family": case})
            if case == "step" and args.family is None:
                ns.b = 4.0
            fields = planar.sample(_build_mode(ns), L, M)
        tol = DIAMAGNETIC_C * fields.h ** 2
        min_slack, slack = planar.diamagnetic_slack(fields)
        if case == "gaussian":
            checks.append(_check("gaussian_violation_detected", min_slack, -tol, min_slack < -tol,
                                 expected=-2.0 * math.exp(-1.0)))
        else:
            checks.append(_check(f"{case}_min_slack", min_slack, -tol, min_slack >= -tol,
                                 h=fields.h, C=DIAMAGNETIC_C))
        if args.slack_csv and len(cases) == 1:
            planar.write_slack_csv(args.slack_csv, fields, slack)
    return checks


def _suite_projector(args) -> list[dict]:
    rep = planar.projector_checks(args.n_random, args.seed)
    return [
        _check("idempotence", rep["idempotence_dev"], 1e-14, rep["idempotence_dev"] <= 1e-14),
        _check("hermitian", rep["hermitian_dev"], 1e-14, rep["hermitian_dev"] <= 1e-14),
        _check("half_norm", rep["norm_dev"], 1e-12, rep["norm_dev"] <= 1e-12,
               cases=rep["cases"], seed=rep["seed"]),
        _check("unit_case", rep["first_case_norm_sq"], 0.5,
               abs(rep["first_case_norm_sq"] - 0.5) <= 1e-14),
    ]


def _suite_inequalities(args) -> list[dict]:
    checks = []
    for N in (2, 3):
        r = ineq.named_inequality("heisenberg", ineq.gaussian(), N, args.tol)
        rel = abs(r.slack) / r.lhs
        checks.append(_check(f"gaussian_saturates_heisenberg_N{N}", rel, 1e-6, rel <= 1e-6))
    r = ineq.named_inequality("hydrogen", ineq.exponential(), 2, args.tol)
    rel = abs(r.slack) / r.lhs
    checks.append(_check("exponential_saturates_hydrogen_N2", rel, 1e-6, rel <= 1e-6))
    results = ineq.verify_random(args.n_random, args.seed, args.tol)
    for kind in ineq.MIN_DIMENSION:
        rel = [res.slack / res.lhs for res in results if res.kind == kind]
        ok = sum(v >= -1e-8 for v in rel)
        checks.append(_check(f"random_{kind}", min(rel), -1e-8, ok == len(rel),
                             passed_cases=ok, cases=len(rel)))
    return checks


def _suite_stability(args) -> list[dict]:
    alphas = np.linspace(0.0, 1.0, 21)
    xs = np.linspace(0.0, 10.0, 41)
    A, X = np.meshgrid(alphas, xs, indexing="ij")
    checks = []
    for p in (1.6, 1.75, 2.0):
        slack = bd.f_p(p, 1.0, 1.0, A, X) - bd.stability_envelope(p, 1.0, 1.0, X)
        worst = float(slack.min())
        checks.append(_check(f"envelope_p{p:g}", worst, -1e-12, worst >= -1e-12))
    return checks


def _suite_el(args) -> list[dict]:
    mode = _build_mode(args)
    coef, profile, norm = fn.el_residual(mode, args.tol)
    checks = [_check("coefficients_positive", asdict(coef), 0.0,
                     min(coef.alpha, coef.beta, coef.gamma) > 0)]
    if args.family == "historical":
        checks.append(_check("historical_not_critical", norm, 0.0, norm > 0))
    c = 3.0
    scaled = mode.with_norm(c * mode.norm, normalized=False)
    _, profile_c, _ = fn.el_residual(scaled, args.tol)
    r = np.geomspace(0.05, 20.0, 25)
    r = r[np.all([np.abs(r - x) > 0.01 for x in mode.breakpoints], axis=0)] \
        if mode.breakpoints else r
    dev = float(np.max(np.abs(profile_c(r) - c ** 4 * profile(r)) / (c ** 4 * np.abs(profile(r)))))
    checks.append(_check("homogeneity_c4", dev, 1e-6, dev <= 1e-6, c=c))
    return checks


SUITES = {
    "zeromode": _suite_zeromode,
    "diamagnetic": _suite_diamagnetic,
    "projector": _suite_projector,
    "inequalities": _suite_inequalities,
    "stability": _suite_stability,
    "el": _suite_el,
}


def cmd_verify(args, cfg: RunConfig) -> int:
    if args.family is None and args.suite in ("zeromode", "el"):
        args.family = "historical"
        cfg.options["family"] = "historical"
    t0 = time.perf_counter()
    checks = SUITES[args.suite](args)
    passed = all(c["passed"] for c in checks)
    _emit(cfg, {"suite": args.suite, "passed": passed, "checks": checks,
                "seconds": time.perf_counter() - t0})
    return EXIT_OK if passed else EXIT_USAGE


# ---------------------------------------------------------------------------
# parser


def _positive_float(text: str) -> float:
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return v


def _add_family(p, required=False, choices=("historical", "power", "step")):
    p.add_argument("--family", choices=choices, required=required, default=None)
    p.add_argument("--alpha", type=float, default=2.77, help="power family exponent")
    p.add_argument("--beta", type=float, default=0.594, help="power family exponent")
    p.add_argument("--b", type=float, default=2.82, help="step field strength")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--z", type=_positive_float, default=1.0, help="nuclear charge")
    common.add_argument("--tol", type=float, default=DEFAULT_TOL, help="quadrature tolerance")
    common.add_argument("--grid-L", dest="grid_L", type=_positive_float, default=8.0)
    common.add_argument("--grid-M", dest="grid_M", type=int, default=257)
    common.add_argument("--out", default=None, help="write the report here instead of stdout")
    common.add_argument("--format", choices=("json", "csv"), default="json")

    parser = _Parser(prog="zeromodes", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)

    p = sub.add_parser("kl", parents=[common], help="functionals and K_l of one mode")
    _add_family(p, required=True)
    p.add_argument("--p", type=float, default=1.5, help="exponent of the magnetic energy")
    p.add_argument("--r-min", dest="r_min", type=_positive_float, default=None,
                   help="inner cutoff for the magnetic energy")
    p.set_defaults(handler=cmd_kl)

    p = sub.add_parser("bounds", parents=[common], help="Sobolev and critical-coupling bounds")
    p.add_argument("--L2", type=float, default=bd.L2_DEFAULT)
    p.add_argument("--L3", type=float, default=bd.L3_DEFAULT)
    p.add_argument("--alpha", type=float, default=bd.ALPHA_DEFAULT, help="fine-structure constant")
    p.set_defaults(handler=cmd_bounds)

    p = sub.add_parser("scan", parents=[common], help="K(b) table for the step field")
    p.add_argument("--lo", type=float, default=2.05)
    p.add_argument("--hi", type=float, default=6.0)
    p.add_argument("--steps", type=int, default=400)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(handler=cmd_scan)

    p = sub.add_parser("optimize", parents=[common], help="maximize K_l over a family")
    p.add_argument("--family", choices=("step", "power"), required=True)
    p.add_argument("--lo", type=float, default=2.05)
    p.add_argument("--hi", type=float, default=6.0)
    p.add_argument("--init", type=float, nargs=2, default=[2.0, 1.0], metavar=("ALPHA", "BETA"))
    p.add_argument("--r-min", dest="r_min", type=_positive_float, default=1e-6)
    p.add_argument("--opt-tol", dest="opt_tol", type=_positive_float, default=1e-6)
    p.add_argument("--max-iters", dest="max_iters", type=int, default=500)
    p.set_defaults(handler=cmd_optimize)

    p = sub.add_parser("verify", parents=[common], help="run a verification battery")
    p.add_argument("--suite", choices=tuple(SUITES), required=True)
    _add_family(p)
    p.add_argument("--n-random", dest="n_random", type=int, default=100)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--slack-csv", dest="slack_csv", default=None,
                   help="dump the diamagnetic slack field (single family only)")
    p.set_defaults(handler=cmd_verify)

    p = sub.add_parser("el-residual", parents=[common], help="Euler-Lagrange residual of a mode")
    _add_family(p, required=True)
    p.add_argument("--r-lo", dest="r_lo", type=_positive_float, default=1e-2)
    p.add_argument("--r-hi", dest="r_hi", type=_positive_float, default=1e2)
    p.add_argument("--samples", type=int, default=200, help="rows in the CSV profile")
    p.set_defaults(handler=cmd_el_residual)
    return parser


def _finalize(args) -> None:
    if not 1e-14 <= args.tol <= 1e-4:
        raise UsageError("--tol must lie in [1e-14, 1e-4]")
    if args.grid_M < planar.MIN_RESOLUTION or args.grid_M % 2 == 0:
        raise UsageError(f"--grid-M must be odd and >= {planar.MIN_RESOLUTION}")
    if getattr(args, "suite", None) is not None and args.seed is None:
        args.seed = planar.PROJECTOR_SEED if args.suite == "projector" else ineq.RANDOM_SEED


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _finalize(args)
        return args.handler(args, _config(args))
    except UsageError as exc:
        sys.stderr.write(f"zeromodes {args.subcommand}: error: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
