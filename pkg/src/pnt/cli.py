"""Command-line front end: ``pnt <solve|bench|rates|check-props>``."""
from __future__ import annotations

import argparse
import csv
import logging
import math
import sys
from pathlib import Path

import numpy as np

from . import diagnostics
from .baselines import PgmConfig, pgm_solve
from .data_io import generate_synthetic_logistic, load_libsvm, normalize_rows
from .problems import BUNDLED, bundled_problem, logistic_problem, norm_ray_problem, ray_error_bound_sequence
from .solver import SolverConfig, read_trace_csv, solve

BENCH_COLUMNS = ("solver", "rho", "tol", "outer", "inner_total", "time_s", "status")

_SYNTHETIC_KEYS = {"N": int, "n": int, "seed": int, "sparsity": float, "density": float, "noise": float}

# flag name -> SolverConfig field
_OVERRIDES = {
    "nu": "nu", "varrho": "varrho", "sigma": "sigma", "theta": "theta", "gamma": "gamma",
    "alpha_bar": "alpha_bar", "c": "c_alpha", "C": "C", "max_outer": "max_outer",
    "max_inner": "max_inner", "max_backtracks": "max_backtracks",
}


class UsageError(Exception):
    pass


def _float_list(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _synthetic(text: str) -> dict:
    spec = {}
    for item in text.split(","):
        key, sep, val = item.partition("=")
        key = key.strip()
        if not sep or key not in _SYNTHETIC_KEYS:
            raise argparse.ArgumentTypeError(
                f"bad synthetic entry {item!r}; keys are {', '.join(_SYNTHETIC_KEYS)}")
        spec[key] = _SYNTHETIC_KEYS[key](val)
    if "N" not in spec or "n" not in spec:
        raise argparse.ArgumentTypeError("synthetic spec needs N and n")
    return spec


def _add_data_args(p):
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--data", type=Path, help="LIBSVM file")
    src.add_argument("--synthetic", type=_synthetic, metavar="K=V,...",
                     help="synthetic logistic data, e.g. N=200,n=50,seed=7")
    p.add_argument("--n-features", type=int, help="override the inferred feature count")
    p.add_argument("--no-normalize", action="store_true", help="keep rows unscaled")
    p.add_argument("--lambda", dest="lam", type=float, default=1e-4, help="l1 weight")
    p.add_argument("--x0-file", type=Path, help="initial point (whitespace separated); default zero")


def _add_solver_args(p):
    g = p.add_argument_group("solver overrides")
    g.add_argument("--nu", type=float)
    g.add_argument("--varrho", type=float, help="inexactness exponent (default: rho)")
    g.add_argument("--sigma", type=float)
    g.add_argument("--theta", type=float)
    g.add_argument("--gamma", type=float)
    g.add_argument("--alpha-bar", type=float)
    g.add_argument("--c", type=float, help="coefficient of the ridge schedule")
    g.add_argument("--C", type=float, help="objective ceiling (default 2 F(x0))")
    g.add_argument("--max-outer", type=int)
    g.add_argument("--max-inner", type=int)
    g.add_argument("--max-backtracks", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pnt", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="run the proximal Newton-type solver once")
    _add_data_args(p)
    _add_solver_args(p)
    p.add_argument("--rho", type=float, default=1.0)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--out", type=Path, help="trace CSV path")

    p = sub.add_parser("bench", help="rho x TOL sweep plus the proximal gradient baseline")
    _add_data_args(p)
    _add_solver_args(p)
    p.add_argument("--rho", type=_float_list, default=[0.1, 0.5, 1.0])
    p.add_argument("--tol", type=_float_list, default=[1e-3, 1e-4, 1e-6, 1e-8])
    p.add_argument("--pgm-max-iter", type=int, default=100_000)
    p.add_argument("--out", type=Path, help="comparison table CSV (default stdout)")

    p = sub.add_parser("rates", help="fit the convergence order of a trace")
    p.add_argument("--trace", type=Path, required=True)
    p.add_argument("--threshold", type=float, default=diagnostics.ASYMPTOTIC_THRESHOLD)
    p.add_argument("--out", type=Path, help="report CSV path")

    p = sub.add_parser("check-props", help="sample the residual bounds on a bundled problem")
    p.add_argument("--problem", choices=sorted(BUNDLED), default="rank-deficient-ls")
    p.add_argument("--samples", type=int, default=500)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", type=Path, help="report CSV path")
    return parser


def _load_problem(args):
    if args.lam < 0:
        raise UsageError("--lambda must be nonnegative")
    if args.data is not None:
        if not args.data.exists():
            raise UsageError(f"no such file: {args.data}")
        try:
            data = load_libsvm(args.data, args.n_features, name=args.data.stem)
        except ValueError as exc:
            raise UsageError(f"{args.data}: {exc}") from None
    else:
        data = generate_synthetic_logistic(**args.synthetic)
    if not args.no_normalize:
        data = normalize_rows(data)
    problem = logistic_problem(data, args.lam)
    x0 = None
    if args.x0_file is not None:
        if not args.x0_file.exists():
            raise UsageError(f"no such file: {args.x0_file}")
        x0 = np.atleast_1d(np.loadtxt(args.x0_file, dtype=np.float64))
        if x0.shape != (problem.n,):
            raise UsageError(f"x0 has {x0.size} entries, problem has {problem.n}")
    return problem, x0


def _config(args, rho: float, tol: float) -> SolverConfig:
    kw = {field: getattr(args, flag) for flag, field in _OVERRIDES.items()
          if getattr(args, flag) is not None}
    try:
        return SolverConfig(rho=rho, tol=tol, **kw)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_solve(args) -> int:
    problem, x0 = _load_problem(args)
    report = solve(problem, x0, _config(args, args.rho, args.tol))
    if args.out:
        report.to_csv(args.out)
    print(f"status={report.status.value} outer={report.outer_iters} inner_total={report.inner_total} "
          f"F={report.F:.12g} g_norm={report.g_norm:.3e} time_s={report.wall_time:.3f}")
    return 0 if report.converged else 1


def cmd_bench(args) -> int:
    problem, x0 = _load_problem(args)
    rows, failed = [], False
    for tol in sorted(args.tol, reverse=True):
        for rho in sorted(args.rho):
            rep = solve(problem, x0, _config(args, rho, tol))
            failed |= not rep.converged
            rows.append(("pnt", rho, tol, rep.outer_iters, rep.inner_total, rep.wall_time, rep.status.value))
    for tol in sorted(args.tol, reverse=True):
        rep = pgm_solve(problem, x0, PgmConfig(tol=tol, max_iter=args.pgm_max_iter))
        failed |= not rep.converged
        rows.append(("pgm", math.nan, tol, rep.outer_iters, 0, rep.wall_time, rep.status.value))

    out = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        w = csv.writer(out)
        w.writerow(BENCH_COLUMNS)
        for solver, rho, tol, outer, inner, secs, status in rows:
            w.writerow([solver, "" if math.isnan(rho) else f"{rho:g}", f"{tol:g}", outer, inner,
                        f"{secs:.4f}", status])
    finally:
        if args.out:
            out.close()
    return 1 if failed else 0


def cmd_rates(args) -> int:
    if not args.trace.exists():
        raise UsageError(f"no such file: {args.trace}")
    rows = read_trace_csv(args.trace)
    try:
        residuals = [float(r["g_norm"]) for r in rows]
    except (KeyError, ValueError):
        raise UsageError(f"{args.trace} has no numeric g_norm column") from None
    try:
        fit = diagnostics.fit_convergence_order(residuals, threshold=args.threshold)
    except diagnostics.DiagnosticError as exc:
        print(f"no fit: {exc}", file=sys.stderr)
        return 1
    lo, hi = fit.window
    print(f"p={round(fit.order, 6)!r} log_constant={fit.log_constant:.6g} "
          f"r_squared={fit.r_squared:.6f} window={lo}:{hi}")
    if args.out:
        diagnostics.write_report_csv([diagnostics.rate_row(args.trace.stem, fit)], args.out)
    return 0


def cmd_check_props(args) -> int:
    witness = None
    if args.problem == "norm-ray":
        problem, c, desc = norm_ray_problem()
        witness = ray_error_bound_sequence(c)
    else:
        problem, desc = bundled_problem(args.problem)
    scan = diagnostics.scan_proposition_bounds(problem, desc, args.samples, args.seed, witness)
    for name, ratio in scan.max_ratio.items():
        print(f"{name}: max_ratio={ratio:.6g} violations={scan.violations[name]}")
    print(f"fitted_kappa={scan.fitted_kappa:.6g}")
    if scan.witness_ratios:
        print("error_bound_ratio_growth=" + ",".join(f"{r:.4g}" for r in scan.witness_ratios))
    if args.out:
        diagnostics.write_report_csv(scan.rows(), args.out)
    return 1 if scan.hard_violations else 0


COMMANDS = {"solve": cmd_solve, "bench": cmd_bench, "rates": cmd_rates, "check-props": cmd_check_props}


def run_cli(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"pnt {args.command}: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
