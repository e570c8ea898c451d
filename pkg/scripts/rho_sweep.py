"""Outer/inner iteration counts and wall time across rho and TOL, plus the PGM baseline.

    python3 scripts/rho_sweep.py [--lam 1e-3] [--seed 7] [--out sweep.csv]
"""
import argparse
import csv
import sys

from pnt.baselines import PgmConfig, pgm_solve
from pnt.problems import synthetic_logistic_problem
from pnt.solver import SolverConfig, solve


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--lam", type=float, default=1e-3)
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--out")
    args = ap.parse_args()

    problem = synthetic_logistic_problem(seed=args.seed, lam=args.lam)
    solve(problem, None, SolverConfig(tol=1e-4))  # compile the kernels outside the timings
    rows = []
    for tol in (1e-4, 1e-6, 1e-8):
        for rho in (0.1, 0.5, 1.0):
            rep = solve(problem, None, SolverConfig(rho=rho, tol=tol))
            rows.append(("pnt", rho, tol, rep.outer_iters, rep.inner_total, f"{rep.wall_time:.4f}", rep.status.value))
        rep = pgm_solve(problem, None, PgmConfig(tol=tol))
        rows.append(("pgm", "", tol, rep.outer_iters, 0, f"{rep.wall_time:.4f}", rep.status.value))

    out = open(args.out, "w", newline="") if args.out else sys.stdout
    w = csv.writer(out)
    w.writerow(("solver", "rho", "tol", "outer", "inner_total", "time_s", "status"))
    w.writerows(rows)
    if args.out:
        out.close()


if __name__ == "__main__":
    main()
