"""Solve the benchmark instance to 1e-12 and fit the local convergence order per rho."""
from pnt.diagnostics import DiagnosticError, fit_convergence_order
from pnt.problems import synthetic_logistic_problem
from pnt.solver import SolverConfig, solve


def main():
    problem = synthetic_logistic_problem()
    for rho in (0.1, 0.5, 1.0):
        rep = solve(problem, None, SolverConfig(rho=rho, tol=1e-12))
        r = rep.residuals()
        try:
            fit = fit_convergence_order(r)
        except DiagnosticError as exc:
            print(f"rho={rho}: no fit ({exc})")
            continue
        lo, hi = fit.window
        print(f"rho={rho}: outer={rep.outer_iters} p={fit.order:.3f} R2={fit.r_squared:.4f} "
              f"window={lo}:{hi} residuals " + " ".join(f"{v:.2e}" for v in r[lo:hi]))


if __name__ == "__main__":
    main()
