"""Sample the residual/distance bounds on the instances with known solution sets."""
from pnt.diagnostics import scan_proposition_bounds
from pnt.problems import BUNDLED, bundled_problem, norm_ray_problem, ray_error_bound_sequence


def main():
    for name in sorted(BUNDLED):
        witness = None
        if name == "norm-ray":
            problem, c, desc = norm_ray_problem()
            witness = ray_error_bound_sequence(c)
        else:
            problem, desc = bundled_problem(name)
        scan = scan_proposition_bounds(problem, desc, 500, seed=0, witness=witness)
        print(f"{name}: kappa={scan.fitted_kappa:.4g} violations={scan.hard_violations}")
        for bound, ratio in scan.max_ratio.items():
            print(f"  {bound:18s} max ratio {ratio:.4g}")
        if scan.witness_ratios:
            print("  dist/|G| along the witness sequence: " + ", ".join(f"{v:.3g}" for v in scan.witness_ratios))


if __name__ == "__main__":
    main()
