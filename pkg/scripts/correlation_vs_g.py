"""Degree of correlation K from the exact and approximate wavefunctions."""
from _common import LOG_G, parser, run

if __name__ == "__main__":
    args = parser(__doc__).parse_args()
    gs = ",".join(str(g) for g in LOG_G)
    run(args.out_dir, "correlation_vs_g.csv", "sweep", "--g-list", gs, "--outputs", "exact,K",
        "--solver-points", str(args.solver_points))
    run(args.out_dir, "correlation_asymptotic.csv", "asymptotic")
