"""Three leading occupancies against g with both limits."""
from _common import LOG_G, parser, run

if __name__ == "__main__":
    args = parser(__doc__).parse_args()
    gs = ",".join(str(g) for g in LOG_G)
    run(args.out_dir, "occupancies_vs_g.csv", "sweep", "--g-list", gs, "--outputs", "exact,occupancies",
        "--solver-points", str(args.solver_points))
    run(args.out_dir, "occupancies_g0_limit.csv", "occupancies", "--g0-limit")
    run(args.out_dir, "occupancies_asymptotic.csv", "occupancies", "--asymptotic")
