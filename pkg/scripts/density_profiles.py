"""One-particle densities from the approximate and exact wavefunctions."""
from _common import parser, run

if __name__ == "__main__":
    p = parser(__doc__)
    p.add_argument("--g", default="20,200", help="comma separated couplings")
    args = p.parse_args()
    for g in args.g.split(","):
        for source in ("approx", "asymptotic", "exact"):
            run(args.out_dir, f"density_g{g}_{source}.csv", "density", "--g", g, "--source", source,
                "--solver-points", str(args.solver_points))
