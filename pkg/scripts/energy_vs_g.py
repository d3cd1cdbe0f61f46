"""Harmonic and exact ground-state energies against g, plus the g -> 0 limit."""
from _common import LOG_G, parser, run

from triobose.exact import energy_limit_g0

if __name__ == "__main__":
    args = parser(__doc__).parse_args()
    gs = ",".join(str(g) for g in LOG_G)
    run(args.out_dir, "energy_vs_g.csv", "energy", "--g", gs, "--exact", "--solver-points", str(args.solver_points))
    print(f"extrapolated g -> 0 energy: {energy_limit_g0():.4f}")
