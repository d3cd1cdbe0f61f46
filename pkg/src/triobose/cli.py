"""Command-line front end: ``triobose <command> [options]``.

Every command writes a table (CSV by default, or JSON with ``config`` and
``rows`` keys) to ``--out`` or stdout. All values are in oscillator units.
Exit codes: 0 success, 1 some rows failed, 2 invalid arguments.

Sweep columns, in order (only the selected groups appear):
    g, E_harmonic, E_exact, E_exact_grid, K_approx, K_exact, lambda0, lambda1, lambda2
"""
from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import math
import sys
from dataclasses import dataclass, field

import numpy as np

from . import exact, rdm, spectral
from .model import CouplingError, energy_harmonic, equilibrium

COMMANDS = ("energy", "density", "occupancies", "asymptotic", "exact", "sweep")
SOURCES = ("approx", "asymptotic", "exact", "g0")


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    g: list[float] = field(default_factory=list)
    count: int = 3
    grid_min: float | None = None
    grid_max: float | None = None
    grid_points: int = 601
    solver_points: int = 512
    quad_L: float = 8.0
    quad_n: int = 200
    source: str = "approx"
    exact: bool = False
    outputs: list[str] = field(default_factory=lambda: list(exact.SWEEP_OUTPUTS))
    format: str = "csv"
    out: str | None = None

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        if self.format not in ("csv", "json"):
            raise ConfigError("format must be csv or json")
        if self.source not in SOURCES:
            raise ConfigError(f"source must be one of {SOURCES}")
        for g in self.g:
            if not (math.isfinite(g) and g > 0):
                raise ConfigError(f"every coupling must satisfy g > 0, got {g}")
        if self.count < 1:
            raise ConfigError("count must be >= 1")
        if self.grid_points < 2:
            raise ConfigError("grid-points must be >= 2")
        if self.grid_min is not None and self.grid_max is not None and not self.grid_min < self.grid_max:
            raise ConfigError("grid-min must be below grid-max")
        if self.solver_points < 64:
            raise ConfigError("solver-points must be >= 64")
        if not self.quad_L > 0 or self.quad_n < 2:
            raise ConfigError("quadrature needs quad-L > 0 and quad-n >= 2")
        bad = set(self.outputs) - set(exact.SWEEP_OUTPUTS)
        if bad:
            raise ConfigError(f"unknown outputs {sorted(bad)}")

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - names
        if unknown:
            raise ConfigError(f"unknown config keys {sorted(unknown)}")
        return cls(**data)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


# -- formatting -----------------------------------------------------------------


def fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.12g}"
    return "" if v is None else str(v)


def _json_value(v):
    if isinstance(v, (float, np.floating)):
        v = float(f"{float(v):.12g}")
        return v if math.isfinite(v) else None
    if isinstance(v, np.integer):
        return int(v)
    return v


def _columns(rows: list[dict]) -> list[str]:
    cols: list[str] = []
    for r in rows:
        for k in r:
            if k not in cols:
                cols.append(k)
    if "error" in cols:
        cols.remove("error")
        cols.append("error")
    return cols


def render(rows: list[dict], cfg: RunConfig, headers: dict | None = None) -> str:
    if cfg.format == "json":
        payload = {"config": cfg.to_dict(), "rows": [{k: _json_value(v) for k, v in r.items()} for r in rows]}
        return json.dumps(payload, indent=2, sort_keys=False) + "\n"
    cols = _columns(rows)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([(headers or {}).get(c, c) for c in cols])
    for r in rows:
        w.writerow([fmt(r.get(c)) for c in cols])
    return buf.getvalue()


# -- commands ---------------------------------------------------------------------


def cmd_energy(cfg: RunConfig) -> tuple[list[dict], bool]:
    rows, failed = [], False
    for g in cfg.g:
        row = {"g": g, "E_harmonic": energy_harmonic(g)}
        if cfg.exact:
            try:
                sol = exact.solve_exact_extrapolated(g, exact.GridSpec.default(g, cfg.solver_points))
                row["E_exact"] = sol.energy_extrapolated
            except exact.SolverError as exc:
                row["E_exact"] = None
                row["error"] = str(exc)
                failed = True
        rows.append(row)
    return rows, failed


def _density_grid(cfg: RunConfig, g: float | None) -> np.ndarray:
    reach = (equilibrium(g).x_c if g else 0.0) + 6.0
    lo = -reach if cfg.grid_min is None else cfg.grid_min
    hi = reach if cfg.grid_max is None else cfg.grid_max
    if not lo < hi:
        raise ConfigError("grid-min must be below grid-max")
    return np.linspace(lo, hi, cfg.grid_points)


def cmd_density(cfg: RunConfig) -> tuple[list[dict], bool]:
    g = _single_g(cfg)
    grid = _density_grid(cfg, g)
    if cfg.source == "approx":
        n = rdm.density(rdm.rdm_finite(g), grid).values
    elif cfg.source == "asymptotic":
        n = rdm.density(rdm.assemble_asymptotic_total(g), grid).values
    elif cfg.source == "exact":
        sol = exact.solve_exact(g, exact.GridSpec.default(g, cfg.solver_points))
        sk = exact.exact_rdm(sol, half_width=max(abs(grid[0]), abs(grid[-1])))
        n = np.interp(grid, sk.nodes, sk.density(), left=0.0, right=0.0)
    else:
        raise ConfigError("density source must be approx, asymptotic or exact")
    return [{"x": float(x), "n": float(v)} for x, v in zip(grid, n)], False


def cmd_occupancies(cfg: RunConfig) -> tuple[list[dict], bool]:
    if cfg.source == "asymptotic":
        rep = spectral.asymptotic_occupancies(cfg.count, spectral.build_quadrature(cfg.quad_L, cfg.quad_n))
    elif cfg.source == "g0":
        rep = spectral.g0_occupancies(cfg.count)
    elif cfg.source == "approx":
        g = _single_g(cfg)
        rep = spectral.finite_g_occupancies(g, cfg.count)
    else:
        g = _single_g(cfg)
        sol = exact.solve_exact(g, exact.GridSpec.default(g, cfg.solver_points))
        rep = exact.exact_occupancies(sol, cfg.count)
    labels = rep.merged_labels or tuple(str(l) for l in range(len(rep.merged)))
    return [{"l": l, "lambda": v, "orbital": lab} for l, (v, lab) in enumerate(zip(rep.merged, labels))], False


def cmd_asymptotic(cfg: RunConfig) -> tuple[list[dict], bool]:
    rule = spectral.build_quadrature(cfg.quad_L, cfg.quad_n)
    rho1, rho_t = rdm.rdm_asymptotic()
    rep = spectral.asymptotic_occupancies(cfg.count, rule)
    rows = []
    for name, k in (("rho1", rho1), ("rho_tilde", rho_t)):
        c, a, b = rdm.single_exponential_form(k)
        rows += [
            {"quantity": f"{name}.coeff", "value": c},
            {"quantity": f"{name}.diag_exponent", "value": -a},
            {"quantity": f"{name}.cross_exponent", "value": b},
            {"quantity": f"{name}.trace", "value": k.trace()},
        ]
    rows += [{"quantity": f"lambda1_{l}", "value": v} for l, v in enumerate(rep.lambda1)]
    rows += [{"quantity": f"lambda2_{l}", "value": v} for l, v in enumerate(rep.lambda2)]
    rows += [
        {"quantity": "residual_mass", "value": rep.residual_mass},
        {"quantity": "conservation_residual", "value": rep.conservation_residual},
        {"quantity": "K", "value": rep.K},
        {"quantity": "L", "value": rep.L},
    ]
    return rows, False


def cmd_exact(cfg: RunConfig) -> tuple[list[dict], bool]:
    rows, failed = [], False
    for g in cfg.g:
        row: dict = {"g": g}
        try:
            sol = exact.solve_exact_extrapolated(g, exact.GridSpec.default(g, cfg.solver_points))
            occ = exact.exact_occupancies(sol, cfg.count)
            row.update(E_exact=sol.energy_extrapolated, E_exact_grid=sol.energy, E_harmonic=energy_harmonic(g), K_exact=occ.K)
            row.update({f"lambda{l}": v for l, v in enumerate(occ.merged)})
        except exact.SolverError as exc:
            row["error"] = str(exc)
            failed = True
        rows.append(row)
    return rows, failed


def cmd_sweep(cfg: RunConfig) -> tuple[list[dict], bool]:
    if not cfg.g:
        raise ConfigError("sweep needs --g-list")
    rows = exact.sweep(cfg.g, cfg.outputs, cfg.solver_points, on_error="mark")
    return rows, any("error" in r for r in rows)


HANDLERS = {
    "energy": cmd_energy,
    "density": cmd_density,
    "occupancies": cmd_occupancies,
    "asymptotic": cmd_asymptotic,
    "exact": cmd_exact,
    "sweep": cmd_sweep,
}
HEADERS = {"density": {"x": "x_osc", "n": "n_per_osc"}}


def _single_g(cfg: RunConfig) -> float:
    if len(cfg.g) != 1:
        raise ConfigError(f"{cfg.command} needs exactly one --g value")
    return cfg.g[0]


# -- argument parsing -------------------------------------------------------------


def _g_values(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"cannot parse coupling list {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--g", type=_g_values, default=None, help="coupling(s), comma separated")
    common.add_argument("--g-list", type=_g_values, default=None, help="alias of --g for sweeps")
    common.add_argument("--count", type=int, default=3)
    common.add_argument("--grid-min", type=float, default=None)
    common.add_argument("--grid-max", type=float, default=None)
    common.add_argument("--grid-points", type=int, default=601, help="output grid points (density)")
    common.add_argument("--solver-points", type=int, default=512, help="exact solver lattice points per axis")
    common.add_argument("--quad-L", type=float, default=8.0, help="Gauss-Legendre half width")
    common.add_argument("--quad-n", type=int, default=200, help="Gauss-Legendre node count")
    common.add_argument("--source", choices=SOURCES, default=None)
    common.add_argument("--exact", action="store_true", help="also run the exact solver")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--out", default=None, help="output file (default stdout)")

    p = argparse.ArgumentParser(prog="triobose", description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("energy", parents=[common], help="harmonic (and exact) ground-state energies")
    sub.add_parser("density", parents=[common], help="one-particle density n(x) = 3 rho(x, x)")
    occ = sub.add_parser("occupancies", parents=[common], help="natural orbital occupancies")
    occ.add_argument("--asymptotic", action="store_true", help="g -> infinity occupancies")
    occ.add_argument("--g0-limit", action="store_true", help="g -> 0+ occupancies")
    sub.add_parser("asymptotic", parents=[common], help="asymptotic kernels, occupancies and K")
    sub.add_parser("exact", parents=[common], help="exact solver energy, K and occupancies")
    sw = sub.add_parser(
        "sweep",
        parents=[common],
        help="table over couplings",
        description="Columns: g, E_harmonic, E_exact, E_exact_grid, K_approx, K_exact, lambda0..2",
    )
    sw.add_argument("--outputs", default=",".join(exact.SWEEP_OUTPUTS), help="subset of energy,exact,K,occupancies")
    return p


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    gs = (ns.g or []) + (ns.g_list or [])
    source = ns.source
    if ns.command == "occupancies":
        if getattr(ns, "asymptotic", False):
            source = "asymptotic"
        elif getattr(ns, "g0_limit", False):
            source = "g0"
        elif source is None:
            source = "exact" if ns.exact else "approx"
    outputs = [o for o in getattr(ns, "outputs", ",".join(exact.SWEEP_OUTPUTS)).split(",") if o]
    return RunConfig(
        command=ns.command,
        g=gs,
        count=ns.count,
        grid_min=ns.grid_min,
        grid_max=ns.grid_max,
        grid_points=ns.grid_points,
        solver_points=ns.solver_points,
        quad_L=ns.quad_L,
        quad_n=ns.quad_n,
        source=source or "approx",
        exact=ns.exact,
        outputs=outputs,
        format=ns.format,
        out=ns.out,
    )


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        cfg = config_from_args(ns)
        if cfg.command in ("energy", "density", "exact") and not cfg.g:
            raise ConfigError(f"{cfg.command} needs --g")
        rows, failed = HANDLERS[cfg.command](cfg)
    except (ConfigError, CouplingError) as exc:
        print(f"triobose: error: {exc}", file=sys.stderr)
        return 2
    except (exact.SolverError, spectral.SpectralError) as exc:
        print(f"triobose: solver error: {exc}", file=sys.stderr)
        return 1
    text = render(rows, cfg, HEADERS.get(cfg.command))
    if cfg.out:
        with open(cfg.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
