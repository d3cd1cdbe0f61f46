"""Numerically exact ground state by fermionization and sparse grid diagonalization.

The centre of mass separates off as a unit-frequency oscillator (energy 1/2,
mass 3). The relative motion is written in the interparticle gaps
``a = x2 - x1`` and ``b = x3 - x2``. The ordered sector x1 < x2 < x3 is then the
quadrant a, b > 0, and the fermionic node set becomes the two lattice axes,
where Dirichlet conditions are imposed exactly. In these coordinates

    H_rel = -(d_aa + d_bb - d_ab) + (a^2 + b^2 + (a+b)^2)/6 + g (1/a + 1/b + 1/(a+b))

and the kinetic operator is discretized with the triangular-lattice 7-point
stencil ``-(1/2)(d_aa + d_bb + (d_a - d_b)^2)``, which is symmetric and an
M-matrix, so the discrete ground state is positive inside the sector.
"""
from __future__ import annotations

import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np
import scipy.sparse as sps
from scipy.interpolate import RegularGridInterpolator
from scipy.sparse.linalg import ArpackNoConvergence, eigsh

from .model import TrapParams, energy_harmonic, equilibrium
from .rdm import degree_of_correlation, rdm_finite
from .spectral import (
    OccupancyReport,
    QuadratureRule,
    SpectralDecomposition,
    nystrom_matrix,
    single_family_report,
    trapezoid_rule,
)

log = logging.getLogger(__name__)

BOUNDARY_TOL = 1e-6


class SolverError(RuntimeError):
    pass


class GridTooSmallError(SolverError):
    pass


@dataclass(frozen=True)
class GridSpec:
    """Square lattice of interior gap values ``a_i = i * h``, ``i = 1..points_per_axis``.

    ``half_width`` is the largest gap kept; the wavefunction is set to zero beyond it.
    """

    half_width: float
    points_per_axis: int = 512

    def __post_init__(self):
        if not self.half_width > 0:
            raise ValueError("grid half_width must be positive")
        if self.points_per_axis < 64:
            raise ValueError("points_per_axis must be at least 64")

    @property
    def spacing(self) -> float:
        return self.half_width / (self.points_per_axis + 1)

    @property
    def gaps(self) -> np.ndarray:
        return self.spacing * np.arange(1, self.points_per_axis + 1)

    @classmethod
    def default(cls, g: float, points_per_axis: int = 512) -> "GridSpec":
        x_c = equilibrium(g).x_c
        return cls(max(x_c + 8.0, 12.0), points_per_axis)


@dataclass(frozen=True)
class ExactSolution:
    energy: float
    psi_rel: np.ndarray  # (N, N) on the gap lattice, unit norm under h^2 sum
    g: float
    grid: GridSpec
    energy_extrapolated: float | None = None
    boundary_amplitude: float = 0.0

    @property
    def best_energy(self) -> float:
        return self.energy if self.energy_extrapolated is None else self.energy_extrapolated


def relative_potential(a, b, g: float):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return (a**2 + b**2 + (a + b) ** 2) / 6.0 + g * (1.0 / a + 1.0 / b + 1.0 / (a + b))


def _second_difference(n: int) -> sps.csr_matrix:
    return sps.diags([1.0, -2.0, 1.0], [-1, 0, 1], shape=(n, n), format="csr")


def relative_hamiltonian(g: float, grid: GridSpec) -> sps.csr_matrix:
    n, h = grid.points_per_axis, grid.spacing
    eye = sps.identity(n, format="csr")
    up = sps.diags([1.0], [1], shape=(n, n), format="csr")
    down = up.T.tocsr()
    d2 = _second_difference(n)
    # (d_a - d_b)^2 along the (1, -1) lattice direction
    anti = sps.kron(up, down) + sps.kron(down, up) - 2.0 * sps.identity(n * n)
    lap = sps.kron(d2, eye) + sps.kron(eye, d2) + anti
    # gaps start at h, never on a coincidence line
    A, B = np.meshgrid(grid.gaps, grid.gaps, indexing="ij")
    V = relative_potential(A, B, g).reshape(-1)
    return (-0.5 / h**2) * lap.tocsr() + sps.diags(V, format="csr")


def solve_exact(params: TrapParams | float, grid: GridSpec | None = None, tol: float = 1e-10) -> ExactSolution:
    g = params.g if isinstance(params, TrapParams) else float(params)
    geo = equilibrium(g)
    grid = grid or GridSpec.default(g)
    H = relative_hamiltonian(g, grid)
    n = grid.points_per_axis
    # V_m lies below the ground state, so shift-invert picks the lowest eigenpair
    sigma = geo.V_m - 0.5
    try:
        lam, vec = eigsh(H, k=1, sigma=sigma, which="LM", tol=tol)
    except ArpackNoConvergence as exc:
        raise SolverError(f"eigensolver did not converge at g={g}") from exc
    psi = vec[:, 0].reshape(n, n)
    psi = psi if psi.sum() >= 0 else -psi
    psi = psi / np.sqrt(np.sum(psi**2) * grid.spacing**2)
    edge = max(np.abs(psi[-1, :]).max(), np.abs(psi[:, -1]).max()) / np.abs(psi).max()
    if edge > BOUNDARY_TOL:
        raise GridTooSmallError(f"boundary amplitude {edge:.2e} at g={g}; increase half_width")
    energy = float(lam[0]) + 0.5
    log.debug("g=%g N=%d E=%.10f", g, n, energy)
    return ExactSolution(energy, psi, g, grid, boundary_amplitude=float(edge))


def solve_exact_extrapolated(params: TrapParams | float, grid: GridSpec | None = None, refine: float = 1.5) -> ExactSolution:
    """Solve on two lattices and Richardson-extrapolate the O(h^2) energy error.

    The coarse lattice has ``points_per_axis / refine`` points; the fine one is
    returned with the extrapolated value attached.
    """
    g = params.g if isinstance(params, TrapParams) else float(params)
    fine_grid = grid or GridSpec.default(g)
    coarse_grid = replace(fine_grid, points_per_axis=max(64, int(round(fine_grid.points_per_axis / refine))))
    fine = solve_exact(g, fine_grid)
    coarse = solve_exact(g, coarse_grid)
    h1, h2 = coarse_grid.spacing, fine_grid.spacing
    e_star = (fine.energy * h1**2 - coarse.energy * h2**2) / (h1**2 - h2**2)
    return replace(fine, energy_extrapolated=float(e_star))


def perturbed_energy(sol: ExactSolution, scale: float) -> float:
    """Rayleigh quotient of the solution stretched by ``scale`` about the origin."""
    grid = sol.grid
    gaps = grid.gaps
    interp = RegularGridInterpolator((gaps, gaps), sol.psi_rel, bounds_error=False, fill_value=0.0)
    A, B = np.meshgrid(gaps / scale, gaps / scale, indexing="ij")
    trial = interp(np.stack([A, B], axis=-1)).reshape(-1)
    H = relative_hamiltonian(sol.g, grid)
    return float(trial @ (H @ trial) / (trial @ trial)) + 0.5


def energy_limit_g0(gs=(0.01, 0.02, 0.05), points_per_axis: int = 256) -> float:
    """Quadratic fit of extrapolated energies at small g, evaluated at g = 0."""
    gs = np.asarray(gs, dtype=float)
    if gs.size < 3 or np.any(gs <= 0):
        raise ValueError("need at least three positive couplings")
    energies = [solve_exact_extrapolated(g, GridSpec.default(g, points_per_axis)).energy_extrapolated for g in gs]
    return float(np.polyval(np.polyfit(gs, energies, 2), 0.0))


# -- bosonic observables ----------------------------------------------------------


@dataclass(frozen=True)
class SampledKernel:
    """RDM sampled on a symmetric uniform 1D grid with trapezoid weights."""

    rule: QuadratureRule
    values: np.ndarray

    @property
    def nodes(self) -> np.ndarray:
        return self.rule.nodes

    def trace(self) -> float:
        return self.rule.integrate(np.diag(self.values))

    def purity(self) -> float:
        w = self.rule.weights
        return float(w @ (self.values**2) @ w)

    def density(self) -> np.ndarray:
        return 3.0 * np.diag(self.values)


def bosonic_wavefunction(sol: ExactSolution, k1, k2, k3, stride: int) -> np.ndarray:
    """psi_B at lattice positions ``k * stride * h``, symmetric over all orderings."""
    h = sol.grid.spacing
    n = sol.grid.points_per_axis
    ks = np.sort(np.stack(np.broadcast_arrays(k1, k2, k3)), axis=0)
    ga_ = (ks[1] - ks[0]) * stride
    gb_ = (ks[2] - ks[1]) * stride
    valid = (ga_ > 0) & (gb_ > 0) & (ga_ <= n) & (gb_ <= n)
    rel = np.zeros(ga_.shape)
    rel[valid] = sol.psi_rel[ga_[valid] - 1, gb_[valid] - 1]
    X = (ks[0] + ks[1] + ks[2]) * (stride * h) / 3.0
    com = (3.0 / np.pi) ** 0.25 * np.exp(-1.5 * X**2)
    # sector-normalized relative part spread over six sectors
    return com * rel / np.sqrt(6.0)


def exact_rdm(sol: ExactSolution, spacing: float = 0.15, half_width: float | None = None) -> SampledKernel:
    """rho(x, y) by trapezoid quadrature over the two other coordinates.

    All sample positions sit on a sub-lattice of the solver lattice, so every
    gap is an exact lattice gap and no interpolation of psi_rel is needed.
    """
    h = sol.grid.spacing
    x_c = equilibrium(sol.g).x_c
    half_width = x_c + 6.0 if half_width is None else half_width
    stride = max(1, int(round(spacing / h)))
    step = stride * h
    m = int(np.ceil(half_width / step))
    if (2 * m + 1) ** 3 > 40_000_000:
        raise SolverError("quadrature budget exceeded; increase spacing")
    k = np.arange(-m, m + 1)
    psi = bosonic_wavefunction(sol, k[:, None, None], k[None, :, None], k[None, None, :], stride)
    nodes = k * step
    rule = trapezoid_rule(nodes)
    flat = psi.reshape(k.size, -1) * np.sqrt(np.outer(rule.weights, rule.weights).reshape(-1))[None, :]
    rho = flat @ flat.T
    return SampledKernel(rule, 0.5 * (rho + rho.T))


def exact_spectrum(sk: SampledKernel, count: int | None = None) -> SpectralDecomposition:
    return nystrom_matrix(sk.values, sk.rule, count)


def exact_occupancies(sol: ExactSolution, count: int = 3, spacing: float = 0.15) -> OccupancyReport:
    sk = exact_rdm(sol, spacing)
    return single_family_report(exact_spectrum(sk).full_spectrum, count)


def harmonic_gap(sol: ExactSolution) -> float:
    return sol.best_energy - energy_harmonic(sol.g)


# -- sweeps -------------------------------------------------------------------

SWEEP_OUTPUTS = ("energy", "exact", "K", "occupancies")


class SweepError(RuntimeError):
    def __init__(self, g: float, cause: Exception):
        super().__init__(f"sweep failed at g={g}: {cause}")
        self.g = g
        self.cause = cause


def sweep_columns(outputs) -> list[str]:
    """Column order of :func:`sweep` rows for a given output selection."""
    outputs = set(outputs)
    cols = ["g"]
    if "energy" in outputs:
        cols.append("E_harmonic")
    if "exact" in outputs:
        cols += ["E_exact", "E_exact_grid"]
    if "K" in outputs:
        cols.append("K_approx")
        if "exact" in outputs:
            cols.append("K_exact")
    if "occupancies" in outputs and "exact" in outputs:
        cols += ["lambda0", "lambda1", "lambda2"]
    return cols


def sweep_row(g: float, outputs=SWEEP_OUTPUTS, points_per_axis: int = 512) -> dict:
    outputs = set(outputs)
    unknown = outputs - set(SWEEP_OUTPUTS)
    if unknown:
        raise ValueError(f"unknown sweep outputs {sorted(unknown)}")
    row: dict = {"g": float(g)}
    if "energy" in outputs:
        row["E_harmonic"] = energy_harmonic(g)
    if "K" in outputs:
        row["K_approx"] = degree_of_correlation(rdm_finite(g))[0]
    if "exact" in outputs:
        sol = solve_exact_extrapolated(g, GridSpec.default(g, points_per_axis))
        row["E_exact"] = sol.energy_extrapolated
        row["E_exact_grid"] = sol.energy
        if "K" in outputs or "occupancies" in outputs:
            occ = exact_occupancies(sol, 3)
            if "K" in outputs:
                row["K_exact"] = occ.K
            if "occupancies" in outputs:
                for l, v in enumerate(occ.merged):
                    row[f"lambda{l}"] = v
    return {c: row[c] for c in sweep_columns(outputs)}


def worker_count() -> int:
    n = int(os.environ.get("TRIOBOSE_THREADS", "0") or 0)
    return n if n > 0 else (os.cpu_count() or 1)


def sweep(gs, outputs=SWEEP_OUTPUTS, points_per_axis: int = 512, on_error: str = "raise") -> list[dict]:
    """One row per coupling, in input order.

    ``on_error="mark"`` replaces a failed row by ``{"g": g, "error": message}``
    instead of raising :class:`SweepError`.
    """
    gs = [float(g) for g in gs]
    if not gs:
        raise ValueError("sweep needs at least one coupling")

    def run(g):
        try:
            return sweep_row(g, outputs, points_per_axis)
        except Exception as exc:  # noqa: BLE001 - reported per row
            if on_error == "mark":
                return {"g": g, "error": str(exc)}
            raise SweepError(g, exc) from exc

    workers = min(worker_count(), len(gs))
    if workers == 1:
        return [run(g) for g in gs]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(run, gs))
