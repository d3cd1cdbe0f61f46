"""One-body reduced density matrix kernels, densities and the degree of correlation."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import gaussian as ga
from .model import ANSATZ, TrapParams, equilibrium
from .wavefunction import build_ansatz, hermite_functions, symmetrize

LABELS = ("finite_g", "rho1", "rho_tilde", "asymptotic_total")
EXPECTED_TRACE = {"finite_g": 1.0, "rho1": 1.0 / 3.0, "rho_tilde": 1.0 / 3.0, "asymptotic_total": 1.0}


class TraceError(ValueError):
    pass


@dataclass(frozen=True)
class Kernel:
    """Symmetric two-argument function rho(x, y) held as a 2D GaussianSum."""

    body: ga.GaussianSum
    label: str

    def __post_init__(self):
        if self.body.dim != 2:
            raise ga.DimensionError("kernel must be a function of two variables")
        if self.label not in LABELS:
            raise ValueError(f"unknown kernel label {self.label!r}")

    def __call__(self, x, y) -> np.ndarray:
        x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
        return self.body(np.stack([x, y], axis=-1))

    def matrix(self, xs, ys=None) -> np.ndarray:
        xs = np.asarray(xs, dtype=float)
        ys = xs if ys is None else np.asarray(ys, dtype=float)
        X, Y = np.meshgrid(xs, ys, indexing="ij")
        return self(X, Y)

    def diagonal(self) -> ga.GaussianSum:
        """x -> rho(x, x) as a 1D GaussianSum."""
        P = self.body.prec
        A = P.sum(axis=(1, 2))
        # (x - m1, x - m2) P (.)^T = A (x - m)^2 + const
        lin = (P @ self.body.mu[:, :, None]).sum(axis=(1, 2))
        m = np.divide(lin, A, out=np.zeros_like(A), where=A > 0)
        full = np.einsum("tk,tkl,tl->t", self.body.mu, P, self.body.mu)
        const = full - A * m**2
        return ga.GaussianSum(self.body.coeff * np.exp(-const), m[:, None], A[:, None, None])

    def trace(self) -> float:
        return ga.integral(self.diagonal())

    def purity(self) -> float:
        """tr rho^2 = integral of rho(x, y)^2 over the plane."""
        return ga.integral(ga.product(self.body, self.body))

    def translated(self, t: float) -> ga.GaussianSum:
        return ga.shift(self.body, [t, t])


@dataclass(frozen=True)
class DensityProfile:
    grid: np.ndarray
    values: np.ndarray

    def particle_number(self) -> float:
        return float(np.trapezoid(self.values, self.grid))


def _pair_overlap(psi: ga.GaussianSum, slot: int) -> ga.GaussianSum:
    """integral psi(.., x at slot, ..) psi(.., y at slot, ..) over the other two slots."""
    others = [i for i in range(3) if i != slot]
    left = [0] * 3
    right = [0] * 3
    left[slot], right[slot] = 0, 1
    for pos, i in zip((2, 3), others):
        left[i] = right[i] = pos
    prod = ga.product(ga.embed(psi, 4, left), ga.embed(psi, 4, right))
    return ga.marginalize(prod, [0, 1])


def rdm_finite(params: TrapParams | float) -> Kernel:
    """RDM of the normalized symmetric harmonic-approximation state at coupling g."""
    state = symmetrize(params)
    return Kernel(_pair_overlap(state.psi, 0), "finite_g")


def rdm_asymptotic() -> tuple[Kernel, Kernel]:
    """g-independent middle-site kernel rho1 and the re-centred side-site kernel rho_tilde.

    Both carry the prefactor 2 C_inf^2: in the separated limit two of the six
    permutation terms place particle 1 on any given site.
    """
    body = build_ansatz().body
    A = 2.0 * ANSATZ.c_infinity**2
    rho1 = _pair_overlap(body, 1).scale(A)
    rho_tilde = _pair_overlap(body, 0).scale(A)
    return Kernel(rho1, "rho1"), Kernel(rho_tilde, "rho_tilde")


def assemble_asymptotic_total(g: TrapParams | float) -> Kernel:
    """rho1(x, y) + rho_tilde(x + x_c, y + x_c) + rho_tilde(x - x_c, y - x_c)."""
    x_c = equilibrium(g).x_c
    rho1, rho_t = rdm_asymptotic()
    body = rho1.body + rho_t.translated(-x_c) + rho_t.translated(x_c)
    return Kernel(body, "asymptotic_total")


def single_exponential_form(k: Kernel) -> tuple[float, float, float]:
    """(c, a, b) with k(x, y) = c exp(-a x^2 + b x y - a y^2) for a centred one-term kernel."""
    if len(k.body) != 1 or np.any(np.abs(k.body.mu) > 1e-12):
        raise ValueError("kernel is not a single centred Gaussian")
    P = k.body.prec[0]
    return float(k.body.coeff[0]), float(P[0, 0]), float(-2.0 * P[0, 1])


def density(k: Kernel, grid) -> DensityProfile:
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or np.any(np.diff(grid) <= 0):
        raise ValueError("density grid must be strictly increasing")
    values = 3.0 * k(grid, grid)
    return DensityProfile(grid, np.clip(values, 0.0, None))


def degree_of_correlation(k: Kernel, trace_tol: float = 1e-8) -> tuple[float, float]:
    """K = 1 / tr rho^2 and the linear entropy L = 1 - 1/K."""
    tr = k.trace()
    if abs(tr - 1.0) > trace_tol:
        raise TraceError(f"degree of correlation needs a unit-trace kernel, trace = {tr}")
    purity = k.purity()
    K = 1.0 / purity
    return K, 1.0 - purity


def slater_rdm_g0(x, y, quad_points: int = 80) -> np.ndarray:
    """RDM of the g -> 0+ state |det| / sqrt(6), evaluated without any 2D grid.

    Writing the modulus as the determinant times the ordering sign, the double
    integral factorizes: for x < y each integrated coordinate picks up
    ``s(z) = 1 - 2 [x < z < y]``, so only the one-dimensional overlaps
    ``int_x^y phi_n phi_m`` are needed. Those are computed by Gauss-Legendre
    quadrature of a smooth integrand.
    """
    x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    lo, hi = np.minimum(x, y), np.maximum(x, y)
    t, w = np.polynomial.legendre.leggauss(quad_points)
    half = 0.5 * (hi - lo)[..., None]
    z = 0.5 * (hi + lo)[..., None] + half * t
    phi = hermite_functions(2, z)  # (3, ..., q)
    seg = np.einsum("n...q,m...q,q->...nm", phi, phi, w) * half[..., None]
    M = np.eye(3) - 2.0 * seg  # (..., 3, 3)
    px = hermite_functions(2, x)
    py = hermite_functions(2, y)
    out = np.zeros(x.shape)
    for p in _perm_signs():
        for q in _perm_signs():
            (a0, a1, a2), sa = p
            (b0, b1, b2), sb = q
            out = out + sa * sb * px[a0] * py[b0] * M[..., a1, b1] * M[..., a2, b2]
    return out / 6.0


def _perm_signs():
    from itertools import permutations

    for p in permutations(range(3)):
        inv = sum(1 for i in range(3) for j in range(i + 1, 3) if p[i] > p[j])
        yield p, (-1.0) ** inv
