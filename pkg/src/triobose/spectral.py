"""Nystrom solution of the RDM eigenproblems and the asymptotic Schmidt forms."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigh

from .model import TrapParams, equilibrium
from .rdm import Kernel, rdm_asymptotic, rdm_finite, slater_rdm_g0

NEGATIVE_FLOOR = 1e-10
TAIL_TOL = 1e-12


class SpectralError(ValueError):
    pass


@dataclass(frozen=True)
class QuadratureRule:
    nodes: np.ndarray
    weights: np.ndarray
    half_width: float

    def integrate(self, values) -> float:
        return float(np.dot(self.weights, values))


@dataclass(frozen=True)
class SpectralDecomposition:
    eigenvalues: np.ndarray
    eigenfunctions: np.ndarray  # (count, n) samples at the rule's nodes
    rule: QuadratureRule
    full_spectrum: np.ndarray  # every eigenvalue of the discretized operator, descending
    clamped: int = 0  # eigenvalues in [-1e-10, 0) set to zero

    def inner(self, l: int, k: int) -> float:
        return self.rule.integrate(self.eigenfunctions[l] * self.eigenfunctions[k])


@dataclass(frozen=True)
class OccupancyReport:
    lambda1: tuple[float, ...]
    lambda2: tuple[float, ...]
    merged: tuple[float, ...]
    K: float
    L: float
    conservation_residual: float
    merged_labels: tuple[str, ...] = field(default=())
    residual_mass: float = float("nan")  # weight outside the leading Schmidt terms


def build_quadrature(L: float, n: int) -> QuadratureRule:
    """Gauss-Legendre rule with ``n`` nodes on [-L, L]."""
    if not L > 0 or int(n) != n or n < 2:
        raise ValueError(f"need L > 0 and integer n >= 2, got L={L}, n={n}")
    t, w = np.polynomial.legendre.leggauss(int(n))
    return QuadratureRule(L * t, L * w, float(L))


def trapezoid_rule(nodes) -> QuadratureRule:
    nodes = np.asarray(nodes, dtype=float)
    if nodes.ndim != 1 or nodes.size < 2 or np.any(np.diff(nodes) <= 0):
        raise ValueError("trapezoid nodes must be strictly increasing")
    w = np.zeros_like(nodes)
    d = np.diff(nodes)
    w[:-1] += 0.5 * d
    w[1:] += 0.5 * d
    return QuadratureRule(nodes, w, float(max(-nodes[0], nodes[-1])))


def _orient(f: np.ndarray) -> np.ndarray:
    i = int(np.argmax(np.abs(f)))
    return f if f[i] >= 0 else -f


def nystrom_matrix(values: np.ndarray, rule: QuadratureRule, count: int | None = None) -> SpectralDecomposition:
    """Eigen-decomposition of a kernel sampled on ``rule.nodes`` x ``rule.nodes``."""
    values = np.asarray(values, dtype=float)
    n = rule.nodes.size
    if values.shape != (n, n):
        raise SpectralError(f"kernel samples have shape {values.shape}, expected {(n, n)}")
    sw = np.sqrt(rule.weights)
    M = sw[:, None] * 0.5 * (values + values.T) * sw[None, :]
    lam, vec = eigh(M)
    order = np.argsort(-lam, kind="stable")
    lam, vec = lam[order], vec[:, order]
    if lam[-1] < -NEGATIVE_FLOOR * max(1.0, abs(lam[0])):
        raise SpectralError(f"kernel is not positive semidefinite: eigenvalue {lam[-1]:.3e}")
    clamped = int(np.count_nonzero(lam < 0))
    lam = np.where(lam < 0, 0.0, lam)
    count = n if count is None else min(int(count), n)
    funcs = np.array([_orient(vec[:, l] / sw) for l in range(count)])
    return SpectralDecomposition(lam[:count].copy(), funcs, rule, lam, clamped)


def nystrom_eigs(k: Kernel, rule: QuadratureRule, count: int | None = None) -> SpectralDecomposition:
    edge = np.abs(k(np.full(rule.nodes.shape, rule.half_width), rule.nodes)).max()
    edge = max(edge, np.abs(k(np.full(rule.nodes.shape, -rule.half_width), rule.nodes)).max())
    peak = np.abs(k(rule.nodes, rule.nodes)).max()
    if edge > TAIL_TOL * max(peak, 1e-300):
        raise SpectralError(
            f"kernel is {edge / peak:.2e} of its peak at |x| = {rule.half_width}; widen the quadrature"
        )
    return nystrom_matrix(k.matrix(rule.nodes), rule, count)


def nystrom_extend(dec: SpectralDecomposition, k: Kernel, l: int, x) -> np.ndarray:
    """Natural orbital ``l`` off the nodes: (1/lambda) sum_j w_j k(x, x_j) f(x_j)."""
    lam = dec.eigenvalues[l]
    if lam <= 1e-12:
        raise SpectralError(f"eigenvalue {lam:.3e} too small to extend orbital {l}")
    x = np.asarray(x, dtype=float)
    K = k.matrix(x.reshape(-1), dec.rule.nodes)
    return ((K * dec.rule.weights[None, :]) @ dec.eigenfunctions[l] / lam).reshape(x.shape)


def _floats(values) -> tuple[float, ...]:
    return tuple(float(v) for v in values)


def _spectra_summary(spectrum: np.ndarray) -> tuple[float, float]:
    purity = float(np.sum(spectrum**2))
    return 1.0 / purity, 1.0 - purity


def merge_spectra(lambda1, lambda2) -> tuple[list[float], list[str]]:
    """Combined asymptotic occupancies with every side-site value doubled.

    Ties go to side-site entries before the middle site, and +x_c before -x_c.
    """
    entries = []
    for l, v in enumerate(lambda2):
        entries.append((-v, 0, l, 0, f"v{l}(x+x_c)"))
        entries.append((-v, 0, l, 1, f"v{l}(x-x_c)"))
    for l, v in enumerate(lambda1):
        entries.append((-v, 1, l, 0, f"u{l}(x)"))
    entries.sort(key=lambda e: e[:4])
    return [-e[0] for e in entries], [e[4] for e in entries]


def default_rule(L: float = 8.0, n: int = 200) -> QuadratureRule:
    return build_quadrature(L, n)


def asymptotic_spectra(rule: QuadratureRule | None = None, count: int | None = None):
    rule = rule or default_rule()
    rho1, rho_t = rdm_asymptotic()
    return nystrom_eigs(rho1, rule, count), nystrom_eigs(rho_t, rule, count)


def asymptotic_occupancies(count: int = 3, rule: QuadratureRule | None = None) -> OccupancyReport:
    d1, d2 = asymptotic_spectra(rule)
    s1, s2 = d1.full_spectrum, d2.full_spectrum
    merged, labels = merge_spectra(s1, s2)
    total = s1.sum() + 2.0 * s2.sum()
    K, L = _spectra_summary(np.asarray(merged))
    return OccupancyReport(
        lambda1=_floats(s1[:count]),
        lambda2=_floats(s2[:count]),
        merged=_floats(merged[:count]),
        merged_labels=tuple(labels[:count]),
        K=K,
        L=L,
        conservation_residual=float(total - 1.0),
        residual_mass=float(s1[1:].sum() + 2.0 * s2[1:].sum()),
    )


def eta_tau_basis(v, x_c: float, grid, weights=None, overlap_tol: float = 1e-8):
    """Even/odd combinations of one side-site orbital placed at -x_c and +x_c.

    ``v`` is a callable orbital in re-centred coordinates; ``grid`` must be
    symmetric about zero.
    """
    grid = np.asarray(grid, dtype=float)
    if weights is None:
        weights = trapezoid_rule(grid).weights
    plus = v(grid + x_c)
    minus = v(grid - x_c)
    overlap = abs(float(np.dot(weights, plus * minus)))
    if overlap > overlap_tol:
        raise SpectralError(f"side orbitals overlap by {overlap:.2e}; x_c too small for this basis")
    return (plus + minus) / np.sqrt(2.0), (plus - minus) / np.sqrt(2.0)


def schmidt_truncation_error(g: TrapParams | float, keep: int = 1, rule: QuadratureRule | None = None) -> float:
    """Trace distance between the asymptotic RDM and its ``keep``-term-per-family truncation."""
    equilibrium(g)  # validates g; the spectrum itself is g-independent
    d1, d2 = asymptotic_spectra(rule)
    return float(d1.full_spectrum[keep:].sum() + 2.0 * d2.full_spectrum[keep:].sum())


def rule_for_width(half_width: float, density: float = 25.0, minimum: int = 200) -> QuadratureRule:
    n = max(minimum, int(np.ceil(density * half_width)))
    return build_quadrature(half_width, n)


def finite_g_occupancies(params: TrapParams | float, count: int = 3, rule: QuadratureRule | None = None) -> OccupancyReport:
    g = params.g if isinstance(params, TrapParams) else float(params)
    x_c = equilibrium(g).x_c
    rule = rule or rule_for_width(x_c + 8.0)
    dec = nystrom_eigs(rdm_finite(g), rule, count)
    return single_family_report(dec.full_spectrum, count)


def single_family_report(spectrum: np.ndarray, count: int) -> OccupancyReport:
    K, L = _spectra_summary(spectrum)
    return OccupancyReport(
        lambda1=(),
        lambda2=(),
        merged=_floats(spectrum[:count]),
        merged_labels=tuple(f"n{l}" for l in range(min(count, spectrum.size))),
        K=K,
        L=L,
        conservation_residual=float(spectrum.sum() - 1.0),
        residual_mass=float(spectrum[3:].sum()),
    )


def g0_occupancies(count: int = 3, L: float = 7.0, n: int = 240) -> OccupancyReport:
    """Occupancies of the g -> 0+ limit (modulus of the Slater determinant)."""
    rule = build_quadrature(L, n)
    X, Y = np.meshgrid(rule.nodes, rule.nodes, indexing="ij")
    dec = nystrom_matrix(slater_rdm_g0(X, Y), rule, count)
    return single_family_report(dec.full_spectrum, count)
