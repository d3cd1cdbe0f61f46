"""Harmonic-approximation ground state, its bosonic symmetrization, and the g -> 0+ state."""
from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations

import numpy as np

from . import gaussian as ga
from .model import (
    ANSATZ,
    NEAREST_PAIR_STIFFNESS,
    OUTER_PAIR_STIFFNESS,
    AnsatzParams,
    TrapParams,
    energy_harmonic,
    equilibrium,
)

PERMUTATIONS = tuple(permutations(range(3)))


def _pair_form(i: int, j: int) -> np.ndarray:
    v = np.zeros(3)
    v[i], v[j] = 1.0, -1.0
    return np.outer(v, v)


def _mean_form() -> np.ndarray:
    return np.full((3, 3), 1.0 / 9.0)


def ansatz_precision(p: AnsatzParams = ANSATZ) -> np.ndarray:
    """Quadratic form of alpha*S^2 + beta*(x2-x1)^2 + beta*(x3-x2)^2 + gamma*(x3-x1)^2."""
    return (
        p.alpha * _mean_form()
        + p.beta * _pair_form(1, 0)
        + p.beta * _pair_form(2, 1)
        + p.gamma * _pair_form(2, 0)
    )


def harmonic_precision() -> np.ndarray:
    """Quadratic part of the expanded potential in displacement coordinates."""
    return (
        1.5 * _mean_form()
        + NEAREST_PAIR_STIFFNESS * _pair_form(1, 0)
        + NEAREST_PAIR_STIFFNESS * _pair_form(2, 1)
        + OUTER_PAIR_STIFFNESS * _pair_form(2, 0)
    )


@dataclass(frozen=True)
class AnsatzState:
    body: ga.GaussianSum
    params: AnsatzParams

    def __call__(self, x):
        return self.body(x)


@dataclass(frozen=True)
class SymmetrizedState:
    """Unnormalized permutation sum ``body``; the wavefunction is ``norm_constant * body``."""

    body: ga.GaussianSum
    norm_constant: float
    g: float

    @property
    def psi(self) -> ga.GaussianSum:
        return self.body.scale(self.norm_constant)

    def __call__(self, x):
        return self.norm_constant * self.body(x)


def build_ansatz(params: AnsatzParams = ANSATZ) -> AnsatzState:
    return AnsatzState(ga.GaussianSum.single(ansatz_precision(params)), params)


def ansatz_residual(points, params: AnsatzParams = ANSATZ, g: float = 1.0) -> np.ndarray:
    """``(H_ap - E_ap) psi / psi`` at displacement-coordinate points, exactly.

    The constant V_m cancels against the g-dependent part of E_ap, so the
    result is independent of ``g`` up to rounding.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    body = build_ansatz(params).body
    kinetic = -0.5 * ga.laplacian_ratio(body, pts)
    W = harmonic_precision()
    V = equilibrium(g).V_m + np.einsum("pk,kl,pl->p", pts, W, pts)
    return kinetic + V - energy_harmonic(g)


def verify_ansatz_solves_pde(sample_points, params: AnsatzParams = ANSATZ, g: float = 1.0) -> float:
    return float(np.max(np.abs(ansatz_residual(sample_points, params, g))))


def symmetrize(params: TrapParams | float, ansatz: AnsatzState | None = None) -> SymmetrizedState:
    """Sum of psi_ap(x_i + x_c, x_j, x_k - x_c) over the six orderings, normalized exactly."""
    g = params.g if isinstance(params, TrapParams) else float(params)
    x_c = equilibrium(g).x_c
    base = ga.shift((ansatz or build_ansatz()).body, [-x_c, 0.0, x_c])
    body = ga.GaussianSum.zero(3)
    for perm in PERMUTATIONS:
        body = body + ga.permute(base, perm)
    norm2 = ga.integral(ga.product(body, body))
    return SymmetrizedState(body, 1.0 / np.sqrt(norm2), g)


def c_infinity_from_ansatz(ansatz: AnsatzState | None = None) -> float:
    """Normalization of the permutation sum once the six terms stop overlapping."""
    body = (ansatz or build_ansatz()).body
    return 1.0 / np.sqrt(6.0 * ga.integral(ga.product(body, body)))


def hermite_functions(n_max: int, x) -> np.ndarray:
    """Oscillator eigenfunctions phi_0..phi_n_max at ``x``; shape ``(n_max + 1, *x.shape)``."""
    x = np.asarray(x, dtype=float)
    out = np.empty((n_max + 1,) + x.shape)
    out[0] = np.pi**-0.25 * np.exp(-0.5 * x**2)
    if n_max >= 1:
        out[1] = np.sqrt(2.0) * x * out[0]
    for n in range(1, n_max):
        out[n + 1] = np.sqrt(2.0 / (n + 1)) * x * out[n] - np.sqrt(n / (n + 1)) * out[n - 1]
    return out


def slater_determinant_g0(x1, x2, x3) -> np.ndarray:
    """Signed Slater determinant of phi_0, phi_1, phi_2, divided by sqrt(3!)."""
    x1, x2, x3 = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (x1, x2, x3)))
    phi = np.stack([hermite_functions(2, x) for x in (x1, x2, x3)], axis=-1)  # (3, ..., 3)
    mat = np.moveaxis(phi, 0, -2)  # (..., orbital, particle)
    return np.linalg.det(mat) / np.sqrt(6.0)


def slater_modulus_g0(x1, x2, x3) -> np.ndarray:
    """Bosonic ground state in the g -> 0+ limit: modulus of the Slater determinant."""
    return np.abs(slater_determinant_g0(x1, x2, x3))
