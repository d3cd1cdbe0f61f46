"""Three charged bosons in a 1D harmonic trap: potential and harmonic approximation.

Lengths are in oscillator units sqrt(hbar/m omega), energies in hbar omega.
The only physical parameter is the coupling ``g``.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np


class CouplingError(ValueError):
    """Raised for a coupling with no finite classical equilibrium."""


class CoincidenceError(ValueError):
    """Two particles at the same position, where the Coulomb term diverges."""


@dataclass(frozen=True)
class TrapParams:
    g: float

    def __post_init__(self):
        if not np.isfinite(self.g) or self.g < 0:
            raise CouplingError(f"coupling g must be finite and >= 0, got {self.g}")


@dataclass(frozen=True)
class EquilibriumGeometry:
    x_c: float
    positions: tuple[float, float, float]
    V_m: float


@dataclass(frozen=True)
class AnsatzParams:
    alpha: float
    beta: float
    gamma: float
    c_infinity: float


# second derivatives of the pair potential at the equilibrium spacings, halved
NEAREST_PAIR_STIFFNESS = 29.0 / 30.0
OUTER_PAIR_STIFFNESS = 4.0 / 15.0

ANSATZ = AnsatzParams(
    alpha=1.5,
    beta=np.sqrt(29.0 / 5.0) / 6.0,
    gamma=(15.0 * np.sqrt(3.0) - np.sqrt(145.0)) / 60.0,
    c_infinity=(29.0 / 5.0) ** 0.125 / (np.sqrt(2.0) * 3.0**0.375 * np.pi**0.75),
)

# g-independent part of the harmonic energy: zero-point energy of the normal modes
ZERO_POINT_ENERGY = (10.0 + 10.0 * np.sqrt(3.0) + 2.0 * np.sqrt(145.0)) / 20.0


def _coupling(params) -> float:
    g = params.g if isinstance(params, TrapParams) else float(params)
    if not g > 0:
        raise CouplingError(f"g must be > 0 for a finite equilibrium spacing, got {g}")
    return g


def half_spacing(g: float) -> float:
    return (10.0 * _coupling(g)) ** (1.0 / 3.0) / 2.0


def equilibrium(params: TrapParams | float) -> EquilibriumGeometry:
    g = _coupling(params)
    x_c = (10.0 * g) ** (1.0 / 3.0) / 2.0
    V_m = 3.0 * 5.0 ** (2.0 / 3.0) * g ** (2.0 / 3.0) / 2.0 ** (4.0 / 3.0)
    return EquilibriumGeometry(x_c=x_c, positions=(-x_c, 0.0, x_c), V_m=V_m)


def potential_exact(x1, x2, x3, params: TrapParams | float):
    """Harmonic confinement plus pairwise g/|x_i - x_j|; broadcasts over arrays."""
    g = params.g if isinstance(params, TrapParams) else float(params)
    xs = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (x1, x2, x3)))
    v = 0.5 * sum(x**2 for x in xs)
    if g == 0:
        return v
    for xi, xj in combinations(xs, 2):
        d = np.abs(xi - xj)
        if np.any(d == 0):
            raise CoincidenceError("Coulomb term is singular at coinciding positions")
        v = v + g / d
    return v


def potential_pair_form(x1, x2, x3, params: TrapParams | float):
    """Same potential written as centre-of-mass + pair terms."""
    g = params.g if isinstance(params, TrapParams) else float(params)
    xs = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (x1, x2, x3)))
    X = sum(xs) / 3.0
    v = 1.5 * X**2
    for xi, xj in combinations(xs, 2):
        d = xi - xj
        if g != 0 and np.any(d == 0):
            raise CoincidenceError("Coulomb term is singular at coinciding positions")
        v = v + d**2 / 6.0 + (g / np.abs(d) if g != 0 else 0.0)
    return v


def pair_force_at_equilibrium(i: int, j: int, params: TrapParams | float) -> float:
    """dV/dx_ij of the pair form at the equilibrium separation (1-based i > j)."""
    g = _coupling(params)
    x_c = half_spacing(g)
    sep = (i - j) * x_c
    return sep / 3.0 - g / sep**2


def potential_harmonic(x1, x2, x3, params: TrapParams | float):
    """Second-order expansion about the ordered minimum (-x_c, 0, x_c)."""
    geo = equilibrium(params)
    x1, x2, x3 = (np.asarray(v, dtype=float) for v in (x1, x2, x3))
    X = (x1 + x2 + x3) / 3.0
    return (
        geo.V_m
        + 1.5 * X**2
        + NEAREST_PAIR_STIFFNESS * (x2 - x1 - geo.x_c) ** 2
        + NEAREST_PAIR_STIFFNESS * (x3 - x2 - geo.x_c) ** 2
        + OUTER_PAIR_STIFFNESS * (x3 - x1 - 2.0 * geo.x_c) ** 2
    )


def energy_harmonic(params: TrapParams | float) -> float:
    g = _coupling(params)
    return (10.0 + 10.0 * np.sqrt(3.0) + 2.0 * np.sqrt(145.0) + 15.0 * 10.0 ** (2.0 / 3.0) * g ** (2.0 / 3.0)) / 20.0
