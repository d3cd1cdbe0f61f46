"""Ground-state correlations of three charged bosons in a 1D harmonic trap."""
from .model import TrapParams, energy_harmonic, equilibrium, potential_exact, potential_harmonic
from .rdm import Kernel, assemble_asymptotic_total, degree_of_correlation, density, rdm_asymptotic, rdm_finite
from .spectral import asymptotic_occupancies, build_quadrature, finite_g_occupancies, g0_occupancies, nystrom_eigs
from .wavefunction import build_ansatz, slater_modulus_g0, symmetrize

__all__ = [
    "Kernel",
    "TrapParams",
    "assemble_asymptotic_total",
    "asymptotic_occupancies",
    "build_ansatz",
    "build_quadrature",
    "degree_of_correlation",
    "density",
    "energy_harmonic",
    "equilibrium",
    "finite_g_occupancies",
    "g0_occupancies",
    "nystrom_eigs",
    "potential_exact",
    "potential_harmonic",
    "rdm_asymptotic",
    "rdm_finite",
    "slater_modulus_g0",
    "symmetrize",
]
