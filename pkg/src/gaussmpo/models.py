"""Benchmark Hamiltonians: the ohmic spin-boson bath chain and the fermionic Ising chain."""

import numpy as np

from .chain import SpectralDensity, chain_hamiltonian, ohmic_chain_coefficients
from .gaussian import HamiltonMatrix, Species, build_hamilton_matrix

__all__ = ["spin_boson_chain", "ising_chain", "ISING_LAMBDA"]

ISING_LAMBDA = 1.2


def spin_boson_chain(N, omega_c=1.0, cutoff=40.0) -> HamiltonMatrix:
    """Bath chain of the spin-boson model with ohmic density, ``N`` sites.

    ``cutoff`` is the hard cutoff in units of ``omega_c``.
    """
    sd = SpectralDensity("ohmic", omega_c=omega_c, cutoff_factor=cutoff)
    return chain_hamiltonian(ohmic_chain_coefficients(sd, N), N, Species.BOSONIC)


def ising_chain(N, lam=ISING_LAMBDA) -> HamiltonMatrix:
    """Transverse-field Ising chain in Jordan-Wigner fermions.

    ``sum_i sigma^z_i + lam sum_i sigma^x_i sigma^x_{i+1}`` becomes
    ``sum_i (2 f_i^dag f_i - 1) + lam sum_i (f_i^dag f_{i+1} + f_i^dag f_{i+1}^dag + h.c.)``.
    """
    alpha = np.eye(N) + 0.5 * lam * (np.eye(N, k=1) + np.eye(N, k=-1))
    zeta = 0.5 * lam * (np.eye(N, k=-1) - np.eye(N, k=1))
    return build_hamilton_matrix(Species.FERMIONIC, alpha, zeta)
