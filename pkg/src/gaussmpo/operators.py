"""Local ladder operators in truncated Fock space and Jordan-Wigner form.

Basis index ``n`` is the occupation number. For fermions the two-level site
uses ``|0>`` (empty) and ``|1>`` (occupied), so that ``sigma_minus`` maps
``|1>`` to ``|0>`` and ``sigma_z = diag(1, -1)`` is the parity ``(-1)^n``.
"""

from functools import reduce

import numpy as np

from .gaussian import Species

SIGMA_PLUS = np.array([[0.0, 0.0], [1.0, 0.0]], dtype=complex)
SIGMA_MINUS = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)
SIGMA_Z = np.diag([1.0, -1.0]).astype(complex)
SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)


def annihilation(M):
    """Truncated bosonic annihilation operator on ``M`` Fock levels."""
    return np.diag(np.sqrt(np.arange(1, M)), k=1).astype(complex)


def number(M):
    return np.diag(np.arange(M)).astype(complex)


def local_lowering(species, d):
    """Single-site lowering operator for the given species."""
    if Species.parse(species).is_fermionic:
        if d != 2:
            raise ValueError("fermionic sites are two-dimensional")
        return SIGMA_MINUS.copy()
    return annihilation(d)


def local_parity(species, d):
    """Single-site operator attached to the string of a ladder operator."""
    if Species.parse(species).is_fermionic:
        return SIGMA_Z.copy()
    return np.eye(d, dtype=complex)


def ladder_string(species, n_sites, d, k, dagger=False):
    """Site-wise operator list representing ``a_k`` (or ``a_k^dagger``).

    Fermionic operators carry a ``sigma_z`` string on all sites left of ``k``.
    """
    low = local_lowering(species, d)
    ops = []
    for s in range(n_sites):
        if s < k:
            ops.append(local_parity(species, d))
        elif s == k:
            ops.append(low.conj().T if dagger else low)
        else:
            ops.append(np.eye(d, dtype=complex))
    return ops


def string_product(*strings):
    """Site-wise product of operator strings (leftmost factor acts last)."""
    out = []
    for site_ops in zip(*strings):
        out.append(reduce(np.matmul, site_ops))
    return out


def kron_all(ops):
    return reduce(np.kron, ops)


def dense_ladder_ops(species, n_sites, d):
    """Dense annihilation operators ``[a_0, ..., a_{N-1}]`` on the full space."""
    return [kron_all(ladder_string(species, n_sites, d, k)) for k in range(n_sites)]
