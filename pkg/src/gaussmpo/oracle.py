"""Dense second-quantized reference for small systems.

The quadratic Hamiltonian is assembled in normal-ordered form,

    H_hat = 2 sum_ij alpha_ij a_i^dag a_j + nu tr(alpha)
            + sum_ij zeta_ij a_i a_j + nu sum_ij conj(zeta_ij) a_i^dag a_j^dag,

from truncated bosonic or Jordan-Wigner fermionic ladder operators, and its
Gibbs state is obtained by a Hermitian eigendecomposition.
"""

from dataclasses import dataclass
from functools import reduce

import numpy as np
from scipy import sparse

from .gaussian import HamiltonMatrix, Moments, ThermalSpec, complete_covariance
from .operators import ladder_string

__all__ = [
    "MAX_DENSE_DIM",
    "DenseThermalState",
    "sparse_ladder_ops",
    "dense_hamiltonian",
    "dense_number_operator",
    "dense_gibbs",
    "dense_moments",
    "exact_oracle",
    "trace_distance",
]

MAX_DENSE_DIM = 2**14


def _local_dim(H, M):
    return 2 if H.species.is_fermionic else int(M)


def _check_dim(n, d):
    if d**n > MAX_DENSE_DIM:
        raise ValueError(f"dense dimension {d}**{n} exceeds the cap {MAX_DENSE_DIM}")


def sparse_ladder_ops(species, n, d):
    """Sparse annihilation operators on the full ``d**n`` space."""
    out = []
    for k in range(n):
        ops = [sparse.csr_matrix(o) for o in ladder_string(species, n, d, k)]
        out.append(reduce(lambda x, y: sparse.kron(x, y, format="csr"), ops))
    return out


def dense_hamiltonian(H: HamiltonMatrix, M: int = 2) -> np.ndarray:
    """Dense matrix of ``H_hat`` on ``M`` levels per mode (2 for fermions)."""
    n, d = H.n_modes, _local_dim(H, M)
    _check_dim(n, d)
    nu = H.species.nu
    a = sparse_ladder_ops(H.species, n, d)
    ad = [x.conj().T.tocsr() for x in a]
    dim = d**n
    out = sparse.identity(dim, dtype=complex, format="csr") * (nu * np.trace(H.alpha).real)
    for i in range(n):
        for j in range(n):
            if H.alpha[i, j] != 0:
                out += 2.0 * H.alpha[i, j] * (ad[i] @ a[j])
            if H.zeta[i, j] != 0:
                out += H.zeta[i, j] * (a[i] @ a[j])
                out += nu * np.conj(H.zeta[i, j]) * (ad[i] @ ad[j])
    out = out.toarray()
    return 0.5 * (out + out.conj().T)


def dense_number_operator(species, n, d) -> np.ndarray:
    a = sparse_ladder_ops(species, n, d)
    return sum(x.conj().T @ x for x in a).toarray()


def dense_gibbs(hamiltonian, beta) -> np.ndarray:
    """``exp(-beta H) / Z`` for a Hermitian matrix."""
    h = np.asarray(hamiltonian)
    if np.iscomplexobj(h) and not np.any(h.imag):
        h = h.real  # real symmetric eigensolvers are several times faster
    e, v = np.linalg.eigh(h)
    w = np.exp(-beta * (e - e.min()))
    w /= w.sum()
    return (v * w) @ v.conj().T


def dense_moments(rho, species, n, d) -> Moments:
    """First and second ladder moments of a dense state."""
    a = sparse_ladder_ops(species, n, d)
    ad = [x.conj().T.tocsr() for x in a]
    tr = np.trace(rho)

    def expect(op):
        # Tr[rho A] = sum_ij rho_ji A_ij
        return op.multiply(rho.T).sum() / tr

    first = np.array([expect(x) for x in a])
    nn = np.empty((n, n), dtype=complex)
    aa = np.empty((n, n), dtype=complex)
    for i in range(n):
        for j in range(n):
            nn[i, j] = expect(ad[i] @ a[j])
            aa[i, j] = expect(a[i] @ a[j])
    return Moments(np.r_[first, first.conj()], complete_covariance(species, nn, aa))


def trace_distance(rho, sigma) -> float:
    """``||rho - sigma||_1 / 2`` for Hermitian matrices."""
    diff = rho - sigma
    diff = 0.5 * (diff + diff.conj().T)
    return 0.5 * float(np.abs(np.linalg.eigvalsh(diff)).sum())


@dataclass
class DenseThermalState:
    rho: np.ndarray
    moments: Moments
    local_dim: int


def exact_oracle(H: HamiltonMatrix, spec: ThermalSpec, M: int = 2) -> DenseThermalState:
    """Dense Gibbs state ``exp(-beta (H_hat - mu N_hat)) / Z`` and its moments.

    Raises
    ------
    ValueError
        If the Fock-space dimension exceeds ``MAX_DENSE_DIM``.
    """
    n, d = H.n_modes, _local_dim(H, M)
    _check_dim(n, d)
    h = dense_hamiltonian(H, d)
    if spec.mu != 0.0:
        if not H.species.is_fermionic:
            raise ValueError("chemical potential is only defined for fermions")
        h = h - spec.mu * dense_number_operator(H.species, n, d)
    rho = dense_gibbs(h, spec.beta)
    return DenseThermalState(rho, dense_moments(rho, H.species, n, d), d)
