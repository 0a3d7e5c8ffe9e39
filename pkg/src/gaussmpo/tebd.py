"""Imaginary-time TEBD for nearest-neighbour quadratic Hamiltonians.

The thermal state is grown from the maximally mixed state as
``rho(beta) = U rho(0) U`` with ``U ~ exp(-beta H / 2)`` split into even and
odd bond layers by a Suzuki-Trotter formula of order 1, 2 or 4.
"""

from dataclasses import dataclass
from typing import List, Optional

import numpy as np
from scipy.linalg import expm

from .gaussian import HamiltonMatrix, Species
from .mpo import CompressionConfig, FpoLedger, Mpo, _truncation_rank, apply_gate, normalize
from .operators import dense_ladder_ops

__all__ = [
    "LocalHamiltonian",
    "TrotterConfig",
    "trotter_sequence",
    "trotter_layers",
    "maximally_mixed",
    "evolve",
]


@dataclass
class LocalHamiltonian:
    """``H_hat = sum_k h_k`` with ``h_k`` acting on sites ``(k, k + 1)``.

    Attributes
    ----------
    n_sites : int
    terms : list of ndarray
        Hermitian ``d^2 x d^2`` matrices.
    species : Species
    local_dim : int
    """

    n_sites: int
    terms: List[np.ndarray]
    species: Species
    local_dim: int

    def __post_init__(self):
        if len(self.terms) != self.n_sites - 1:
            raise ValueError("need one term per bond")
        d2 = self.local_dim**2
        for h in self.terms:
            if h.shape != (d2, d2):
                raise ValueError("terms must be d^2 x d^2")
            if np.linalg.norm(h - h.conj().T) > 1e-12 * max(1.0, np.linalg.norm(h)):
                raise ValueError("terms must be Hermitian")

    @classmethod
    def from_hamilton_matrix(cls, H: HamiltonMatrix, M: int = 2):
        """Split a nearest-neighbour quadratic Hamiltonian into bond terms.

        On-site terms (including the constant ``nu alpha_jj``) are shared
        equally between the two bonds of a site; boundary sites give their
        full share to their only bond.
        """
        n = H.n_modes
        if n < 2:
            raise ValueError("TEBD needs at least two sites")
        for M_ in (H.alpha, H.zeta):
            far = np.triu(np.abs(M_), 2)
            if np.any(far > 0) or np.any(np.tril(np.abs(M_), -2) > 0):
                raise ValueError("Hamiltonian is not nearest-neighbour")
        species = H.species
        d = 2 if species.is_fermionic else int(M)
        nu = species.nu
        a = dense_ladder_ops(species, 2, d)
        ad = [x.conj().T for x in a]
        eye = np.eye(d * d, dtype=complex)

        def onsite(j, s):
            out = 2.0 * H.alpha[j, j] * (ad[s] @ a[s]) + nu * H.alpha[j, j].real * eye
            if H.zeta[j, j] != 0:
                out = out + H.zeta[j, j] * (a[s] @ a[s]) + nu * np.conj(H.zeta[j, j]) * (ad[s] @ ad[s])
            return out

        terms = []
        for k in range(n - 1):
            h = np.zeros((d * d, d * d), dtype=complex)
            for (i, j), (p, q) in (((k, k + 1), (0, 1)), ((k + 1, k), (1, 0))):
                h += 2.0 * H.alpha[i, j] * (ad[p] @ a[q])
                h += H.zeta[i, j] * (a[p] @ a[q]) + nu * np.conj(H.zeta[i, j]) * (ad[p] @ ad[q])
            for j, s in ((k, 0), (k + 1, 1)):
                share = 1.0 if j in (0, n - 1) else 0.5
                h += share * onsite(j, s)
            terms.append(0.5 * (h + h.conj().T))
        return cls(n, terms, species, d)

    def dense(self) -> np.ndarray:
        """Full Hamiltonian on ``d**N`` states (small chains only)."""
        d, n = self.local_dim, self.n_sites
        out = np.zeros((d**n, d**n), dtype=complex)
        for k, h in enumerate(self.terms):
            out += np.kron(np.kron(np.eye(d**k), h), np.eye(d ** (n - k - 2)))
        return out


@dataclass(frozen=True)
class TrotterConfig:
    """Suzuki-Trotter order and number of steps.

    ``delta_beta`` is derived from ``beta`` when given.
    """

    order: int = 2
    n_steps: int = 10
    beta: Optional[float] = None

    def __post_init__(self):
        if self.order not in (1, 2, 4):
            raise ValueError("order must be 1, 2 or 4")
        if self.n_steps < 1:
            raise ValueError("n_steps must be positive")

    @property
    def delta_beta(self) -> float:
        if self.beta is None:
            raise ValueError("beta not set")
        return self.beta / self.n_steps

    @staticmethod
    def fourth_order_steps(delta_beta):
        """Sub-steps ``(db1, db2)`` of the fourth-order composition."""
        db1 = delta_beta / (4.0 - 4.0 ** (1.0 / 3.0))
        return db1, delta_beta - 4.0 * db1


def trotter_sequence(order, tau):
    """``(parity, t)`` factors approximating ``exp(-tau H)``, rightmost applied first.

    Returned in application order; ``parity`` 0 is the even bonds.
    """
    if order == 1:
        return [(1, tau), (0, tau)]
    if order == 2:
        return [(0, tau / 2), (1, tau), (0, tau / 2)]
    if order == 4:
        t1, t2 = TrotterConfig.fourth_order_steps(tau)
        out = []
        for t in (t1, t1, t2, t1, t1):
            out += trotter_sequence(2, t)
        return out
    raise ValueError("order must be 1, 2 or 4")


def _merge(seq):
    """Fuse consecutive factors of equal parity (they commute)."""
    out = []
    for p, t in seq:
        if out and out[-1][0] == p:
            out[-1] = (p, out[-1][1] + t)
        else:
            out.append((p, t))
    return out


def _bond_tensors(g, d, gate_comp):
    """Split a two-site gate into two MPO tensors by an SVD."""
    mat = g.reshape(d, d, d, d).transpose(0, 2, 1, 3).reshape(d * d, d * d)
    u, s, vh = np.linalg.svd(mat, full_matrices=False)
    keep = max(1, int(np.sum(s > 1e-14 * s[0])))
    if gate_comp is not None:
        keep = min(keep, _truncation_rank(s, gate_comp)[0])
    left = (u[:, :keep] * s[:keep]).reshape(1, d, d, keep)
    right = vh[:keep].reshape(keep, d, d, 1)
    return left, right


def _layer(H, parity, tau, gate_comp):
    d = H.local_dim
    eye = np.eye(d, dtype=complex)[None, :, :, None]
    tensors = [eye] * H.n_sites
    for k in range(parity, H.n_sites - 1, 2):
        g = expm(-tau * H.terms[k])
        tensors[k], tensors[k + 1] = _bond_tensors(g, d, gate_comp)
    return Mpo(tensors)


def trotter_layers(H: LocalHamiltonian, cfg: TrotterConfig, delta_beta=None,
                   gate_comp: Optional[CompressionConfig] = None) -> List[Mpo]:
    """Layer MPOs of one Trotter step approximating ``exp(-delta_beta H)``.

    The list is in application order (the first layer acts first on a ket).
    Fourth order yields five unmerged second-order blocks.
    """
    if delta_beta is None:
        delta_beta = cfg.delta_beta
    return [_layer(H, p, t, gate_comp) for p, t in trotter_sequence(cfg.order, delta_beta)]


def maximally_mixed(n_sites, d) -> Mpo:
    return Mpo([np.eye(d, dtype=complex)[None, :, :, None] / d for _ in range(n_sites)])


def evolve(rho0: Mpo, H: LocalHamiltonian, beta: float, cfg: TrotterConfig,
           comp: CompressionConfig, gate_comp: Optional[CompressionConfig] = None,
           ledger: Optional[FpoLedger] = None, bond_trace=None, merge: bool = True) -> Mpo:
    """Cool ``rho0`` to inverse temperature ``beta``.

    Each factor of the Trotter sequence for ``exp(-beta H / 2)`` is applied
    from both sides, compressing after every MPO-MPO product. With ``merge``
    consecutive factors of equal parity are fused across step boundaries.
    """
    if beta < 0:
        raise ValueError("beta must be non-negative")
    if beta == 0:
        return rho0
    tau = 0.5 * beta / cfg.n_steps
    seq = trotter_sequence(cfg.order, tau) * cfg.n_steps
    if merge:
        seq = _merge(seq)
    cache = {}
    rho = rho0
    for idx, (p, t) in enumerate(seq):
        key = (p, round(t, 15))
        if key not in cache:
            cache[key] = _layer(H, p, t, gate_comp)
        rho = apply_gate(rho, cache[key], comp, ledger)
        if bond_trace is not None:
            bond_trace.record(idx, rho)
    return normalize(rho)
