"""MPO representations of circuit gates and of the normal-mode thermal state.

Gates are dense exponentials of their generators on one or two sites,
written in Jordan-Wigner form for fermions. For two adjacent sites the
strings of a bilinear cancel outside the pair, so the two-site ladder
operators of :func:`gaussmpo.operators.dense_ladder_ops` suffice. Bosonic
generators are projected onto ``M`` Fock levels before exponentiation.

Conventions match :func:`gaussmpo.circuits.single_particle_matrix`: a gate
``G`` acts on states as ``rho -> G rho G^dag`` and satisfies
``G a_hat G^dag = R a_hat``.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.linalg import expm
from scipy.special import logsumexp

from .circuits import GateSpec
from .gaussian import NormalModeDecomposition, Species, ThermalSpec
from .mpo import Mpo, mpo_from_dense
from .operators import SIGMA_X, dense_ladder_ops

__all__ = [
    "GateMpo",
    "thermal_product_mpo",
    "site_populations",
    "bosonic_gate",
    "fermionic_gate",
    "gate_mpo",
    "dense_gate",
    "layer_mpo",
    "gate_layers_mpo",
]

GATE_SV_TOL = 1e-14


@dataclass(frozen=True)
class GateMpo:
    """Local MPO of a gate on its own sites.

    Attributes
    ----------
    mpo : Mpo
        One tensor per site in ``spec.sites``.
    spec : GateSpec
    exactness : str
        ``"exact"`` or ``"truncated(M)"``.
    """

    mpo: Mpo
    spec: GateSpec
    exactness: str

    @property
    def sites(self):
        return self.spec.sites

    def embed(self, n_sites, phys_dim) -> Mpo:
        """Gate on an ``n_sites`` chain, identity elsewhere."""
        eye = np.eye(phys_dim, dtype=complex)[None, :, :, None]
        tensors = [eye] * n_sites
        for s, t in zip(self.sites, self.mpo.tensors):
            tensors[s] = t
        return Mpo(tensors)


def site_populations(d, beta, M, mu=0.0):
    """Normalized Gibbs populations ``p_n ~ exp(-2 beta (d - mu/2) n)``, ``n < M``."""
    logw = -2.0 * beta * (float(d) - 0.5 * mu) * np.arange(M)
    return np.exp(logw - logsumexp(logw))


def thermal_product_mpo(nmd: NormalModeDecomposition, spec: ThermalSpec, M: int,
                        site_modes=None) -> Mpo:
    """Rank-1 MPO of the thermal state of the normal modes.

    Parameters
    ----------
    nmd : NormalModeDecomposition
    spec : ThermalSpec
    M : int
        Local dimension; forced to 2 for fermions.
    site_modes : sequence of int, optional
        Normal mode hosted by each site. Defaults to the identity order.
    """
    species = nmd.species
    n = nmd.n_modes
    if species.is_fermionic:
        M = 2
    elif spec.mu != 0.0:
        raise ValueError("chemical potential is only defined for fermions")
    if M < 1:
        raise ValueError("M must be positive")
    if site_modes is None:
        site_modes = range(n)
    site_modes = list(site_modes)
    if sorted(site_modes) != list(range(n)):
        raise ValueError("site_modes must be a permutation of the modes")
    ops = [np.diag(site_populations(nmd.D[k], spec.beta, M, spec.mu)) for k in site_modes]
    return Mpo([o.astype(complex)[None, :, :, None] for o in ops])


@lru_cache(maxsize=None)
def _ladders(species, d):
    return tuple(dense_ladder_ops(species, 2, d))


def _generator(kind, theta, species, d):
    """Anti-Hermitian two-site generator ``K`` with ``G = expm(K)``."""
    a0, a1 = _ladders(species, d)
    if kind == "beam_splitter":
        h = a0.conj().T @ a1
        return 1j * theta * (h + h.conj().T)
    if kind == "squeeze_pair":
        h = a0.conj().T @ a1.conj().T
        return theta * (h - h.conj().T)
    raise ValueError(kind)


@lru_cache(maxsize=4096)
def _dense_cached(kind, theta, phi, species, d):
    if kind == "phase_shifter":
        out = np.diag(np.exp(1j * phi * np.arange(d)))
    elif kind == "identity_mode":
        out = np.eye(d, dtype=complex)
    elif kind == "swap_mode":
        out = SIGMA_X.copy()
    elif kind == "squeeze_single":
        a = dense_ladder_ops(species, 1, d)[0]
        out = expm(0.5 * theta * (a @ a - a.conj().T @ a.conj().T))
    elif kind == "beam_splitter":
        out = expm(_generator(kind, theta, species, d))
        if phi != 0.0:
            phase = np.kron(np.diag(np.exp(1j * phi * np.arange(d))), np.eye(d))
            out = out @ phase
    elif kind == "squeeze_pair":
        out = expm(_generator(kind, theta, species, d))
    else:
        raise ValueError(kind)
    out = np.asarray(out, dtype=complex)
    out.setflags(write=False)
    return out


def _check_kind(spec, species):
    if species.is_fermionic and spec.kind == "squeeze_single":
        raise ValueError("single-mode squeezing is not a fermionic gate")
    if not species.is_fermionic and spec.kind in ("squeeze_pair", "swap_mode"):
        raise ValueError(f"{spec.kind} is not a bosonic gate")


def dense_gate(spec: GateSpec, species, M: int = 2) -> np.ndarray:
    """Dense matrix of a gate on its own sites (read-only, cached)."""
    species = Species.parse(species)
    _check_kind(spec, species)
    d = 2 if species.is_fermionic else int(M)
    if d < 2:
        raise ValueError("M must be at least 2")
    return _dense_cached(spec.kind, spec.theta, spec.phi, species, d)


def _to_gate_mpo(spec, species, M):
    d = 2 if species.is_fermionic else M
    dense = dense_gate(spec, species, M)
    if len(spec.sites) == 1:
        mpo = Mpo([dense[None, :, :, None]])
    else:
        mpo = mpo_from_dense(dense, [d, d], tol=GATE_SV_TOL)
    if species.is_fermionic or spec.kind not in ("squeeze_single",):
        exactness = "exact"
    else:
        exactness = f"truncated({M})"
    return GateMpo(mpo, spec, exactness)


def bosonic_gate(spec: GateSpec, M: int) -> GateMpo:
    """Gate MPO on ``M`` Fock levels per site."""
    if M < 2:
        raise ValueError("M must be at least 2")
    return _to_gate_mpo(spec, Species.BOSONIC, int(M))


def fermionic_gate(spec: GateSpec) -> GateMpo:
    """Gate MPO on Jordan-Wigner qubits."""
    return _to_gate_mpo(spec, Species.FERMIONIC, 2)


def gate_mpo(spec: GateSpec, species, M: int = 2) -> GateMpo:
    species = Species.parse(species)
    if species.is_fermionic:
        return fermionic_gate(spec)
    return bosonic_gate(spec, M)


def layer_mpo(gates, n_sites, species, M=2) -> Mpo:
    """One MPO for a set of gates acting on disjoint sites."""
    species = Species.parse(species)
    d = 2 if species.is_fermionic else M
    eye = np.eye(d, dtype=complex)[None, :, :, None]
    tensors = [eye] * n_sites
    used = set()
    for g in gates:
        if used.intersection(g.sites):
            raise ValueError("gates in one layer must act on disjoint sites")
        used.update(g.sites)
        local = gate_mpo(g, species, M)
        for s, t in zip(g.sites, local.mpo.tensors):
            tensors[s] = t
    return Mpo(tensors)


def gate_layers_mpo(plan, M=2):
    """Layer MPOs of a circuit plan, in application order."""
    return [layer_mpo(layer, plan.n_modes, plan.species, M) for layer in plan.layers()]
