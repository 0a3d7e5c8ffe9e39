"""Beam-splitter meshes and the three-layer Gaussian circuit.

Every gate ``G`` acts on the state as ``rho -> G rho G^dag`` and on the ladder
vector as ``G a_hat G^dag = R_G a_hat``. Applying gates ``G_1, ..., G_K`` in
list order realizes the transformation ``R_1 R_2 ... R_K``; the synthesized
plan therefore multiplies out to the Bogoliubov matrix of the normal modes,
so that the normal-mode product state is mapped to the thermal state.

Passive elements are Mach-Zehnder style: a phase shifter ``P(phi)`` on the
upper site followed by a beam splitter ``B(theta)``, with single-particle
blocks ``P -> diag(exp(-i phi), 1)`` and
``B -> [[cos theta, -i sin theta], [-i sin theta, cos theta]]``.
"""

import json
from dataclasses import asdict, dataclass, field
from typing import List, Tuple

import numpy as np

from .gaussian import BlochMessiahFactors, Species

__all__ = [
    "GateSpec",
    "CircuitPlan",
    "reck_decompose",
    "clements_decompose",
    "synthesize_circuit",
    "passive_matrix",
    "single_particle_matrix",
    "mesh_depth",
    "reck_arm_depths",
]

GATE_KINDS = ("beam_splitter", "phase_shifter", "squeeze_single", "squeeze_pair", "swap_mode", "identity_mode")
_TWO_SITE = ("beam_splitter", "squeeze_pair")


@dataclass(frozen=True)
class GateSpec:
    """A localized gate.

    Attributes
    ----------
    kind : str
        One of ``GATE_KINDS``.
    sites : tuple of int
        One site, or two adjacent sites ``(i, i + 1)``.
    theta : float
        Mixing angle (beam splitter, fermionic pair squeezer) or squeezing
        parameter ``z`` (bosonic squeezer).
    phi : float
        Phase in ``[0, 2 pi)``.
    layer : int
        Execution layer; gates in one layer act on disjoint sites.
    """

    kind: str
    sites: Tuple[int, ...]
    theta: float = 0.0
    phi: float = 0.0
    layer: int = 0

    def __post_init__(self):
        if self.kind not in GATE_KINDS:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        sites = tuple(int(s) for s in self.sites)
        object.__setattr__(self, "sites", sites)
        if self.kind in _TWO_SITE:
            if len(sites) != 2 or sites[1] != sites[0] + 1:
                raise ValueError(f"{self.kind} must act on adjacent sites (i, i+1)")
        elif len(sites) != 1:
            raise ValueError(f"{self.kind} acts on a single site")
        if not (np.isfinite(self.theta) and np.isfinite(self.phi)):
            raise ValueError("gate parameters must be finite")
        object.__setattr__(self, "phi", float(self.phi) % (2 * np.pi))
        object.__setattr__(self, "theta", float(self.theta))

    def with_layer(self, layer):
        return GateSpec(self.kind, self.sites, self.theta, self.phi, layer)


def _u_phase(phi):
    return np.exp(-1j * phi)


def _u_bs(theta):
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -1j * s], [-1j * s, c]])


def _u_element(theta, phi):
    return np.diag([_u_phase(phi), 1.0]) @ _u_bs(theta)


def passive_block(gate: GateSpec, n: int) -> np.ndarray:
    """N x N single-particle matrix of a passive gate."""
    u = np.eye(n, dtype=complex)
    if gate.kind == "beam_splitter":
        i = gate.sites[0]
        u[i:i + 2, i:i + 2] = _u_element(gate.theta, gate.phi)
    elif gate.kind == "phase_shifter":
        u[gate.sites[0], gate.sites[0]] = _u_phase(gate.phi)
    elif gate.kind != "identity_mode":
        raise ValueError(f"{gate.kind} is not passive")
    return u


def passive_matrix(gates, n) -> np.ndarray:
    """Product of the passive blocks in application order."""
    out = np.eye(n, dtype=complex)
    for g in gates:
        out = out @ passive_block(g, n)
    return out


def single_particle_matrix(gate: GateSpec, n: int, species) -> np.ndarray:
    """2N x 2N matrix ``R`` with ``G a_hat G^dag = R a_hat``.

    The fermionic swap is the local ``sigma_x`` of the Jordan-Wigner chain; it
    exchanges ``f_k`` and ``f_k^dag`` and flips the sign of every ``f_j`` with
    ``j > k``.
    """
    species = Species.parse(species)
    if gate.kind in ("beam_splitter", "phase_shifter", "identity_mode"):
        u = passive_block(gate, n)
        z = np.zeros_like(u)
        return np.block([[u, z], [z, u.conj()]])
    R = np.eye(2 * n, dtype=complex)
    if gate.kind == "squeeze_single":
        if species.is_fermionic:
            raise ValueError("single-mode squeezing is bosonic")
        k = gate.sites[0]
        ch, sh = np.cosh(gate.theta), np.sinh(gate.theta)
        R[k, k] = R[n + k, n + k] = ch
        R[k, n + k] = R[n + k, k] = sh
    elif gate.kind == "squeeze_pair":
        if not species.is_fermionic:
            raise ValueError("pair squeezing is implemented for fermions")
        p, q = gate.sites
        c, s = np.cos(gate.theta), np.sin(gate.theta)
        for r in (p, q, n + p, n + q):
            R[r, r] = c
        R[p, n + q] = R[n + p, q] = -s
        R[q, n + p] = R[n + q, p] = s
    elif gate.kind == "swap_mode":
        if not species.is_fermionic:
            raise ValueError("swap is a fermionic gate")
        k = gate.sites[0]
        R[k, k] = R[n + k, n + k] = 0.0
        R[k, n + k] = R[n + k, k] = 1.0
        for j in range(k + 1, n):
            R[j, j] = R[n + j, n + j] = -1.0
    return R


def _check_unitary(U):
    U = np.asarray(U, dtype=complex)
    if U.ndim != 2 or U.shape[0] != U.shape[1]:
        raise ValueError("expected a square matrix")
    if np.linalg.norm(U.conj().T @ U - np.eye(U.shape[0])) > 1e-10:
        raise ValueError("matrix is not unitary")
    return U.copy()


def _null_lower(x, y):
    """2x2 unitary ``G`` with ``G @ [x, y] = [*, 0]``."""
    nrm = np.hypot(abs(x), abs(y))
    if nrm == 0:
        return np.eye(2, dtype=complex)
    return np.array([[np.conj(x), np.conj(y)], [-y, x]]) / nrm


def _null_left(x, y):
    """2x2 unitary ``H`` with ``[x, y] @ H = [0, *]``."""
    nrm = np.hypot(abs(x), abs(y))
    if nrm == 0:
        return np.eye(2, dtype=complex)
    return np.array([[y, np.conj(x)], [-x, np.conj(y)]]) / nrm


def _split_element(W):
    """Write a 2x2 unitary as ``diag(exp(-i phi), 1) B(theta) diag(delta)``."""
    theta = float(np.arctan2(abs(W[1, 0]), abs(W[1, 1])))
    c, s = np.cos(theta), np.sin(theta)
    unit = lambda z: z / abs(z) if abs(z) > 0 else 1.0
    if s < 1e-13:
        return 0.0, 0.0, np.array([unit(W[0, 0]), unit(W[1, 1])])
    if c < 1e-13:
        return np.pi / 2, 0.0, np.array([unit(1j * W[1, 0]), unit(1j * W[0, 1])])
    d1 = unit(W[1, 1] / c)
    d0 = unit(1j * W[1, 0] / s)
    e = unit(W[0, 0] / (d0 * c))
    return theta, float(-np.angle(e)), np.array([d0, d1])


def _canonical_elements(items, n):
    """Turn a product of nearest-neighbour unitaries and diagonals into elements plus phases."""
    pending = np.ones(n, dtype=complex)
    gates = []
    for kind, payload in items:
        if kind == "diag":
            pending = pending * payload
            continue
        i, W = payload
        W = np.diag(pending[i:i + 2]) @ W
        pending[i:i + 2] = 1.0
        theta, phi, delta = _split_element(W)
        pending[i:i + 2] = delta
        gates.append(GateSpec("beam_splitter", (i, i + 1), theta, phi))
    gates = _assign_layers(gates)
    final = max((g.layer for g in gates), default=-1) + 1
    for k in range(n):
        gates.append(GateSpec("phase_shifter", (k,), 0.0, -np.angle(pending[k]), final))
    return gates


def _assign_layers(gates, start=0):
    """As-soon-as-possible layering over the touched sites."""
    free = {}
    out = []
    for g in gates:
        layer = max([free.get(s, start) for s in g.sites])
        out.append(g.with_layer(layer))
        for s in g.sites:
            free[s] = layer + 1
    return out


def reck_decompose(U) -> List[GateSpec]:
    """Triangular mesh (depth ``2N - 3``) followed by a phase-shifter layer.

    The returned gates satisfy ``passive_matrix(gates, N) == U``.
    """
    U = _check_unitary(U)
    n = U.shape[0]
    items = []
    for j in range(n - 1):
        for r in range(n - 1, j, -1):
            G = _null_lower(U[r - 1, j], U[r, j])
            U[r - 1:r + 1, :] = G @ U[r - 1:r + 1, :]
            items.append(("u2", (r - 1, G.conj().T)))
    items.append(("diag", np.diag(U).copy()))
    return _canonical_elements(items, n)


def clements_decompose(U) -> List[GateSpec]:
    """Rectangular mesh (depth ``N``) followed by a phase-shifter layer."""
    U = _check_unitary(U)
    n = U.shape[0]
    left, right = [], []
    for i in range(n - 1):
        if i % 2 == 0:
            for j in range(i + 1):
                r, c = n - 1 - j, i - j
                H = _null_left(U[r, c], U[r, c + 1])
                U[:, c:c + 2] = U[:, c:c + 2] @ H
                right.append(("u2", (c, H.conj().T)))
        else:
            for j in range(1, i + 2):
                r, c = n + j - i - 2, j - 1
                G = _null_lower(U[r - 1, c], U[r, c])
                U[r - 1:r + 1, :] = G @ U[r - 1:r + 1, :]
                left.append(("u2", (r - 1, G.conj().T)))
    items = left + [("diag", np.diag(U).copy())] + right[::-1]
    return _canonical_elements(items, n)


def mesh_depth(gates) -> int:
    """Number of layers holding two-site elements."""
    return len({g.layer for g in gates if len(g.sites) == 2})


def reck_arm_depths(n) -> np.ndarray:
    """Number of Reck elements touching each site."""
    touches = np.zeros(n, dtype=int)
    for j in range(n - 1):
        for r in range(n - 1, j, -1):
            touches[r - 1] += 1
            touches[r] += 1
    return touches


@dataclass
class CircuitPlan:
    """Ordered gates mapping the normal-mode product state to the thermal state.

    Attributes
    ----------
    species : Species
    n_modes : int
    gates : list of GateSpec
        In application order; ``layer`` is non-decreasing.
    site_modes : list of int
        Normal mode hosted by each site of the initial product state.
    decomposition : str
    direction : str
        ``"normal_to_physical"``: the gates take the normal-mode product state
        to the state in the physical modes.
    """

    species: Species
    n_modes: int
    gates: List[GateSpec]
    site_modes: List[int]
    decomposition: str = "reck"
    direction: str = "normal_to_physical"
    target: np.ndarray = field(default=None, repr=False)

    def layers(self):
        """Gates grouped by layer, in execution order."""
        out = {}
        for g in self.gates:
            out.setdefault(g.layer, []).append(g)
        return [out[k] for k in sorted(out)]

    def count(self, kind) -> int:
        return sum(g.kind == kind for g in self.gates)

    def replay(self) -> np.ndarray:
        """Product of all single-particle matrices in application order."""
        R = np.eye(2 * self.n_modes, dtype=complex)
        for g in self.gates:
            R = R @ single_particle_matrix(g, self.n_modes, self.species)
        return R

    def to_dict(self):
        return {
            "species": self.species.value,
            "n_modes": self.n_modes,
            "decomposition": self.decomposition,
            "direction": self.direction,
            "site_modes": [int(m) for m in self.site_modes],
            "gates": [
                {"kind": g.kind, "sites": list(g.sites), "theta": g.theta, "phi": g.phi, "layer": g.layer}
                for g in self.gates
            ],
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, **kwargs)

    @classmethod
    def from_dict(cls, data):
        gates = [GateSpec(g["kind"], tuple(g["sites"]), g["theta"], g["phi"], g["layer"]) for g in data["gates"]]
        return cls(Species.parse(data["species"]), data["n_modes"], gates, data["site_modes"],
                   data.get("decomposition", "reck"), data.get("direction", "normal_to_physical"))

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


_DECOMPOSE = {"reck": reck_decompose, "clements": clements_decompose}


def _shift_layers(gates, offset):
    return [g.with_layer(g.layer + offset) for g in gates]


def _next_layer(gates):
    return max((g.layer for g in gates), default=-1) + 1


def synthesize_circuit(factors: BlochMessiahFactors, decomposition: str = "reck",
                       populations=None) -> CircuitPlan:
    """Compile Bloch-Messiah factors into a localized gate sequence.

    Parameters
    ----------
    factors : BlochMessiahFactors
    decomposition : {"reck", "clements"}
    populations : array_like, optional
        Mean occupation of each normal mode. With Reck meshes the most
        populated modes are placed on the sites touched by the fewest elements.

    Returns
    -------
    CircuitPlan
        ``plan.replay()`` equals ``plan.target``, the Bogoliubov matrix with
        rows reordered to the site order of the product state.
    """
    if decomposition not in _DECOMPOSE:
        raise ValueError("decomposition must be 'reck' or 'clements'")
    decompose = _DECOMPOSE[decomposition]
    species = factors.species
    n = factors.n_modes
    site_modes = np.arange(n)
    if decomposition == "reck" and populations is not None and n > 1:
        pops = np.asarray(populations, dtype=float)
        by_depth = np.argsort(reck_arm_depths(n), kind="stable")
        by_pop = np.argsort(-pops, kind="stable")
        site_modes = np.empty(n, dtype=int)
        site_modes[by_depth] = by_pop
    U = factors.U[site_modes, :]

    first = decompose(U) if n > 1 else [GateSpec("phase_shifter", (0,), 0.0, -np.angle(U[0, 0]), 0)]
    gates = list(first)

    squeeze = []
    layer = _next_layer(gates)
    for e in factors.squeeze_spec:
        if factors.is_passive:
            break
        if e.kind == "single":
            squeeze.append(GateSpec("squeeze_single", e.modes, e.theta, 0.0, layer))
        elif e.kind == "pair":
            squeeze.append(GateSpec("squeeze_pair", e.modes, e.theta, 0.0, layer))
        elif e.kind == "swap":
            squeeze.append(GateSpec("swap_mode", e.modes, np.pi / 2, 0.0, layer))
    gates += squeeze

    # absorb the difference between the realized squeeze layer and Sbar into V
    r_sq = np.eye(2 * n, dtype=complex)
    for g in squeeze:
        r_sq = r_sq @ single_particle_matrix(g, n, species)
    rest = np.linalg.solve(r_sq, factors.sbar() @ factors.vbar().conj().T)
    if np.linalg.norm(rest[:n, n:]) > 1e-9:
        raise ValueError("squeeze layer does not match the Bloch-Messiah factors")
    second = decompose(rest[:n, :n]) if n > 1 else [GateSpec("phase_shifter", (0,), 0.0, -np.angle(rest[0, 0]), 0)]
    gates += _shift_layers(second, _next_layer(gates))

    target = factors.reassemble()
    perm = np.r_[site_modes, n + site_modes]
    plan = CircuitPlan(species, n, gates, [int(m) for m in site_modes], decomposition, target=target[perm, :])
    err = np.linalg.norm(plan.replay() - plan.target) / max(1.0, np.linalg.norm(plan.target))
    if err > 1e-9:
        raise RuntimeError(f"circuit replay mismatch {err:.2e}")
    return plan
