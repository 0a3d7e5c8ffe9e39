"""Matrix product operators with floating-point-operation accounting.

Site tensors are indexed ``(left, ket, bra, right)``. Every product,
canonicalization and compression adds its cost to an :class:`FpoLedger`,
counting one complex multiply or add as one fpo:

* product of two MPOs, per site: ``r_{l-1} s_{l-1} r_l s_l d^2 (2 d - 1)``;
* QR of an ``m x n`` matrix: ``m n min(m, n)``;
* shifting the ``R`` factor of a QR into the neighbour, a ``(k x n) (n x p)``
  product: ``k p (2 n - 1)``;
* SVD of an ``m x n`` matrix during compression: ``m n^2``;
* shifting ``S V^dag`` (``k x n``) into the neighbour (``n x p``): ``k^2 n + k p n``.

The compression entries count multiplications only, as in the usual
per-site cost table for SVD compression.
"""

import csv
import threading
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from .gaussian import Moments, Species, complete_covariance
from .operators import ladder_string, string_product

__all__ = [
    "Mpo",
    "CompressionConfig",
    "FpoLedger",
    "BondTrace",
    "identity_mpo",
    "product_mpo",
    "mpo_from_dense",
    "random_mpo",
    "mpo_dot",
    "canonicalize",
    "svd_compress",
    "apply_gate",
    "trace",
    "normalize",
    "expectation",
    "measure_moments",
]

LEDGER_KINDS = ("dot", "qr", "svd", "matmul_shift")


class Mpo:
    """Operator on a chain of sites, stored as a list of 4-index tensors.

    Parameters
    ----------
    tensors : list of ndarray
        Tensor ``l`` has shape ``(r_l, d_l, d_l, r_{l+1})`` with ``r_0 = r_N = 1``.
    canonical : {None, "left", "right"}
        Orthonormality of the site tensors, if known.
    """

    def __init__(self, tensors, canonical=None):
        tensors = [np.asarray(t, dtype=complex) for t in tensors]
        if not tensors:
            raise ValueError("an MPO needs at least one site")
        if tensors[0].shape[0] != 1 or tensors[-1].shape[3] != 1:
            raise ValueError("boundary bond dimensions must be 1")
        for a, b in zip(tensors[:-1], tensors[1:]):
            if a.shape[3] != b.shape[0]:
                raise ValueError("inconsistent bond dimensions")
        for t in tensors:
            if t.ndim != 4 or t.shape[1] != t.shape[2]:
                raise ValueError("site tensors must be (left, ket, bra, right) with equal ket/bra dims")
        self.tensors = tensors
        self.canonical = canonical

    @property
    def n_sites(self) -> int:
        return len(self.tensors)

    @property
    def phys_dims(self) -> List[int]:
        return [t.shape[1] for t in self.tensors]

    @property
    def bond_dims(self) -> List[int]:
        return [1] + [t.shape[3] for t in self.tensors]

    def copy(self):
        return Mpo([t.copy() for t in self.tensors], self.canonical)

    def dagger(self):
        return Mpo([t.conj().transpose(0, 2, 1, 3) for t in self.tensors])

    def scaled(self, c):
        tensors = [t.copy() for t in self.tensors]
        tensors[0] = tensors[0] * c
        return Mpo(tensors, self.canonical)

    def to_dense(self) -> np.ndarray:
        """Dense ``prod(d) x prod(d)`` matrix (small chains only)."""
        out = self.tensors[0][0]
        for t in self.tensors[1:]:
            out = np.tensordot(out, t, axes=([-1], [0]))
        out = out[..., 0]
        n = self.n_sites
        out = out.transpose(list(range(0, 2 * n, 2)) + list(range(1, 2 * n, 2)))
        dim = int(np.prod(self.phys_dims))
        return out.reshape(dim, dim)

    def __repr__(self):
        return f"Mpo(n_sites={self.n_sites}, phys_dims={self.phys_dims}, bond_dims={self.bond_dims})"


@dataclass(frozen=True)
class CompressionConfig:
    """Truncation rule for SVD compression.

    Attributes
    ----------
    eps_rel : float
        Largest relative discarded weight (squared singular values) per bond.
    r_max : int, optional
        Hard cap on the bond dimension.
    """

    eps_rel: float = 1e-7
    r_max: Optional[int] = None

    def __post_init__(self):
        if self.eps_rel < 0:
            raise ValueError("eps_rel must be non-negative")
        if self.r_max is not None and self.r_max < 1:
            raise ValueError("r_max must be positive")


class FpoLedger:
    """Cumulative fpo counts per operation kind.

    Integer addition is associative, so totals do not depend on the order in
    which concurrent workers report; a lock guards the updates.
    """

    def __init__(self):
        self.counters = {k: 0 for k in LEDGER_KINDS}
        self._lock = threading.Lock()

    def add(self, kind, count):
        if kind not in self.counters:
            raise KeyError(kind)
        with self._lock:
            self.counters[kind] += int(count)

    @property
    def total(self) -> int:
        return sum(self.counters.values())

    def as_dict(self):
        out = dict(self.counters)
        out["total"] = self.total
        return out

    def __repr__(self):
        return f"FpoLedger({self.as_dict()})"


def _charge(ledger, kind, count):
    if ledger is not None:
        ledger.add(kind, count)


def matmul_fpos(k, n, p):
    """Cost of a ``(k x n) (n x p)`` matrix product."""
    return k * p * (2 * n - 1)


def decomposition_fpos(m, n):
    """Cost of a QR of an ``m x n`` matrix."""
    return m * n * min(m, n)


class BondTrace:
    """Bond dimensions recorded after each applied gate or layer."""

    def __init__(self):
        self.rows = []

    def record(self, index, mpo):
        for b, r in enumerate(mpo.bond_dims[1:-1], start=1):
            self.rows.append((index, b, r))

    def max_rank(self):
        return max((r for _, _, r in self.rows), default=1)

    def write_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["gate_index", "bond_index", "rank"])
            w.writerows(self.rows)


def identity_mpo(dims) -> Mpo:
    return Mpo([np.eye(d, dtype=complex)[None, :, :, None] for d in dims])


def product_mpo(ops) -> Mpo:
    """Rank-1 MPO of a tensor product of single-site matrices."""
    return Mpo([np.asarray(o, dtype=complex)[None, :, :, None] for o in ops])


def mpo_from_dense(op, dims, tol=1e-14) -> Mpo:
    """Exact MPO of a dense operator by successive SVDs.

    Singular values below ``tol`` times the largest one are dropped.
    """
    dims = list(dims)
    n = len(dims)
    op = np.asarray(op, dtype=complex).reshape(dims + dims)
    perm = [x for k in range(n) for x in (k, n + k)]
    rest = op.transpose(perm).reshape(1, -1)
    tensors = []
    for k in range(n - 1):
        r = rest.shape[0]
        mat = rest.reshape(r * dims[k] ** 2, -1)
        u, s, vh = np.linalg.svd(mat, full_matrices=False)
        keep = max(1, int(np.sum(s > tol * s[0]))) if s[0] > 0 else 1
        tensors.append(u[:, :keep].reshape(r, dims[k], dims[k], keep))
        rest = s[:keep, None] * vh[:keep]
    tensors.append(rest.reshape(rest.shape[0], dims[-1], dims[-1], 1))
    return Mpo(tensors)


def random_mpo(dims, bonds, rng) -> Mpo:
    """Random complex MPO with interior bond dimensions ``bonds``."""
    full = [1] + list(bonds) + [1]
    tensors = []
    for k, d in enumerate(dims):
        shape = (full[k], d, d, full[k + 1])
        tensors.append(rng.normal(size=shape) + 1j * rng.normal(size=shape))
    return Mpo(tensors)


def mpo_dot(A: Mpo, B: Mpo, ledger: Optional[FpoLedger] = None) -> Mpo:
    """Operator product ``A B`` (bra legs of ``A`` contracted with ket legs of ``B``)."""
    if A.n_sites != B.n_sites or A.phys_dims != B.phys_dims:
        raise ValueError("MPOs must have equal length and physical dimensions")
    tensors = []
    cost = 0
    for a, b in zip(A.tensors, B.tensors):
        ra, d, _, rb = a.shape
        sa, _, _, sb = b.shape
        c = np.einsum("aikb,ckjd->acijbd", a, b, optimize=True)
        tensors.append(c.reshape(ra * sa, d, d, rb * sb))
        cost += ra * sa * rb * sb * d * d * (2 * d - 1)
    _charge(ledger, "dot", cost)
    return Mpo(tensors)


def canonicalize(M: Mpo, ledger: Optional[FpoLedger] = None, direction: str = "left") -> Mpo:
    """QR sweep producing a left- or right-canonical MPO.

    Parameters
    ----------
    M : Mpo
    ledger : FpoLedger, optional
    direction : {"left", "right"}
        ``"left"`` sweeps left to right and leaves every tensor but the last
        left-orthonormal; ``"right"`` is the mirror image.
    """
    tensors = [t.copy() for t in M.tensors]
    n = len(tensors)
    if direction == "left":
        for k in range(n - 1):
            r0, d, _, r1 = tensors[k].shape
            q, r = np.linalg.qr(tensors[k].reshape(r0 * d * d, r1))
            kk = q.shape[1]
            _charge(ledger, "qr", decomposition_fpos(r0 * d * d, r1))
            tensors[k] = q.reshape(r0, d, d, kk)
            nxt = tensors[k + 1]
            _, d2, _, r2 = nxt.shape
            tensors[k + 1] = (r @ nxt.reshape(r1, -1)).reshape(kk, d2, d2, r2)
            _charge(ledger, "matmul_shift", matmul_fpos(kk, r1, d2 * d2 * r2))
    elif direction == "right":
        for k in range(n - 1, 0, -1):
            r0, d, _, r1 = tensors[k].shape
            q, r = np.linalg.qr(tensors[k].reshape(r0, d * d * r1).T)
            kk = q.shape[1]
            _charge(ledger, "qr", decomposition_fpos(r0, d * d * r1))
            tensors[k] = q.T.reshape(kk, d, d, r1)
            prv = tensors[k - 1]
            rp, dp, _, _ = prv.shape
            tensors[k - 1] = (prv.reshape(-1, r0) @ r.T).reshape(rp, dp, dp, kk)
            _charge(ledger, "matmul_shift", matmul_fpos(rp * dp * dp, r0, kk))
    else:
        raise ValueError("direction must be 'left' or 'right'")
    return Mpo(tensors, direction)


def _truncation_rank(s, cfg):
    """Number of singular values to keep and the relative discarded weight."""
    w = s**2
    total = w.sum()
    k = len(s)
    if total == 0:
        return 1, 0.0
    w = w / total
    tail = np.cumsum(w[::-1])
    n_drop = int(np.searchsorted(tail, cfg.eps_rel, side="right"))
    keep = max(1, k - n_drop)
    if cfg.r_max is not None:
        keep = min(keep, cfg.r_max)
    return keep, float(w[keep:].sum())


def svd_compress(M: Mpo, cfg: CompressionConfig, ledger: Optional[FpoLedger] = None):
    """Truncate bond dimensions by one left-to-right SVD sweep.

    The MPO is first brought into right-canonical form (skipped if already
    there), so every truncation acts on an orthonormal environment.

    Returns
    -------
    compressed : Mpo
        Left-canonical up to the last site.
    discarded : list of float
        Relative discarded weight per interior bond.
    """
    if M.canonical != "right":
        M = canonicalize(M, ledger, direction="right")
    tensors = [t.copy() for t in M.tensors]
    discarded = []
    for k in range(len(tensors) - 1):
        r0, d, _, r1 = tensors[k].shape
        m = r0 * d * d
        u, s, vh = np.linalg.svd(tensors[k].reshape(m, r1), full_matrices=False)
        _charge(ledger, "svd", m * r1 * r1)
        keep, lost = _truncation_rank(s, cfg)
        discarded.append(lost)
        tensors[k] = u[:, :keep].reshape(r0, d, d, keep)
        sv = s[:keep, None] * vh[:keep]
        nxt = tensors[k + 1]
        _, d2, _, r2 = nxt.shape
        tensors[k + 1] = (sv @ nxt.reshape(r1, -1)).reshape(keep, d2, d2, r2)
        _charge(ledger, "matmul_shift", keep * keep * r1 + keep * d2 * d2 * r2 * r1)
    return Mpo(tensors, "left"), discarded


def apply_gate(rho: Mpo, gate: Mpo, cfg: CompressionConfig, ledger: Optional[FpoLedger] = None,
               discarded: Optional[list] = None) -> Mpo:
    """Conjugate a state by a gate, ``rho -> G rho G^dag``, compressing after each product."""
    left, lost1 = svd_compress(mpo_dot(gate, rho, ledger), cfg, ledger)
    out, lost2 = svd_compress(mpo_dot(left, gate.dagger(), ledger), cfg, ledger)
    if discarded is not None:
        discarded.extend(lost1 + lost2)
    return out


def _site_traces(M, ops=None):
    """Per-site transfer matrices ``sum_ij W[:, i, j, :] O[j, i]``."""
    out = []
    for k, t in enumerate(M.tensors):
        if ops is None or ops[k] is None:
            out.append(np.einsum("aiib->ab", t))
        else:
            out.append(np.einsum("aijb,ji->ab", t, ops[k]))
    return out


def trace(rho: Mpo) -> complex:
    env = np.ones((1, 1), dtype=complex)
    for e in _site_traces(rho):
        env = env @ e
    return complex(env[0, 0])


def normalize(rho: Mpo) -> Mpo:
    tr = trace(rho)
    if abs(tr) == 0:
        raise ValueError("cannot normalize an operator with zero trace")
    return rho.scaled(1.0 / tr)


class _Environment:
    """Cached left/right identity environments for repeated local expectation values."""

    def __init__(self, rho):
        self.rho = rho
        self.id_tr = _site_traces(rho)
        n = rho.n_sites
        self.left = [np.ones((1, 1), dtype=complex)]
        for e in self.id_tr:
            self.left.append(self.left[-1] @ e)
        self.right = [np.ones((1, 1), dtype=complex)]
        for e in reversed(self.id_tr):
            self.right.append(e @ self.right[-1])
        self.right = self.right[::-1]
        self.norm = self.left[-1][0, 0]

    def expect(self, ops):
        """``Tr[rho O] / Tr[rho]`` for a site-wise operator list."""
        d = self.rho.phys_dims
        nontriv = [k for k, o in enumerate(ops) if not np.allclose(o, np.eye(d[k]), rtol=0, atol=0)]
        if not nontriv:
            return 1.0 + 0j
        lo, hi = nontriv[0], nontriv[-1]
        env = self.left[lo]
        for k in range(lo, hi + 1):
            env = env @ np.einsum("aijb,ji->ab", self.rho.tensors[k], ops[k])
        return complex((env @ self.right[hi + 1])[0, 0] / self.norm)


def expectation(rho: Mpo, ops) -> complex:
    """Normalized expectation value of a tensor-product operator."""
    return _Environment(rho).expect(ops)


def measure_moments(rho: Mpo, species) -> Moments:
    """First and second moments of the ladder operators.

    Fermionic ladder operators carry their Jordan-Wigner strings. The
    normal-ordered expectation values ``<a_i^dag a_j>`` and ``<a_i a_j>`` are
    measured; the remaining blocks of the 2N x 2N matrix follow from the
    (anti)commutation relations.
    """
    species = Species.parse(species)
    env = _Environment(rho)
    if abs(env.norm) == 0:
        raise ValueError("state has zero trace")
    n = rho.n_sites
    d = rho.phys_dims[0]
    low = [ladder_string(species, n, d, k) for k in range(n)]
    up = [ladder_string(species, n, d, k, dagger=True) for k in range(n)]
    first = np.array([env.expect(low[k]) for k in range(n)])
    nn = np.empty((n, n), dtype=complex)
    aa = np.empty((n, n), dtype=complex)
    for i in range(n):
        for j in range(n):
            nn[i, j] = env.expect(string_product(up[i], low[j]))
            aa[i, j] = env.expect(string_product(low[i], low[j]))
    m = np.r_[first, first.conj()]
    return Moments(m, complete_covariance(species, nn, aa))
