"""Quadratic Hamiltonians, normal modes and Bloch-Messiah factorization.

Conventions
-----------
The ladder vector is ``a_hat = (a_1, ..., a_N, a_1^dag, ..., a_N^dag)`` and a
quadratic Hamiltonian reads ``H_hat = a_hat^dag H a_hat`` with the Hamilton
matrix ``H = [[alpha, nu zeta^*], [zeta, nu alpha^*]]``. A Bogoliubov matrix
``T`` defines normal modes ``b_hat = T a_hat`` with
``H_hat = b_hat^dag (D (+) nu D) b_hat``.

Second moments are ``gamma[i, j] = <a_hat_i^dag a_hat_j>``, so for a state
that is thermal in the normal modes ``gamma = conj(T^-1) Gamma (T^-1)^T``.
"""

import enum
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np
from scipy.special import expit

__all__ = [
    "Species",
    "HamiltonMatrix",
    "NormalModeDecomposition",
    "SqueezeEntry",
    "BlochMessiahFactors",
    "ThermalSpec",
    "Moments",
    "build_hamilton_matrix",
    "normal_mode_decompose",
    "bloch_messiah",
    "thermal_occupations",
    "exact_thermal_moments",
    "complete_covariance",
    "transform_covariance",
    "relative_covariance_error",
    "min_local_dim",
    "energy_gap",
    "beta_from_resc",
    "random_hamilton_matrix",
    "random_bogoliubov",
    "nmd_from_T",
    "truncated_occupations",
]

_HERM_TOL = 1e-12
_CHECK_TOL = 1e-8
BLOCK_TOL = 1e-8


class Species(enum.Enum):
    """Particle statistics; ``nu`` is +1 for bosons and -1 for fermions."""

    BOSONIC = "bosonic"
    FERMIONIC = "fermionic"

    @property
    def nu(self) -> int:
        return 1 if self is Species.BOSONIC else -1

    @property
    def is_fermionic(self) -> bool:
        return self is Species.FERMIONIC

    @classmethod
    def parse(cls, value) -> "Species":
        if isinstance(value, cls):
            return value
        return cls(str(value).lower())


def _metric(species, n):
    """The (anti)commutator metric ``Omega = diag(1, nu 1)`` for bosons, ``1`` for fermions."""
    if species.is_fermionic:
        return np.eye(2 * n)
    return np.diag(np.r_[np.ones(n), -np.ones(n)])


def _sigma(n):
    """Block swap ``Sigma = [[0, 1], [1, 0]]``."""
    eye = np.eye(n)
    zero = np.zeros((n, n))
    return np.block([[zero, eye], [eye, zero]])


def _rel_norm(x, ref):
    return np.linalg.norm(x) / max(1.0, np.linalg.norm(ref))


@dataclass(frozen=True)
class HamiltonMatrix:
    """Validated (alpha, zeta) blocks of a quadratic Hamiltonian."""

    species: Species
    alpha: np.ndarray
    zeta: np.ndarray

    @property
    def n_modes(self) -> int:
        return self.alpha.shape[0]

    @property
    def matrix(self) -> np.ndarray:
        nu = self.species.nu
        return np.block(
            [[self.alpha, nu * self.zeta.conj()], [self.zeta, nu * self.alpha.conj()]]
        )

    def constant(self) -> float:
        """Offset between ``a_hat^dag H a_hat`` and its normal-ordered form."""
        return float(self.species.nu * np.trace(self.alpha).real)


def build_hamilton_matrix(species, alpha, zeta) -> HamiltonMatrix:
    """Assemble and validate a Hamilton matrix.

    Parameters
    ----------
    species : Species or str
    alpha : array_like, shape (N, N)
        Hermitian number-conserving block.
    zeta : array_like, shape (N, N)
        Pairing block, symmetric for bosons and antisymmetric for fermions.

    Raises
    ------
    ValueError
        If the blocks have inconsistent shapes or the wrong symmetry.
    """
    species = Species.parse(species)
    alpha = np.atleast_2d(np.asarray(alpha, dtype=complex))
    zeta = np.atleast_2d(np.asarray(zeta, dtype=complex))
    if alpha.ndim != 2 or alpha.shape[0] != alpha.shape[1]:
        raise ValueError("alpha must be square")
    if zeta.shape != alpha.shape:
        raise ValueError("alpha and zeta must have the same shape")
    if _rel_norm(alpha - alpha.conj().T, alpha) > _HERM_TOL:
        raise ValueError("alpha is not hermitian")
    sym = zeta - species.nu * zeta.T
    if _rel_norm(sym, zeta) > _HERM_TOL:
        kind = "antisymmetric" if species.is_fermionic else "symmetric"
        raise ValueError(f"zeta must be {kind} for {species.value} modes")
    return HamiltonMatrix(species, alpha, zeta)


@dataclass(frozen=True)
class NormalModeDecomposition:
    """Bogoliubov matrix ``T`` and ascending normal frequencies ``D``."""

    species: Species
    T: np.ndarray
    D: np.ndarray

    @property
    def n_modes(self) -> int:
        return self.D.shape[0]

    @property
    def gamma_block(self) -> np.ndarray:
        return self.T[: self.n_modes, : self.n_modes]

    @property
    def mu_block(self) -> np.ndarray:
        return self.T[: self.n_modes, self.n_modes:]

    def inverse(self) -> np.ndarray:
        """``T^-1`` from the symplectic (bosons) or unitary (fermions) relation."""
        if self.species.is_fermionic:
            return self.T.conj().T
        omega = _metric(self.species, self.n_modes)
        return omega @ self.T.conj().T @ omega

    def is_passive(self, tol=1e-12) -> bool:
        return np.linalg.norm(self.mu_block) < tol


def _fix_row_phases(t_up, n):
    """Make the largest entry of each upper-left row real and positive."""
    gam = t_up[:, :n]
    for i in range(t_up.shape[0]):
        k = int(np.argmax(np.abs(gam[i])))
        if abs(gam[i, k]) > 1e-12:
            t_up[i] *= np.exp(-1j * np.angle(gam[i, k]))
    return t_up


def _assemble_bogoliubov(t_up, n):
    """Fill the lower rows from the upper ones: ``T[N + i] = conj(T[i]) Sigma``."""
    return np.vstack([t_up, t_up.conj() @ _sigma(n)])


def normal_mode_decompose(H: HamiltonMatrix) -> NormalModeDecomposition:
    """Normal-mode decomposition ``H = T^dag (D (+) D) T`` (bosons) or ``T^dag (D (+) -D) T``.

    Bosonic input goes through the hermitian square root of ``H``; the
    eigenvectors of ``H^1/2 Omega H^1/2`` with positive eigenvalues give the
    upper rows of ``T``. Fermionic input is diagonalized directly, the
    negative-energy eigenvectors being the particle-hole partners of the
    positive ones.

    Raises
    ------
    ValueError
        For non-positive bosonic ``H``, fermionic zero modes, or when the
        reconstructed ``T`` violates its defining relations.
    """
    n = H.n_modes
    Hm = H.matrix
    if H.species.is_fermionic:
        e, v = np.linalg.eigh(Hm)
        d = e[n:]
        if d[0] <= _CHECK_TOL * max(1.0, abs(e).max()):
            raise ValueError("fermionic Hamiltonian has a zero mode; normal modes are not unique")
        t_up = v[:, n:].conj().T
    else:
        w, q = np.linalg.eigh(Hm)
        if w[0] <= 1e-12 * abs(w).max():
            raise ValueError("bosonic Hamilton matrix is not positive-definite")
        sqrt_h = (q * np.sqrt(w)) @ q.conj().T
        K = sqrt_h @ _metric(H.species, n) @ sqrt_h
        K = 0.5 * (K + K.conj().T)
        e, v = np.linalg.eigh(K)
        d = e[n:]
        t_up = (v[:, n:].conj().T @ sqrt_h) / np.sqrt(d)[:, None]
    if np.max(np.abs(e[:n] + d[::-1])) > _CHECK_TOL * max(1.0, d[-1]):
        raise ValueError("spectrum is not symmetric; cannot pair normal modes")
    T = _assemble_bogoliubov(_fix_row_phases(t_up, n), n)
    nmd = NormalModeDecomposition(H.species, T, np.array(d, dtype=float))
    _check_nmd(nmd, Hm)
    return nmd


def _check_nmd(nmd, Hm):
    n = nmd.n_modes
    T = nmd.T
    omega = _metric(nmd.species, n)
    scale = max(1.0, np.linalg.norm(T) ** 2)
    if np.linalg.norm(T @ omega @ T.conj().T - omega) > _CHECK_TOL * scale:
        raise ValueError("degenerate-subspace pairing failed: T violates its defining relation")
    tinv = nmd.inverse()
    diag = np.r_[nmd.D, nmd.species.nu * nmd.D]
    if np.linalg.norm(tinv.conj().T @ Hm @ tinv - np.diag(diag)) > _CHECK_TOL * scale * max(1.0, nmd.D[-1]):
        raise ValueError("normal-mode decomposition does not diagonalize H")


@dataclass(frozen=True)
class SqueezeEntry:
    """One entry of a squeeze layer.

    ``kind`` is ``"single"`` (bosonic squeezer), ``"pair"`` (fermionic
    two-mode squeezer on ``modes = (k, k + 1)``), ``"swap"`` or ``"identity"``.
    """

    kind: str
    modes: Tuple[int, ...]
    theta: float = 0.0


@dataclass(frozen=True)
class BlochMessiahFactors:
    """``T = Ubar Sbar Vbar^dag`` with ``Ubar = U (+) U^*`` and ``Vbar = V (+) V^*``."""

    species: Species
    U: np.ndarray
    V: np.ndarray
    squeeze_spec: List[SqueezeEntry]
    residual: float = 0.0
    notes: List[str] = field(default_factory=list)

    @property
    def n_modes(self) -> int:
        return self.U.shape[0]

    @property
    def is_passive(self) -> bool:
        return all(e.kind == "identity" or (e.kind == "single" and e.theta == 0.0) for e in self.squeeze_spec)

    def squeeze_blocks(self):
        """The ``(S_gamma, S_mu)`` blocks of ``Sbar``."""
        n = self.n_modes
        s_g = np.zeros((n, n))
        s_m = np.zeros((n, n))
        for e in self.squeeze_spec:
            if e.kind == "single":
                k = e.modes[0]
                s_g[k, k] = np.cosh(e.theta)
                s_m[k, k] = np.sinh(e.theta)
            elif e.kind == "identity":
                s_g[e.modes[0], e.modes[0]] = 1.0
            elif e.kind == "swap":
                s_m[e.modes[0], e.modes[0]] = 1.0
            else:
                p, q = e.modes
                c, s = np.cos(e.theta), np.sin(e.theta)
                s_g[p, p] = s_g[q, q] = c
                s_m[p, q] = -s
                s_m[q, p] = s
        return s_g, s_m

    def sbar(self) -> np.ndarray:
        s_g, s_m = self.squeeze_blocks()
        return np.block([[s_g, s_m], [s_m, s_g]])

    def ubar(self) -> np.ndarray:
        return _passive_bar(self.U)

    def vbar(self) -> np.ndarray:
        return _passive_bar(self.V)

    def reassemble(self) -> np.ndarray:
        return self.ubar() @ self.sbar() @ self.vbar().conj().T


def _passive_bar(u):
    z = np.zeros_like(u)
    return np.block([[u, z], [z, u.conj()]])


def _clusters(values, tol):
    """Group indices of sorted ``values`` whose consecutive gaps are <= tol."""
    groups = [[0]]
    for i in range(1, len(values)):
        if abs(values[i] - values[i - 1]) <= tol:
            groups[-1].append(i)
        else:
            groups.append([i])
    return groups


def _orthonormal_candidate(basis, dim):
    """Unit vector orthogonal to ``basis``, from the best-conditioned coordinate axis."""
    best, best_norm = None, -1.0
    for k in range(dim):
        z = np.zeros(dim, dtype=complex)
        z[k] = 1.0
        for q in basis:
            z -= q * (q.conj() @ z)
        nz = np.linalg.norm(z)
        if nz > best_norm:
            best, best_norm = z / nz, nz
    return best


def _gram_schmidt(x, basis):
    for q in basis:
        x = x - q * (q.conj() @ x)
    return x / np.linalg.norm(x)


def _takagi_cluster(A, s):
    """Unitary ``W`` with ``W^dag A W^* = s 1`` for symmetric ``A`` with ``A A^dag = s^2 1``."""
    dim = A.shape[0]
    basis = []
    while len(basis) < dim:
        z = _orthonormal_candidate(basis, dim)
        # both candidates solve A x^* = s x; keep the better conditioned one
        x1 = z + A @ z.conj() / s
        x2 = 1j * (z - A @ z.conj() / s)
        x = x1 if np.linalg.norm(x1) >= np.linalg.norm(x2) else x2
        basis.append(_gram_schmidt(x, basis))
    return np.column_stack(basis)


def _youla_cluster(A, a):
    """Unitary ``Q`` with ``Q^dag A Q^*`` made of blocks ``[[0, -a], [a, 0]]``.

    ``A`` is antisymmetric with ``A A^dag = a^2 1``.
    """
    dim = A.shape[0]
    basis = []
    while len(basis) < dim:
        x = _orthonormal_candidate(basis, dim)
        y = _gram_schmidt(A @ x.conj() / a, basis + [x])
        basis.extend([x, y])
    return np.column_stack(basis)


def _polar_unitary(A):
    p, _, qh = np.linalg.svd(A)
    return p @ qh


def bloch_messiah(nmd: NormalModeDecomposition, tol: float = BLOCK_TOL) -> BlochMessiahFactors:
    """Factor ``T = Ubar Sbar Vbar^dag`` into passive, squeezing and passive parts.

    Parameters
    ----------
    nmd : NormalModeDecomposition
    tol : float
        Angle tolerance used to classify fermionic blocked modes and to group
        degenerate squeezing values.

    Returns
    -------
    BlochMessiahFactors
        Bosonic factors carry one ``"single"`` entry per mode. Fermionic factors
        list identity modes first, then adjacent pairs, then swapped modes.
    """
    n = nmd.n_modes
    gam, mu = nmd.gamma_block, nmd.mu_block
    species = nmd.species
    if np.linalg.norm(mu) < 1e-12:
        kind = "identity" if species.is_fermionic else "single"
        spec = [SqueezeEntry(kind, (k,), 0.0) for k in range(n)]
        bm = BlochMessiahFactors(species, gam.copy(), np.eye(n, dtype=complex), spec)
        return _with_residual(bm, nmd.T)
    U, sig, Vh = np.linalg.svd(gam)
    V = Vh.conj().T
    if species.is_fermionic:
        return _bloch_messiah_fermionic(nmd, U, sig, V, tol)
    if np.any(sig < 1.0 - _CHECK_TOL):
        raise ValueError("invalid bosonic Bogoliubov matrix: singular value of gamma below 1")
    A = U.conj().T @ mu @ V.conj()
    for group in _clusters(sig, tol * max(1.0, sig[0])):
        idx = np.array(group)
        s = np.sqrt(max(np.mean(sig[idx]) ** 2 - 1.0, 0.0))
        if s < tol:
            continue
        W = _takagi_cluster(A[np.ix_(idx, idx)], s)
        U[:, idx] = U[:, idx] @ W
        V[:, idx] = V[:, idx] @ W
    A = U.conj().T @ mu @ V.conj()
    sinh = np.real(np.diag(A))
    cosh_check = np.real(np.diag(U.conj().T @ gam @ V))
    if np.max(np.abs(cosh_check**2 - sinh**2 - 1.0)) > _CHECK_TOL * max(1.0, cosh_check.max() ** 2):
        raise ValueError("inconsistent squeezing values: cosh^2 - sinh^2 != 1")
    spec = [SqueezeEntry("single", (k,), float(np.arcsinh(sinh[k]))) for k in range(n)]
    return _with_residual(BlochMessiahFactors(species, U, V, spec), nmd.T)


def _bloch_messiah_fermionic(nmd, U, sig, V, tol):
    n = nmd.n_modes
    mu = nmd.mu_block
    A = U.conj().T @ mu @ V.conj()
    a = np.linalg.norm(A, axis=0)
    theta = np.arctan2(a, sig)
    order = np.argsort(theta, kind="stable")
    U, V, sig, a, theta = U[:, order], V[:, order], sig[order], a[order], theta[order]
    notes = []
    spec = []
    for group in _clusters(theta, tol):
        idx = np.array(group)
        th = float(np.mean(theta[idx]))
        if th < tol:
            if th > 1e-12:
                notes.append(f"modes {group} treated as identity (angle {th:.3e})")
            spec.extend(SqueezeEntry("identity", (int(k),), 0.0) for k in idx)
            continue
        A = U.conj().T @ mu @ V.conj()
        if th > np.pi / 2 - tol:
            if np.pi / 2 - th > 1e-12:
                notes.append(f"modes {group} treated as swap (angle {th:.3e})")
            V[:, idx] = V[:, idx] @ _polar_unitary(A[np.ix_(idx, idx)]).T
            spec.extend(SqueezeEntry("swap", (int(k),), np.pi / 2) for k in idx)
            continue
        if len(idx) % 2:
            raise ValueError(f"paired-mode cluster {group} has odd size; cannot form pairs")
        Q = _youla_cluster(A[np.ix_(idx, idx)], float(np.mean(a[idx])))
        U[:, idx] = U[:, idx] @ Q
        V[:, idx] = V[:, idx] @ Q
        A = U.conj().T @ mu @ V.conj()
        G = U.conj().T @ nmd.gamma_block @ V
        for p, q in zip(idx[::2], idx[1::2]):
            s = 0.5 * np.real(A[q, p] - A[p, q])
            c = 0.5 * np.real(G[p, p] + G[q, q])
            spec.append(SqueezeEntry("pair", (int(p), int(q)), float(np.arctan2(s, c) % (2 * np.pi))))
    bm = BlochMessiahFactors(nmd.species, U, V, spec, notes=notes)
    return _with_residual(bm, nmd.T)


def _with_residual(bm, T):
    res = float(np.linalg.norm(bm.reassemble() - T))
    return BlochMessiahFactors(bm.species, bm.U, bm.V, bm.squeeze_spec, res, list(bm.notes))


@dataclass(frozen=True)
class ThermalSpec:
    """Inverse temperature and (fermionic) chemical potential."""

    beta: float
    mu: float = 0.0

    def __post_init__(self):
        if not self.beta > 0:
            raise ValueError("beta must be positive")


@dataclass(frozen=True)
class Moments:
    """First moments ``m_i = <a_hat_i>`` and second moments ``gamma_ij = <a_hat_i^dag a_hat_j>``."""

    m: np.ndarray
    gamma: np.ndarray


def thermal_occupations(d, beta, species, mu=0.0):
    """Mean occupations ``1 / (exp(2 beta d') - nu)`` with ``d' = d - mu/2``.

    Parameters
    ----------
    d : array_like
        Normal frequencies.
    beta : float
    species : Species
    mu : float, optional
        Chemical potential (fermions only).
    """
    species = Species.parse(species)
    x = 2.0 * beta * (np.asarray(d, dtype=float) - 0.5 * mu)
    if species.is_fermionic:
        return expit(-x)
    if mu != 0.0:
        raise ValueError("chemical potential is only defined for fermions")
    with np.errstate(over="ignore"):
        return 1.0 / np.expm1(x)


def complete_covariance(species, nn, aa):
    """2N x 2N second moments from the normal-ordered blocks.

    Parameters
    ----------
    species : Species
    nn : ndarray
        ``<a_i^dag a_j>``.
    aa : ndarray
        ``<a_i a_j>``.

    Notes
    -----
    The anti-normally ordered blocks follow from the (anti)commutation
    relations, ``<a_i a_j^dag> = delta_ij + nu <a_j^dag a_i>``.
    """
    nu = Species.parse(species).nu
    n = nn.shape[0]
    return np.block([[nn, aa.T.conj()], [aa, np.eye(n) + nu * nn.T]])


def transform_covariance(tinv, gamma_b):
    """Second moments in the original modes from those of ``b_hat = T a_hat``."""
    return tinv.conj() @ gamma_b @ tinv.T


def exact_thermal_moments(nmd: NormalModeDecomposition, spec: ThermalSpec) -> Moments:
    """Analytic moments of the thermal state ``exp(-beta (H_hat - mu N_hat)) / Z``.

    Raises
    ------
    ValueError
        For a nonzero chemical potential on bosons, or on an active fermionic
        ``T`` where the number operator is not diagonal in the normal modes.
    """
    n = nmd.n_modes
    if spec.mu != 0.0 and nmd.species.is_fermionic and not nmd.is_passive(1e-10):
        raise ValueError(
            "a chemical potential shifts the normal frequencies only for number-conserving "
            "Hamiltonians; fold -mu N into alpha instead"
        )
    occ = thermal_occupations(nmd.D, spec.beta, nmd.species, spec.mu)
    gamma_b = complete_covariance(nmd.species, np.diag(occ), np.zeros((n, n)))
    gamma = transform_covariance(nmd.inverse(), gamma_b)
    return Moments(np.zeros(2 * n, dtype=complex), gamma)


def relative_covariance_error(gamma, gamma_ex, block="full"):
    """Relative Frobenius error; ``block="number"`` restricts to ``<a_i^dag a_j>``."""
    if block == "number":
        n = gamma.shape[0] // 2
        gamma, gamma_ex = gamma[:n, :n], gamma_ex[:n, :n]
    elif block != "full":
        raise ValueError("block must be 'full' or 'number'")
    return float(np.linalg.norm(gamma - gamma_ex) / np.linalg.norm(gamma_ex))


def truncated_occupations(d, beta, M):
    """Mean occupation of a bosonic thermal mode restricted to ``n < M`` and renormalized."""
    n = np.arange(M)
    logw = -2.0 * beta * np.outer(np.asarray(d, dtype=float), n)
    logw -= logw.max(axis=1, keepdims=True)
    w = np.exp(logw)
    return (w @ n) / w.sum(axis=1)


def min_local_dim(nmd: NormalModeDecomposition, spec: ThermalSpec, eps: float,
                  block: str = "number", max_dim: int = 4096) -> int:
    """Smallest Fock cutoff ``M`` whose truncated thermal state meets ``eps``.

    The normal-mode thermal populations are restricted to ``n < M`` and
    renormalized, transformed back to the original modes, and compared with the
    exact moments. The truncated state is diagonal in the normal-mode Fock
    basis, so its first moments vanish and only the covariance test is active.

    Parameters
    ----------
    nmd : NormalModeDecomposition
        Bosonic normal modes.
    spec : ThermalSpec
    eps : float
        Threshold on the relative Frobenius error of the second moments.
    block : {"number", "full"}
        ``"number"`` compares the ``<a_i^dag a_j>`` block, ``"full"`` the
        whole 2N x 2N matrix.
    """
    if nmd.species.is_fermionic:
        raise ValueError("min_local_dim applies to bosonic modes only")
    if eps <= 0:
        raise ValueError("eps must be positive")
    n = nmd.n_modes
    tinv = nmd.inverse()
    exact = exact_thermal_moments(nmd, spec).gamma
    zero = np.zeros((n, n))
    for M in range(1, max_dim + 1):
        occ = truncated_occupations(nmd.D, spec.beta, M)
        gamma = transform_covariance(tinv, complete_covariance(nmd.species, np.diag(occ), zero))
        if relative_covariance_error(gamma, exact, block) < eps:
            return M
    raise RuntimeError("no local dimension below max_dim satisfies eps")


def energy_gap(nmd: NormalModeDecomposition) -> float:
    """Gap ``2 min_i d_i`` between the ground state and the first excitation."""
    return 2.0 * float(np.min(nmd.D))


def beta_from_resc(nmd: NormalModeDecomposition, beta_resc: float) -> float:
    return beta_resc / energy_gap(nmd)


def random_hamilton_matrix(species, n, rng, pairing=1.0) -> HamiltonMatrix:
    """Random valid Hamilton matrix (positive-definite for bosons)."""
    species = Species.parse(species)
    x = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    alpha = 0.5 * (x + x.conj().T)
    y = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    zeta = 0.5 * pairing * (y + species.nu * y.T)
    if not species.is_fermionic:
        h = build_hamilton_matrix(species, alpha, zeta).matrix
        shift = max(0.0, -np.linalg.eigvalsh(h)[0]) + 0.5
        alpha = alpha + shift * np.eye(n)
    return build_hamilton_matrix(species, alpha, zeta)


def random_bogoliubov(species, n, rng, scale=1.0) -> np.ndarray:
    """Random Bogoliubov matrix ``T = exp(X)`` in the identity component."""
    from scipy.linalg import expm

    species = Species.parse(species)
    h = random_hamilton_matrix(species, n, rng).matrix
    h = scale * h / np.linalg.norm(h, 2)
    if species.is_fermionic:
        return expm(1j * h)
    return expm(1j * _metric(species, n) @ h)


def nmd_from_T(species, T, D=None) -> NormalModeDecomposition:
    """Wrap an explicit Bogoliubov matrix (``D`` defaults to ones)."""
    species = Species.parse(species)
    n = T.shape[0] // 2
    D = np.ones(n) if D is None else np.asarray(D, dtype=float)
    return NormalModeDecomposition(species, np.asarray(T, dtype=complex), D)
