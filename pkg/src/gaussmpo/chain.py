"""Chain mapping of a bosonic bath onto a nearest-neighbour chain.

The site frequencies and couplings are the three-term recurrence
coefficients of the polynomials orthogonal with respect to ``J(w) dw``.
They are computed by a discretized Stieltjes procedure on a composite
Gauss-Legendre grid, refined until the coefficients stop changing.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .gaussian import HamiltonMatrix, Species, build_hamilton_matrix

__all__ = [
    "SpectralDensity",
    "ChainCoefficients",
    "gauss_legendre_grid",
    "stieltjes",
    "ohmic_chain_coefficients",
    "chain_coefficients",
    "chain_hamiltonian",
]

GL_ORDER = 32


@dataclass(frozen=True)
class SpectralDensity:
    """Bath spectral density with a hard cutoff.

    Attributes
    ----------
    kind : {"ohmic", "tabulated"}
    omega_c : float
        Cutoff frequency of the ohmic form ``J(w) = w exp(-w / omega_c)``.
    cutoff_factor : float
        Support is ``[0, cutoff_factor * omega_c]``.
    grid, values : ndarray, optional
        Tabulated density, linearly interpolated; the support is the grid range.
    """

    kind: str = "ohmic"
    omega_c: float = 1.0
    cutoff_factor: float = 40.0
    grid: Optional[np.ndarray] = field(default=None, repr=False)
    values: Optional[np.ndarray] = field(default=None, repr=False)

    def __post_init__(self):
        if self.kind == "ohmic":
            if not (self.omega_c > 0 and self.cutoff_factor > 0):
                raise ValueError("omega_c and cutoff_factor must be positive")
        elif self.kind == "tabulated":
            g = np.asarray(self.grid, dtype=float)
            v = np.asarray(self.values, dtype=float)
            if g.ndim != 1 or g.shape != v.shape or len(g) < 2:
                raise ValueError("grid and values must be 1d arrays of equal length >= 2")
            if np.any(np.diff(g) <= 0):
                raise ValueError("grid must be strictly increasing")
            if np.any(v < 0):
                raise ValueError("spectral density must be non-negative")
            object.__setattr__(self, "grid", g)
            object.__setattr__(self, "values", v)
        else:
            raise ValueError(f"unknown spectral density kind {self.kind!r}")

    @classmethod
    def flat(cls, lo=0.0, hi=1.0):
        return cls(kind="tabulated", grid=np.array([lo, hi]), values=np.array([1.0, 1.0]))

    @property
    def support(self):
        if self.kind == "ohmic":
            return 0.0, self.cutoff_factor * self.omega_c
        return float(self.grid[0]), float(self.grid[-1])

    def __call__(self, w):
        w = np.asarray(w, dtype=float)
        if self.kind == "ohmic":
            return w * np.exp(-w / self.omega_c)
        return np.interp(w, self.grid, self.values)

    def edge_value(self) -> float:
        """Density at the upper cutoff."""
        return float(self(self.support[1]))


@dataclass(frozen=True)
class ChainCoefficients:
    """Site frequencies ``omegas`` and couplings ``ts``.

    ``ts[0]`` couples the system to the first chain site; ``ts[k]`` for
    ``k >= 1`` couples sites ``k - 1`` and ``k``.
    """

    omegas: np.ndarray
    ts: np.ndarray
    n_panels: int = 0

    def __len__(self):
        return len(self.omegas)

    def to_rows(self):
        return [(k, float(w), float(t)) for k, (w, t) in enumerate(zip(self.omegas, self.ts))]


def gauss_legendre_grid(lo, hi, n_panels, order=GL_ORDER):
    """Nodes and weights of composite Gauss-Legendre quadrature on ``[lo, hi]``."""
    x, w = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(lo, hi, n_panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def stieltjes(x, w, n):
    """Recurrence coefficients ``(a_k, b_k)``, ``k < n``, of a discrete measure.

    Uses normalized polynomials, ``sqrt(b_{k+1}) q_{k+1} = (x - a_k) q_k - sqrt(b_k) q_{k-1}``,
    with ``b_0`` the total mass.

    Returns
    -------
    a, b : ndarray
    """
    if n > len(x):
        raise ValueError("need more quadrature nodes than coefficients")
    a = np.zeros(n)
    b = np.zeros(n)
    b[0] = w.sum()
    q = np.sqrt(w / b[0])
    q_prev = np.zeros_like(q)
    for k in range(n):
        v = x * q
        a[k] = q @ v
        v = v - a[k] * q - (np.sqrt(b[k]) if k else 0.0) * q_prev
        if k + 1 < n:
            nrm = np.linalg.norm(v)
            b[k + 1] = nrm**2
            q_prev, q = q, v / nrm
    return a, b


def chain_coefficients(sd: SpectralDensity, N: int, n_panels: Optional[int] = None,
                       tol: float = 1e-10, max_panels: int = 4096) -> ChainCoefficients:
    """Chain coefficients of ``sd`` for ``N`` sites.

    Parameters
    ----------
    sd : SpectralDensity
    N : int
    n_panels : int, optional
        Fixed number of quadrature panels. By default the grid is doubled
        until all coefficients change by less than ``tol``.
    tol : float
    max_panels : int

    Raises
    ------
    RuntimeError
        If the adaptive refinement does not converge.
    """
    if N < 1:
        raise ValueError("N must be positive")
    lo, hi = sd.support

    def compute(panels):
        x, w = gauss_legendre_grid(lo, hi, panels)
        return stieltjes(x, w * sd(x), N)

    if n_panels is not None:
        a, b = compute(n_panels)
    else:
        n_panels = max(8, N)
        a, b = compute(n_panels)
        while True:
            if 2 * n_panels > max_panels:
                raise RuntimeError("chain coefficients did not converge under grid refinement")
            a2, b2 = compute(2 * n_panels)
            n_panels *= 2
            delta = max(np.abs(a2 - a).max(), np.abs(np.sqrt(b2) - np.sqrt(b)).max())
            a, b = a2, b2
            if delta < tol:
                break
    ts = np.sqrt(b)
    ts[0] = np.sqrt(b[0] / np.pi)
    return ChainCoefficients(a, ts, n_panels)


def ohmic_chain_coefficients(sd: SpectralDensity, N: int, **kwargs) -> ChainCoefficients:
    """Chain coefficients of an ohmic density; see :func:`chain_coefficients`."""
    if sd.kind == "ohmic" and sd.edge_value() >= 1e-14:
        raise ValueError("cutoff too small: the density is not negligible at the edge")
    return chain_coefficients(sd, N, **kwargs)


def chain_hamiltonian(coeffs: ChainCoefficients, N: int, species=Species.BOSONIC) -> HamiltonMatrix:
    """Hamilton matrix of the first ``N`` chain sites (system coupling excluded)."""
    if len(coeffs) < N:
        raise ValueError("not enough chain coefficients")
    alpha = np.diag(np.asarray(coeffs.omegas[:N], dtype=float))
    off = np.asarray(coeffs.ts[1:N], dtype=float)
    alpha = alpha + np.diag(off, 1) + np.diag(off, -1)
    return build_hamilton_matrix(species, alpha, np.zeros((N, N)))
