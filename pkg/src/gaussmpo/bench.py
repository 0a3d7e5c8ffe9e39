"""Experiment runner for the Gaussian construction and the TEBD baseline.

A run takes an :class:`ExperimentConfig`, builds the model Hamiltonian,
converts the rescaled inverse temperature to ``beta`` with the normal-mode
gap, prepares the thermal MPO with the chosen scheme and returns a
:class:`Report` with moment errors and fpo counts.
"""

import json
import math
import time
from dataclasses import asdict, dataclass, field, fields, replace
from typing import Optional

import numpy as np
from scipy.optimize import curve_fit

from .circuits import synthesize_circuit
from .gates import layer_mpo, thermal_product_mpo
from .gaussian import (
    Species,
    ThermalSpec,
    beta_from_resc,
    bloch_messiah,
    energy_gap,
    exact_thermal_moments,
    min_local_dim,
    normal_mode_decompose,
    relative_covariance_error,
    thermal_occupations,
)
from .models import ISING_LAMBDA, ising_chain, spin_boson_chain
from .mpo import BondTrace, CompressionConfig, FpoLedger, apply_gate, measure_moments, normalize
from .oracle import MAX_DENSE_DIM, exact_oracle, trace_distance
from .tebd import LocalHamiltonian, TrotterConfig, evolve, maximally_mixed

__all__ = [
    "ExperimentConfig",
    "Report",
    "build_model",
    "resolve",
    "run_gaussian",
    "run_tebd",
    "run",
    "run_oracle",
    "compare",
    "power_law_fit",
    "cheapest_gaussian",
    "cheapest_tebd",
]

MODELS = ("spin_boson", "ising")
SCHEMES = ("gaussian", "tebd")
MIN_DIM_EPS = 1e-2


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything needed to reproduce one run.

    Attributes
    ----------
    model : {"spin_boson", "ising"}
    N : int
    beta_resc : float
        Inverse temperature in units of the inverse normal-mode gap.
    M : int, optional
        Bosonic local dimension. ``None`` picks the smallest dimension whose
        truncation error is below ``1e-2``.
    omega_c, cutoff : float
        Spin-boson spectral density parameters.
    lam : float
        Ising coupling.
    scheme : {"gaussian", "tebd"}
    decomposition : {"reck", "clements"}
    order : {1, 2, 4}
    n_steps, dt : optional
        TEBD step count, or a step size in units of ``beta_resc``
        (``n_steps = ceil(beta_resc / dt)``). Default is 10 steps.
    eps_rel, r_max : compression of the state.
    gate_eps : float, optional
        Compression of TEBD gates; ``None`` keeps them exact.
    seed : int
    oracle : bool
        Compare with the dense thermal state when it fits in memory.
    """

    model: str = "spin_boson"
    N: int = 4
    beta_resc: float = 1.0
    M: Optional[int] = None
    omega_c: float = 1.0
    cutoff: float = 40.0
    lam: float = ISING_LAMBDA
    scheme: str = "gaussian"
    decomposition: str = "reck"
    order: int = 2
    n_steps: Optional[int] = None
    dt: Optional[float] = None
    eps_rel: float = 1e-7
    r_max: Optional[int] = None
    gate_eps: Optional[float] = 1e-7
    seed: int = 0
    oracle: bool = False

    def __post_init__(self):
        if self.model not in MODELS:
            raise ValueError(f"model must be one of {MODELS}")
        if self.scheme not in SCHEMES:
            raise ValueError(f"scheme must be one of {SCHEMES}")
        if self.N < 1:
            raise ValueError("N must be positive")
        if not self.beta_resc > 0:
            raise ValueError("beta_resc must be positive")
        if self.M is not None and self.M < 2:
            raise ValueError("M must be at least 2")
        if self.decomposition not in ("reck", "clements"):
            raise ValueError("decomposition must be 'reck' or 'clements'")
        if self.order not in (1, 2, 4):
            raise ValueError("order must be 1, 2 or 4")

    @property
    def species(self) -> Species:
        return Species.FERMIONIC if self.model == "ising" else Species.BOSONIC

    @property
    def steps(self) -> int:
        if self.n_steps is not None:
            return int(self.n_steps)
        if self.dt is not None:
            return max(1, math.ceil(self.beta_resc / self.dt - 1e-9))
        return 10

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, data):
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def from_json(cls, path):
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


@dataclass
class Report:
    """Figures of merit of one run.

    ``eps_m`` is the Frobenius norm of the first moments and
    ``eps_gamma_rel`` the relative Frobenius error of the full 2N x 2N
    second-moment matrix against the analytic thermal value.
    """

    config: dict
    eps_m: float = float("nan")
    eps_gamma_rel: float = float("nan")
    eps_gamma_rel_number: float = float("nan")
    fpo: dict = field(default_factory=dict)
    fpo_total: int = 0
    beta: float = float("nan")
    local_dim: int = 0
    max_bond: int = 0
    n_gates: int = 0
    wall_time: float = 0.0
    converged: bool = True
    error: Optional[str] = None
    oracle: Optional[dict] = None
    bonds: Optional[BondTrace] = field(default=None, repr=False)

    def to_dict(self):
        out = {k: v for k, v in asdict(self).items() if k != "bonds"}
        out["bonds"] = {"file": "bonds.csv", "max_rank": self.max_bond}
        return _jsonable(out)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    def within(self, target) -> bool:
        return self.converged and self.eps_m < target and self.eps_gamma_rel < target


def _jsonable(x):
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.generic):
        return x.item()
    if isinstance(x, float) and not math.isfinite(x):
        return None
    return x


def build_model(config: ExperimentConfig):
    if config.model == "spin_boson":
        return spin_boson_chain(config.N, config.omega_c, config.cutoff)
    return ising_chain(config.N, config.lam)


@dataclass
class _Resolved:
    H: object
    nmd: object
    spec: ThermalSpec
    M: int


def resolve(config: ExperimentConfig) -> _Resolved:
    """Model, normal modes, ``beta`` and local dimension of a config."""
    H = build_model(config)
    nmd = normal_mode_decompose(H)
    spec = ThermalSpec(beta_from_resc(nmd, config.beta_resc))
    if config.species.is_fermionic:
        M = 2
    elif config.M is not None:
        M = int(config.M)
    else:
        M = max(2, min_local_dim(nmd, spec, MIN_DIM_EPS))
    return _Resolved(H, nmd, spec, M)


def _finish(report, rho, res, config, ledger, t0):
    rho = normalize(rho)
    mom = measure_moments(rho, res.H.species)
    exact = exact_thermal_moments(res.nmd, res.spec)
    report.eps_m = float(np.linalg.norm(mom.m))
    report.eps_gamma_rel = relative_covariance_error(mom.gamma, exact.gamma)
    report.eps_gamma_rel_number = relative_covariance_error(mom.gamma, exact.gamma, block="number")
    report.fpo = dict(ledger.counters)
    report.fpo_total = ledger.total
    if config.oracle:
        report.oracle = _oracle_block(rho, mom, res)
    report.wall_time = time.perf_counter() - t0
    return report


def _oracle_block(rho, mom, res):
    n = res.H.n_modes
    if res.M**n > MAX_DENSE_DIM:
        return {"skipped": f"dimension {res.M}**{n} above {MAX_DENSE_DIM}"}
    ref = exact_oracle(res.H, res.spec, res.M)
    dense = rho.to_dense()
    return {
        "trace_distance": trace_distance(dense, ref.rho),
        "eps_m": float(np.linalg.norm(mom.m - ref.moments.m)),
        "eps_gamma_rel": relative_covariance_error(mom.gamma, ref.moments.gamma),
        # relative; truncating G rho and (G rho) G^dag separately leaves ~sqrt(eps_rel)
        "hermiticity": float(np.linalg.norm(dense - dense.conj().T) / np.linalg.norm(dense)),
    }


def _new_report(config, res):
    return Report(config=config.to_dict(), beta=res.spec.beta, local_dim=res.M, bonds=BondTrace())


def run_gaussian(config: ExperimentConfig) -> Report:
    """Normal modes, Bloch-Messiah circuit, gate-by-layer application with compression."""
    if config.scheme != "gaussian":
        raise ValueError("config.scheme must be 'gaussian'")
    t0 = time.perf_counter()
    res = resolve(config)
    report = _new_report(config, res)
    ledger = FpoLedger()
    cfg = CompressionConfig(config.eps_rel, config.r_max)
    try:
        factors = bloch_messiah(res.nmd)
        pops = thermal_occupations(res.nmd.D, res.spec.beta, res.H.species)
        plan = synthesize_circuit(factors, config.decomposition, pops)
        rho = thermal_product_mpo(res.nmd, res.spec, res.M, plan.site_modes)
        report.n_gates = len(plan.gates)
        max_bond = 1
        for idx, layer in enumerate(plan.layers()):
            gate = layer_mpo(layer, res.H.n_modes, res.H.species, res.M)
            rho = apply_gate(rho, gate, cfg, ledger)
            report.bonds.record(idx, rho)
            max_bond = max(max_bond, max(rho.bond_dims))
        report.max_bond = max_bond
        return _finish(report, rho, res, config, ledger, t0)
    except (np.linalg.LinAlgError, RuntimeError) as exc:
        report.converged = False
        report.error = str(exc)
        report.wall_time = time.perf_counter() - t0
        return report


def run_tebd(config: ExperimentConfig) -> Report:
    """Imaginary-time evolution from the maximally mixed state."""
    if config.scheme != "tebd":
        raise ValueError("config.scheme must be 'tebd'")
    t0 = time.perf_counter()
    res = resolve(config)
    report = _new_report(config, res)
    ledger = FpoLedger()
    try:
        local = LocalHamiltonian.from_hamilton_matrix(res.H, res.M)
        trotter = TrotterConfig(config.order, config.steps, res.spec.beta)
        gate_comp = None if config.gate_eps is None else CompressionConfig(config.gate_eps)
        rho0 = maximally_mixed(res.H.n_modes, local.local_dim)
        rho = evolve(rho0, local, res.spec.beta, trotter, CompressionConfig(config.eps_rel, config.r_max),
                     gate_comp, ledger, report.bonds)
        report.max_bond = report.bonds.max_rank()
        report.n_gates = len(report.bonds.rows) // max(1, res.H.n_modes - 1)
        return _finish(report, rho, res, config, ledger, t0)
    except (np.linalg.LinAlgError, RuntimeError) as exc:
        report.converged = False
        report.error = str(exc)
        report.wall_time = time.perf_counter() - t0
        return report


def run(config: ExperimentConfig) -> Report:
    return run_gaussian(config) if config.scheme == "gaussian" else run_tebd(config)


def run_oracle(config: ExperimentConfig) -> dict:
    """Dense thermal state of a config and its deviation from the analytic moments."""
    res = resolve(config)
    ref = exact_oracle(res.H, res.spec, res.M)
    exact = exact_thermal_moments(res.nmd, res.spec)
    return {
        "config": config.to_dict(),
        "beta": res.spec.beta,
        "local_dim": res.M,
        "dim": int(ref.rho.shape[0]),
        "gap": energy_gap(res.nmd),
        "eps_m": float(np.linalg.norm(ref.moments.m)),
        "eps_gamma_rel": relative_covariance_error(ref.moments.gamma, exact.gamma),
        "eps_gamma_rel_number": relative_covariance_error(ref.moments.gamma, exact.gamma, block="number"),
    }


def power_law_fit(xs, ys):
    """Least-squares fit ``y = c x^alpha`` on the original scale.

    Returns
    -------
    c, alpha : float
    """
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if len(xs) < 2:
        raise ValueError("need at least two points")
    slope, icept = np.polyfit(np.log(xs), np.log(ys), 1)
    (c, alpha), _ = curve_fit(lambda x, c, a: c * x**a, xs, ys, p0=(np.exp(icept), slope), maxfev=20000)
    return float(c), float(alpha)


def compare(configs, fit_by="N"):
    """Run configs and fit fpo totals to a power law per group.

    Configs are grouped by everything except ``fit_by``; groups with at
    least two distinct values get a fitted exponent.

    Returns
    -------
    dict
        ``rows`` (one per config) and ``fits`` (one per group).
    """
    rows = []
    for cfg in configs:
        rep = run(cfg)
        rows.append({
            "model": cfg.model,
            "scheme": cfg.scheme,
            "N": cfg.N,
            "beta_resc": cfg.beta_resc,
            "fpo_total": rep.fpo_total,
            "eps_m": rep.eps_m,
            "eps_gamma_rel": rep.eps_gamma_rel,
            "max_bond": rep.max_bond,
            "local_dim": rep.local_dim,
            "converged": rep.converged,
        })
    groups = {}
    for cfg, row in zip(configs, rows):
        key = json.dumps({k: v for k, v in cfg.to_dict().items() if k != fit_by}, sort_keys=True)
        groups.setdefault(key, []).append((getattr(cfg, fit_by), row["fpo_total"]))
    fits = []
    for key, pts in groups.items():
        xs = sorted({x for x, _ in pts})
        if len(xs) < 2:
            continue
        pts = sorted(dict(pts).items())
        c, alpha = power_law_fit([p[0] for p in pts], [p[1] for p in pts])
        fits.append({"group": json.loads(key), "by": fit_by, "c": c, "alpha": alpha})
    return _jsonable({"rows": rows, "fits": fits})


def cheapest_gaussian(config: ExperimentConfig, target=1e-2, eps_grid=(1e-3, 1e-4, 1e-5, 1e-6, 1e-7)):
    """Lowest-fpo Gaussian run with both moment errors below ``target``.

    Searches the state truncation ``eps_rel``; ``M`` is fixed by the config.
    """
    best = None
    for eps in eps_grid:
        rep = run_gaussian(replace(config, scheme="gaussian", eps_rel=eps))
        if rep.within(target) and (best is None or rep.fpo_total < best.fpo_total):
            best = rep
    return best


def cheapest_tebd(config: ExperimentConfig, target=1e-2, orders=(2,), eps_grid=(1e-5, 1e-6),
                  max_steps=256):
    """Lowest-fpo TEBD run with both moment errors below ``target``.

    For each order and truncation the step count is predicted from a
    one-step probe assuming an error ``~ n^-order`` and then increased until
    the target is met. A branch is abandoned when refining the step makes
    the error grow (the fourth-order formula has a negative sub-step, which
    amplifies high-energy states for large steps).
    """
    best = None
    for order in orders:
        for eps in eps_grid:
            base = replace(config, scheme="tebd", order=order, eps_rel=eps, dt=None)
            probe = run_tebd(replace(base, n_steps=1))
            if probe.within(target):
                rep = probe
            else:
                ratio = max(probe.eps_gamma_rel / target, 1.0)
                n = max(2, math.ceil(ratio ** (1.0 / order)))
                rep = None
                last = probe.eps_gamma_rel
                while n <= max_steps:
                    cand = run_tebd(replace(base, n_steps=n))
                    if cand.within(target):
                        rep = cand
                        break
                    if not cand.eps_gamma_rel < last:
                        break
                    last = cand.eps_gamma_rel
                    n = max(n + 1, math.ceil(n * (cand.eps_gamma_rel / target) ** (1.0 / order)))
                # the prediction may overshoot; step down while the target still holds
                while rep is not None and rep.config["n_steps"] > 1:
                    cand = run_tebd(replace(base, n_steps=rep.config["n_steps"] - 1))
                    if not cand.within(target):
                        break
                    rep = cand
            if rep is not None and (best is None or rep.fpo_total < best.fpo_total):
                best = rep
    return best
