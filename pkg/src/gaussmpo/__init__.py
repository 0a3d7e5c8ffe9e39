"""Thermal states of quadratic bosonic and fermionic Hamiltonians as matrix product operators.

The thermal state of the normal modes is a product state; a circuit of
beam splitters, phase shifters and squeezers obtained from a Bloch-Messiah
decomposition maps it onto the physical modes. An imaginary-time TEBD
baseline and a dense oracle share the same MPO engine and fpo ledger.
"""

from .bench import ExperimentConfig, Report, run_gaussian, run_tebd
from .chain import ChainCoefficients, SpectralDensity, chain_hamiltonian, ohmic_chain_coefficients
from .circuits import CircuitPlan, GateSpec, clements_decompose, reck_decompose, synthesize_circuit
from .gates import GateMpo, bosonic_gate, fermionic_gate, thermal_product_mpo
from .gaussian import (
    BlochMessiahFactors,
    HamiltonMatrix,
    Moments,
    NormalModeDecomposition,
    Species,
    ThermalSpec,
    beta_from_resc,
    bloch_messiah,
    build_hamilton_matrix,
    exact_thermal_moments,
    min_local_dim,
    normal_mode_decompose,
)
from .models import ising_chain, spin_boson_chain
from .mpo import (
    CompressionConfig,
    FpoLedger,
    Mpo,
    apply_gate,
    canonicalize,
    measure_moments,
    mpo_dot,
    normalize,
    svd_compress,
    trace,
)
from .oracle import exact_oracle, trace_distance
from .tebd import LocalHamiltonian, TrotterConfig, evolve, trotter_layers

__version__ = "0.1.0"
