"""
Thermal state of a transverse Ising chain
=========================================

The spin chain is written as a quadratic fermionic Hamiltonian, its normal
modes are found, and the circuit that maps the normal-mode product state
onto the physical modes is applied gate layer by gate layer. The result is
checked against a dense Gibbs state.
"""

import numpy as np

from gaussmpo import (
    CompressionConfig,
    FpoLedger,
    ThermalSpec,
    apply_gate,
    beta_from_resc,
    bloch_messiah,
    exact_oracle,
    exact_thermal_moments,
    ising_chain,
    measure_moments,
    normal_mode_decompose,
    normalize,
    synthesize_circuit,
    thermal_product_mpo,
    trace_distance,
)
from gaussmpo.gates import layer_mpo
from gaussmpo.gaussian import relative_covariance_error, thermal_occupations

N, beta_resc = 8, 1.0
H = ising_chain(N, lam=1.2)
nmd = normal_mode_decompose(H)
spec = ThermalSpec(beta_from_resc(nmd, beta_resc))
print("normal-mode energies:", np.round(nmd.D, 4))

# Bloch-Messiah splits T into passive, pair squeezing, passive
factors = bloch_messiah(nmd)
pops = thermal_occupations(nmd.D, spec.beta, H.species)
plan = synthesize_circuit(factors, "reck", pops)
print(f"{len(plan.gates)} gates in {len(plan.layers())} layers,",
      plan.count("squeeze_pair"), "pair squeezers")

rho = thermal_product_mpo(nmd, spec, 2, plan.site_modes)
ledger = FpoLedger()
for layer in plan.layers():
    rho = apply_gate(rho, layer_mpo(layer, N, H.species), CompressionConfig(1e-7), ledger)
rho = normalize(rho)
print("bond dimensions:", rho.bond_dims)
print("fpo:", ledger.counters)

got = measure_moments(rho, H.species)
exact = exact_thermal_moments(nmd, spec)
print(f"eps_m = {np.linalg.norm(got.m):.2e}")
print(f"eps_gamma_rel = {relative_covariance_error(got.gamma, exact.gamma):.2e}")

# dense check on 2**8 states
ref = exact_oracle(H, spec)
print(f"trace distance to the dense Gibbs state: {trace_distance(rho.to_dense(), ref.rho):.2e}")
