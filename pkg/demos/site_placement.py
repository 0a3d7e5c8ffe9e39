"""
Where to put the hot modes
==========================

In a Reck mesh the sites are touched by very different numbers of beam
splitters. Placing the most populated normal modes on the least touched
sites keeps the MPO bond dimensions low; the reverse placement lets the
correlations spread early.
"""

import numpy as np

from gaussmpo import CompressionConfig, FpoLedger, apply_gate, bloch_messiah, synthesize_circuit
from gaussmpo import thermal_product_mpo
from gaussmpo.bench import ExperimentConfig, resolve
from gaussmpo.circuits import reck_arm_depths
from gaussmpo.gates import layer_mpo
from gaussmpo.gaussian import thermal_occupations

N = 10
res = resolve(ExperimentConfig(model="spin_boson", N=N, beta_resc=2.0))
pops = thermal_occupations(res.nmd.D, res.spec.beta, res.H.species)
print("elements per site:", reck_arm_depths(N))
print("populations:", np.round(pops, 4))


def build(populations):
    plan = synthesize_circuit(bloch_messiah(res.nmd), "reck", populations)
    rho = thermal_product_mpo(res.nmd, res.spec, res.M, plan.site_modes)
    ledger = FpoLedger()
    peak = 1
    for layer in plan.layers():
        rho = apply_gate(rho, layer_mpo(layer, N, res.H.species, res.M), CompressionConfig(1e-7), ledger)
        peak = max(peak, max(rho.bond_dims))
    return ledger.total, peak


# negated populations put the coldest modes on the quiet sites instead
for name, p in (("hot modes on quiet sites", pops), ("reversed", -pops)):
    fpo, peak = build(p)
    print(f"{name:>25}: {fpo:.3e} fpo, peak bond {peak}")
