import numpy as np
import pytest

from gaussmpo import ThermalSpec, build_hamilton_matrix, exact_thermal_moments, ising_chain, normal_mode_decompose
from gaussmpo.oracle import (
    MAX_DENSE_DIM,
    dense_gibbs,
    dense_hamiltonian,
    dense_moments,
    exact_oracle,
    trace_distance,
)
from gaussmpo.models import spin_boson_chain


def spin_ising(n, lam):
    """``sum sigma^z + lam sum sigma^x sigma^x`` built from Pauli matrices."""
    x = np.array([[0, 1], [1, 0]])
    z = np.diag([1, -1])

    def site(op, k):
        mats = [np.eye(2)] * n
        mats[k] = op
        out = mats[0]
        for m in mats[1:]:
            out = np.kron(out, m)
        return out

    h = sum(site(z, k) for k in range(n))
    h = h + lam * sum(site(x, k) @ site(x, k + 1) for k in range(n - 1))
    return h


class TestDenseHamiltonian:
    def test_single_mode_spectrum(self):
        H = build_hamilton_matrix("bosonic", [[0.7]], [[0.0]])
        e = np.linalg.eigvalsh(dense_hamiltonian(H, 6))
        assert np.allclose(e, 2 * 0.7 * np.arange(6) + 0.7)

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_ising_spectrum(self, n):
        # the Jordan-Wigner image has the spectrum of the spin chain
        got = np.linalg.eigvalsh(dense_hamiltonian(ising_chain(n)))
        ref = np.linalg.eigvalsh(spin_ising(n, 1.2))
        assert np.allclose(got, ref, atol=1e-12)

    def test_dimension_cap(self):
        with pytest.raises(ValueError, match="cap"):
            dense_hamiltonian(spin_boson_chain(8), 4)
        assert MAX_DENSE_DIM == 2**14


class TestExactOracle:
    def test_single_mode_occupation(self):
        H = build_hamilton_matrix("bosonic", [[1.0]], [[0.0]])
        st = exact_oracle(H, ThermalSpec(0.5), 32)
        assert st.moments.gamma[0, 0].real == pytest.approx(1 / (np.e - 1), abs=1e-12)
        assert np.trace(st.rho) == pytest.approx(1.0)

    @pytest.mark.parametrize("beta", [0.3, 1.0, 4.0])
    def test_ising_matches_gaussian(self, beta):
        H = ising_chain(2)
        st = exact_oracle(H, ThermalSpec(beta))
        ref = exact_thermal_moments(normal_mode_decompose(H), ThermalSpec(beta)).gamma
        assert np.abs(st.moments.gamma - ref).max() < 1e-10
        assert np.abs(st.moments.m).max() < 1e-14

    def test_active_bosonic_matches_gaussian(self):
        H = build_hamilton_matrix("bosonic", [[1.0, 0.2], [0.2, 1.5]], [[0.1, 0.05], [0.05, 0.0]])
        st = exact_oracle(H, ThermalSpec(2.0), 24)
        ref = exact_thermal_moments(normal_mode_decompose(H), ThermalSpec(2.0)).gamma
        assert np.abs(st.moments.gamma - ref).max() < 1e-9

    def test_chemical_potential(self):
        H = build_hamilton_matrix("fermionic", [[1.0, 0.3], [0.3, 0.6]], np.zeros((2, 2)))
        spec = ThermalSpec(1.5, mu=0.8)
        st = exact_oracle(H, spec)
        ref = exact_thermal_moments(normal_mode_decompose(H), spec).gamma
        assert np.abs(st.moments.gamma - ref).max() < 1e-12

    def test_infinite_temperature(self):
        h = dense_hamiltonian(ising_chain(3))
        assert np.allclose(dense_gibbs(h, 0.0), np.eye(8) / 8)

    def test_moments_normalize(self):
        rho = 3.0 * np.diag([0.75, 0.25])
        mom = dense_moments(rho, "fermionic", 1, 2)
        assert mom.gamma[0, 0] == pytest.approx(0.25)


class TestTraceDistance:
    def test_orthogonal_states(self):
        assert trace_distance(np.diag([1.0, 0]), np.diag([0, 1.0])) == pytest.approx(1.0)

    def test_identical(self, rng):
        x = rng.normal(size=(5, 5))
        rho = x @ x.T
        rho /= np.trace(rho)
        assert trace_distance(rho, rho) == 0.0
