import numpy as np
import pytest

from gaussmpo import Species, ThermalSpec, bloch_messiah, build_hamilton_matrix, normal_mode_decompose
from gaussmpo.gaussian import (
    BlochMessiahFactors,
    SqueezeEntry,
    beta_from_resc,
    energy_gap,
    exact_thermal_moments,
    min_local_dim,
    nmd_from_T,
    random_bogoliubov,
    random_hamilton_matrix,
    relative_covariance_error,
    thermal_occupations,
)
from gaussmpo.models import spin_boson_chain

from conftest import haar_unitary


def omega(n):
    return np.diag(np.r_[np.ones(n), -np.ones(n)])


class TestHamiltonMatrix:
    def test_uncoupled_bosons(self):
        H = build_hamilton_matrix("bosonic", np.diag([1.0, 2.0]), np.zeros((2, 2)))
        assert np.allclose(H.matrix, np.diag([1, 2, 1, 2]))

    def test_fermionic_symmetric_zeta_rejected(self):
        zeta = np.array([[0.0, 0.7], [0.7, 0.0]])
        with pytest.raises(ValueError, match="antisymmetric"):
            build_hamilton_matrix("fermionic", np.eye(2), zeta)

    def test_bosonic_pairing_assembly(self):
        zeta = np.array([[0.0, 1.0], [1.0, 0.0]])
        H = build_hamilton_matrix("bosonic", 2 * np.eye(2), zeta).matrix
        expected = np.block([[2 * np.eye(2), zeta], [zeta, 2 * np.eye(2)]])
        assert np.allclose(H, expected)
        assert np.allclose(H, H.conj().T)

    def test_non_hermitian_alpha(self):
        with pytest.raises(ValueError, match="hermitian"):
            build_hamilton_matrix("bosonic", np.array([[1.0, 1.0], [0.0, 1.0]]), np.zeros((2, 2)))

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            build_hamilton_matrix("bosonic", np.eye(2), np.zeros((3, 3)))


class TestNormalModes:
    def test_already_diagonal(self):
        nmd = normal_mode_decompose(build_hamilton_matrix("bosonic", np.diag([2.0, 1.0]), np.zeros((2, 2))))
        assert np.allclose(nmd.D, [1.0, 2.0])
        # a permutation with phases
        assert np.allclose(np.abs(nmd.T), np.abs(nmd.T) ** 2)
        assert nmd.is_passive()

    def test_single_squeezed_mode(self):
        H = build_hamilton_matrix("bosonic", [[2.0]], [[1.0]])
        nmd = normal_mode_decompose(H)
        # symplectic eigenvalues are the moduli of the eigenvalues of Omega H
        oracle = np.abs(np.linalg.eigvals(omega(1) @ H.matrix)).min()
        assert nmd.D[0] == pytest.approx(np.sqrt(3.0), abs=1e-12)
        assert nmd.D[0] == pytest.approx(oracle, abs=1e-12)

    def test_fermionic_pairing(self):
        # epsilon = 1, |zeta| = 1 on a pair of modes
        zeta = np.array([[0.0, 1.0], [-1.0, 0.0]])
        H = build_hamilton_matrix("fermionic", np.eye(2), zeta)
        nmd = normal_mode_decompose(H)
        oracle = np.linalg.eigvalsh(H.matrix)
        assert np.allclose(nmd.D, np.sqrt(2.0), atol=1e-12)
        assert np.allclose(oracle[2:], nmd.D, atol=1e-12)

    def test_not_positive_definite(self):
        H = build_hamilton_matrix("bosonic", [[1.0]], [[2.0]])
        with pytest.raises(ValueError):
            normal_mode_decompose(H)

    @pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 6])
    def test_invariants_random(self, species, n, rng):
        for _ in range(10):
            H = random_hamilton_matrix(species, n, rng)
            nmd = normal_mode_decompose(H)
            T = nmd.T
            g, m = T[:n, :n], T[:n, n:]
            assert np.allclose(T[n:, :n], m.conj(), atol=1e-12)
            assert np.allclose(T[n:, n:], g.conj(), atol=1e-12)
            if species is Species.BOSONIC:
                om = omega(n)
                assert np.linalg.norm(T @ om @ T.conj().T - om) < 1e-10
                assert np.linalg.norm(T.conj().T @ om @ T - om) < 1e-10
            else:
                assert np.linalg.norm(T.conj().T @ T - np.eye(2 * n)) < 1e-10
            diag = np.diag(np.r_[nmd.D, species.nu * nmd.D])
            back = T.conj().T @ diag @ T
            assert np.linalg.norm(back - H.matrix) / np.linalg.norm(H.matrix) < 1e-9
            assert np.all(np.diff(nmd.D) >= 0) and np.all(nmd.D > 0)

    def test_degenerate_frequencies(self):
        zeta = np.array([[0.0, 0.3], [0.3, 0.0]])
        nmd = normal_mode_decompose(build_hamilton_matrix("bosonic", np.eye(2), zeta))
        assert np.allclose(nmd.D, [np.sqrt(1 - 0.09)] * 2)


class TestBlochMessiah:
    def test_passive_bosonic(self, rng):
        u = haar_unitary(3, rng)
        T = np.block([[u, np.zeros((3, 3))], [np.zeros((3, 3)), u.conj()]])
        bm = bloch_messiah(nmd_from_T("bosonic", T))
        assert bm.is_passive
        assert all(e.theta == 0.0 for e in bm.squeeze_spec)
        assert np.allclose(bm.U, u, atol=1e-12)
        assert np.allclose(bm.V, np.eye(3), atol=1e-12)

    def test_single_mode_squeeze(self):
        c, s = np.cosh(1.0), np.sinh(1.0)
        bm = bloch_messiah(nmd_from_T("bosonic", np.array([[c, s], [s, c]])))
        assert bm.squeeze_spec[0].theta == pytest.approx(1.0, abs=1e-12)
        assert np.allclose(bm.U, 1) and np.allclose(bm.V, 1)

    def test_fermionic_forward_construction(self, rng):
        sq = [SqueezeEntry("pair", (0, 1), 0.3)]
        fwd = BlochMessiahFactors(Species.FERMIONIC, haar_unitary(2, rng), haar_unitary(2, rng), sq)
        T = fwd.reassemble()
        bm = bloch_messiah(nmd_from_T("fermionic", T))
        assert np.linalg.norm(bm.reassemble() - T) < 1e-10
        pairs = [e for e in bm.squeeze_spec if e.kind == "pair"]
        assert len(pairs) == 1
        assert np.sin(pairs[0].theta) ** 2 == pytest.approx(np.sin(0.3) ** 2, abs=1e-10)

    def test_fermionic_blocked_modes(self, rng):
        sq = [SqueezeEntry("identity", (0,)), SqueezeEntry("swap", (1,)), SqueezeEntry("pair", (2, 3), 0.7)]
        T = BlochMessiahFactors(Species.FERMIONIC, haar_unitary(4, rng), haar_unitary(4, rng), sq).reassemble()
        bm = bloch_messiah(nmd_from_T("fermionic", T))
        kinds = sorted(e.kind for e in bm.squeeze_spec)
        assert kinds == ["identity", "pair", "swap"]
        assert np.linalg.norm(bm.reassemble() - T) < 1e-10

    @pytest.mark.parametrize("n", [1, 2, 4, 6])
    def test_random_reconstruction(self, species, n, rng):
        for _ in range(10):
            T = random_bogoliubov(species, n, rng, scale=1.5)
            bm = bloch_messiah(nmd_from_T(species, T))
            assert np.linalg.norm(bm.reassemble() - T) < 1e-10
            assert np.linalg.norm(bm.U.conj().T @ bm.U - np.eye(n)) < 1e-10
            assert np.linalg.norm(bm.V.conj().T @ bm.V - np.eye(n)) < 1e-10


class TestThermalMoments:
    def test_bose_occupation(self):
        nmd = nmd_from_T("bosonic", np.eye(2))
        g = exact_thermal_moments(nmd, ThermalSpec(0.5)).gamma
        assert g[0, 0].real == pytest.approx(1 / (np.e - 1), abs=1e-14)
        assert g[0, 0].real == pytest.approx(0.58198, abs=1e-5)

    def test_fermi_occupation(self):
        nmd = nmd_from_T("fermionic", np.eye(2))
        g = exact_thermal_moments(nmd, ThermalSpec(0.5)).gamma
        assert g[0, 0].real == pytest.approx(1 / (np.e + 1), abs=1e-14)
        assert g[0, 0].real == pytest.approx(0.26894, abs=1e-5)

    def test_chemical_potential_half_filling(self):
        nmd = nmd_from_T("fermionic", np.eye(2), D=[0.8])
        g = exact_thermal_moments(nmd, ThermalSpec(3.0, mu=1.6)).gamma
        assert g[0, 0].real == 0.5

    def test_bosonic_mu_rejected(self):
        with pytest.raises(ValueError):
            thermal_occupations([1.0], 1.0, "bosonic", mu=0.1)

    def test_product_system(self, species):
        D = np.array([0.3, 0.9, 1.7])
        nmd = nmd_from_T(species, np.eye(6), D)
        g = exact_thermal_moments(nmd, ThermalSpec(1.3)).gamma
        occ = 1.0 / (np.exp(2 * 1.3 * D) - species.nu)
        assert np.max(np.abs(np.diag(g)[:3] - occ)) < 1e-14
        assert np.max(np.abs(np.diag(g)[3:] - (1 + species.nu * occ))) < 1e-14

    def test_matches_dense_expectation(self):
        # single squeezed mode: <a^dag a> = cosh(2r) n + sinh(r)^2
        r, d, beta = 0.4, 1.2, 0.7
        c, s = np.cosh(r), np.sinh(r)
        nmd = nmd_from_T("bosonic", np.array([[c, s], [s, c]]), [d])
        g = exact_thermal_moments(nmd, ThermalSpec(beta)).gamma
        n = 1 / np.expm1(2 * beta * d)
        assert g[0, 0].real == pytest.approx(np.cosh(2 * r) * n + s**2, abs=1e-13)

    def test_relative_error_blocks(self):
        a = np.eye(4)
        b = a.copy()
        b[2, 2] = 1.1
        assert relative_covariance_error(b, a, "number") == 0.0
        assert relative_covariance_error(b, a) == pytest.approx(0.05)
        with pytest.raises(ValueError):
            relative_covariance_error(a, a, "diag")


@pytest.fixture(scope="module")
def chain():
    return normal_mode_decompose(spin_boson_chain(20))


class TestMinLocalDim:
    @pytest.mark.parametrize("beta_resc, M", [(0.5, 14), (1.0, 8), (4.0, 3)])
    def test_table(self, chain, beta_resc, M):
        spec = ThermalSpec(beta_from_resc(chain, beta_resc))
        assert min_local_dim(chain, spec, 1e-2) == M

    def test_monotone_in_beta(self, chain):
        dims = [min_local_dim(chain, ThermalSpec(beta_from_resc(chain, b)), 1e-2)
                for b in np.linspace(0.3, 5.0, 12)]
        assert all(x >= y for x, y in zip(dims, dims[1:]))

    def test_gap(self, chain):
        assert energy_gap(chain) == pytest.approx(2 * chain.D[0])

    def test_fermions_rejected(self):
        nmd = nmd_from_T("fermionic", np.eye(2))
        with pytest.raises(ValueError):
            min_local_dim(nmd, ThermalSpec(1.0), 1e-2)


def test_random_bogoliubov_is_valid(rng):
    T = random_bogoliubov("bosonic", 3, rng)
    om = omega(3)
    assert np.linalg.norm(T @ om @ T.conj().T - om) < 1e-10
    U = random_bogoliubov("fermionic", 3, rng)
    assert np.allclose(U @ U.conj().T, np.eye(6))
