import numpy as np
import pytest
from scipy.integrate import quad

from gaussmpo import Species, chain_hamiltonian, normal_mode_decompose, ohmic_chain_coefficients
from gaussmpo.chain import ChainCoefficients, SpectralDensity, chain_coefficients, stieltjes
from gaussmpo.gaussian import bloch_messiah

# 40-digit Stieltjes run on an independent grid
OMEGA_50 = 20.001751701335762


@pytest.fixture(scope="module")
def ohmic():
    return ohmic_chain_coefficients(SpectralDensity("ohmic", 1.0, 40.0), 60)


def moment(k, hi=40.0):
    return quad(lambda w: w**k * w * np.exp(-w), 0, hi, limit=200)[0]


class TestSpectralDensity:
    def test_ohmic_values(self):
        sd = SpectralDensity("ohmic", omega_c=2.0)
        assert sd(1.0) == pytest.approx(np.exp(-0.5))
        assert sd.support == (0.0, 80.0)
        assert sd.edge_value() < 1e-14

    def test_tabulated_validation(self):
        with pytest.raises(ValueError):
            SpectralDensity("tabulated", grid=np.array([0.0, 1.0]), values=np.array([1.0, -1.0]))
        with pytest.raises(ValueError):
            SpectralDensity("tabulated", grid=np.array([1.0, 0.0]), values=np.array([1.0, 1.0]))
        with pytest.raises(ValueError):
            SpectralDensity("lorentzian")

    def test_short_cutoff_rejected(self):
        with pytest.raises(ValueError, match="cutoff"):
            ohmic_chain_coefficients(SpectralDensity("ohmic", 1.0, 20.0), 5)


class TestOhmicChain:
    def test_first_coefficients(self, ohmic):
        m0, m1, m2 = moment(0), moment(1), moment(2)
        assert ohmic.omegas[0] == pytest.approx(m1 / m0, abs=1e-12)
        assert ohmic.omegas[0] == pytest.approx(2.0, abs=1e-6)
        assert ohmic.ts[0] == pytest.approx(np.sqrt(m0 / np.pi), abs=1e-12)
        assert ohmic.ts[0] == pytest.approx(0.56419, abs=1e-5)
        assert ohmic.ts[1] == pytest.approx(np.sqrt(m2 / m0 - (m1 / m0) ** 2), abs=1e-10)

    def test_doubling_stability(self, ohmic):
        sd = SpectralDensity("ohmic", 1.0, 40.0)
        ref = chain_coefficients(sd, 60, n_panels=2 * ohmic.n_panels)
        assert np.abs(ref.omegas - ohmic.omegas).max() < 1e-10
        assert np.abs(ref.ts - ohmic.ts).max() < 1e-10

    def test_k50(self, ohmic):
        assert ohmic.omegas[50] == pytest.approx(OMEGA_50, abs=1e-9)
        assert ohmic.ts[50] == pytest.approx(10.0, abs=1e-3)

    def test_positive(self, ohmic):
        assert np.all(ohmic.omegas > 0) and np.all(ohmic.ts > 0)

    def test_rows(self, ohmic):
        rows = ohmic.to_rows()
        assert len(rows) == 60 and rows[0][0] == 0


class TestFlatDensity:
    def test_shifted_legendre(self):
        c = chain_coefficients(SpectralDensity.flat(0.0, 1.0), 12)
        k = np.arange(1, 12)
        assert np.allclose(c.omegas, 0.5, atol=1e-13)
        assert np.allclose(c.ts[1:], k / (2 * np.sqrt(4 * k**2 - 1)), atol=1e-13)
        assert c.ts[0] == pytest.approx(1 / np.sqrt(np.pi))

    def test_stieltjes_too_many(self):
        x = np.linspace(0, 1, 4)
        with pytest.raises(ValueError):
            stieltjes(x, np.ones(4), 5)


class TestChainHamiltonian:
    def test_single_site(self):
        c = ChainCoefficients(np.array([1.5, 2.0]), np.array([0.3, 0.7]))
        H = chain_hamiltonian(c, 1)
        assert np.allclose(H.alpha, [[1.5]]) and np.allclose(H.zeta, 0)

    def test_tridiagonal(self, ohmic):
        H = chain_hamiltonian(ohmic, 3)
        assert np.allclose(H.alpha, H.alpha.T) and np.all(H.alpha.imag == 0)
        assert H.alpha[0, 2] == 0
        assert H.alpha[0, 1] == ohmic.ts[1]

    def test_normal_modes(self, ohmic):
        H = chain_hamiltonian(ohmic, 20)
        nmd = normal_mode_decompose(H)
        assert np.allclose(nmd.D, np.linalg.eigvalsh(H.alpha.real), atol=1e-10)
        assert nmd.is_passive()
        assert bloch_messiah(nmd).is_passive

    def test_too_short(self):
        c = ChainCoefficients(np.ones(2), np.ones(2))
        with pytest.raises(ValueError):
            chain_hamiltonian(c, 3, Species.BOSONIC)
