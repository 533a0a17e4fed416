import math

import numpy as np
import pytest

from kerrsim.chain_map import (
    chain_coefficients,
    chain_single_particle_matrix,
    discretized_band,
    lanczos_tridiagonalize,
    linear_field_trajectory,
    star_single_particle_matrix,
    unitary_orthonormality_check,
)
from kerrsim.model import BathSpec, KerrParams


def paper_bath(n_sites=61):
    return BathSpec.for_gamma(gamma=6.28, omega_c=60.0, n_sites=n_sites)


class TestChainCoefficients:
    def test_first_hopping(self):
        coeffs = chain_coefficients(paper_bath())
        assert coeffs.etas[0] == pytest.approx(60.0 / math.sqrt(3.0), rel=1e-14)

    def test_hopping_limit(self):
        # (n+1)/sqrt((2n+1)(2n+3)) > 1/2 always: the limit is approached
        # from above
        bath = BathSpec.for_gamma(1.0, 1.0, 102)
        coeffs = chain_coefficients(bath)
        ratio = coeffs.etas[100] / bath.omega_c
        assert 0.5 < ratio < 0.5001

    def test_system_coupling_reference_value(self):
        bath = paper_bath()
        assert bath.c0 == pytest.approx(math.sqrt(6.28 / (2 * math.pi)), rel=1e-14)
        coeffs = chain_coefficients(bath)
        # c0*sqrt(2*omega_c) evaluated directly
        assert coeffs.eta_prime == pytest.approx(
            math.sqrt(6.28 / (2 * math.pi)) * math.sqrt(120.0), rel=1e-12)
        assert coeffs.eta_prime == pytest.approx(10.9516740782, rel=1e-10)

    def test_structure(self):
        coeffs = chain_coefficients(paper_bath(31))
        assert coeffs.omegas.size == 31
        assert np.all(coeffs.omegas == 0.0)
        assert coeffs.etas.size == 30
        assert np.all(np.diff(coeffs.etas) < 0)  # decreasing toward omega_c/2
        assert np.all(coeffs.etas > 30.0)  # strictly above omega_c/2
        assert coeffs.etas[0] == pytest.approx(60.0 / math.sqrt(3.0))

    def test_needs_two_sites(self):
        with pytest.raises(ValueError):
            chain_coefficients(BathSpec.for_gamma(1.0, 1.0, 1))


class TestOrthonormality:
    def test_small_basis(self):
        assert unitary_orthonormality_check(10, 64) < 1e-12

    def test_single_function_normalized(self):
        assert unitary_orthonormality_check(1, 8) < 1e-14

    def test_full_scale_basis(self):
        assert unitary_orthonormality_check(61, 256) < 1e-10

    def test_quadrature_requirement(self):
        with pytest.raises(ValueError):
            unitary_orthonormality_check(10, 12)


class TestStarEquivalence:
    @pytest.mark.parametrize("n_sites", [3, 4, 5, 6])
    def test_single_particle_spectra_match(self, n_sites):
        """Lanczos tridiagonalization of the discretized band is a similarity
        transform, so star and chain one-excitation spectra are identical."""
        bath = BathSpec.for_gamma(6.28, 60.0, n_sites)
        freqs, coups = discretized_band(bath, n_sites)
        h_star = star_single_particle_matrix(-12.0, freqs, coups)
        norm0, alphas, betas = lanczos_tridiagonalize(freqs, coups, n_sites)
        h_chain = np.zeros_like(h_star)
        h_chain[0, 0] = -12.0
        h_chain[0, 1] = h_chain[1, 0] = norm0
        for k, al in enumerate(alphas):
            h_chain[k + 1, k + 1] = al
        for k, be in enumerate(betas):
            h_chain[k + 1, k + 2] = h_chain[k + 2, k + 1] = be
        ev_star = np.linalg.eigvalsh(h_star)
        ev_chain = np.linalg.eigvalsh(h_chain)
        assert np.max(np.abs(ev_star - ev_chain)) < 1e-10

    def test_lanczos_matches_closed_form(self):
        """With enough quadrature modes, the numerically tridiagonalized band
        reproduces the closed-form couplings for the first 20 sites."""
        bath = BathSpec.for_gamma(6.28, 60.0, 40)
        coeffs = chain_coefficients(bath)
        freqs, coups = discretized_band(bath, 160)
        norm0, alphas, betas = lanczos_tridiagonalize(freqs, coups, 21)
        assert norm0 == pytest.approx(coeffs.eta_prime, abs=1e-8)
        assert np.max(np.abs(alphas[:20])) < 1e-8
        assert np.max(np.abs(betas[:20] - coeffs.etas[:20])) < 1e-8

    def test_closed_form_chain_matrix_shape(self):
        bath = BathSpec.for_gamma(6.28, 30.0, 5)
        coeffs = chain_coefficients(bath)
        h = chain_single_particle_matrix(-12.0, coeffs)
        assert h.shape == (6, 6)
        assert h[0, 0] == -12.0
        assert h[0, 1] == coeffs.eta_prime
        assert np.all(np.diag(h)[1:] == 0.0)


class TestLinearFieldTrajectory:
    def test_decay_rate_matches_dissipation(self):
        """Undriven amplitude decay through the chain approximates exp(-gamma t/2).

        The first ~1/omega_c of evolution carries the bath-memory slip, so
        the rate fit starts after it.
        """
        p = KerrParams(delta=0.0, chi2=0.0, gamma=6.28, drive=0.0)
        bath = BathSpec.for_gamma(p.gamma, 40.0, 41)
        coeffs = chain_coefficients(bath)
        ts = np.linspace(0.0, 1.0, 101)
        amp = np.abs(linear_field_trajectory(p, coeffs, ts, alpha0=1.0))
        rate = math.log(amp[30] / amp[50]) / 0.2
        assert rate == pytest.approx(p.gamma / 2.0, rel=0.05)
        assert amp[50] == pytest.approx(math.exp(-p.gamma * 0.25), rel=0.05)

    def test_requires_linear_model(self):
        p = KerrParams(drive=1.0)
        coeffs = chain_coefficients(paper_bath(8))
        with pytest.raises(ValueError):
            linear_field_trajectory(p, coeffs, np.linspace(0, 1, 10))
