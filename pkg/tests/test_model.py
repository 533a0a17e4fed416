import numpy as np
import pytest
from scipy.integrate import quad

from kerrsim.model import BathSpec, InitialState, KerrParams, eom_rhs, spectral_density


@pytest.fixture
def bath():
    return BathSpec.for_gamma(gamma=6.28, omega_c=60.0, n_sites=61)


class TestSpectralDensity:
    def test_reference_point_inside_window(self, bath):
        assert spectral_density(0.0, bath) == pytest.approx(3.14, abs=1e-12)

    def test_outside_cutoff_is_zero(self, bath):
        assert spectral_density(100.0, bath) == 0.0
        assert spectral_density(-100.0, bath) == 0.0

    def test_symmetric_window(self):
        bath = BathSpec.for_gamma(gamma=2.0, omega_c=60.0, n_sites=10)
        assert spectral_density(-30.0, bath) == pytest.approx(1.0, abs=1e-12)

    def test_half_step_convention_at_edges(self, bath):
        # Theta(0) = 1/2 leaves gamma/2 * 1/2 = gamma/4 at |omega| = omega_c
        assert spectral_density(bath.omega_c, bath) == pytest.approx(6.28 / 4)
        assert spectral_density(-bath.omega_c, bath) == pytest.approx(6.28 / 4)

    def test_even_in_omega(self, bath):
        for w in np.linspace(0.0, 70.0, 29):
            assert spectral_density(w, bath) == spectral_density(-w, bath)

    def test_window_integral(self, bath):
        val, _ = quad(lambda w: spectral_density(w, bath),
                      -bath.omega_c, bath.omega_c, limit=200)
        expected = bath.gamma * bath.omega_c
        assert val == pytest.approx(expected, rel=1e-10)

    def test_c0_consistency(self, bath):
        assert bath.consistent_with(6.28)
        assert not bath.consistent_with(6.28 * (1 + 1e-6))


class TestEomRhs:
    def test_drive_only_at_origin(self):
        p = KerrParams(delta=-3.0, chi2=2.0, gamma=1.0, drive=1.0)
        assert eom_rhs(0.0, p) == pytest.approx(-1.0)

    def test_linear_terms_only(self):
        p = KerrParams(delta=1.0, chi2=0.0, gamma=2.0, drive=0.0)
        assert eom_rhs(1.0 + 0.0j, p) == pytest.approx(-1j - 1.0)

    def test_fixed_point_residual(self):
        from kerrsim.semiclassical import steady_states
        p = KerrParams(drive=8.0)
        for pt in steady_states(p):
            assert abs(eom_rhs(pt.alpha, p)) < 1e-12

    def test_affine_offset_at_chi_zero(self):
        p = KerrParams(delta=-2.0, chi2=0.0, gamma=3.0, drive=0.4 - 0.9j)
        rng = np.random.default_rng(7)
        for _ in range(20):
            a1, a2 = rng.standard_normal(2) + 1j * rng.standard_normal(2)
            lhs = eom_rhs(a1 + a2, p) - eom_rhs(a1, p) - eom_rhs(a2, p)
            assert lhs == pytest.approx(p.drive, abs=1e-14)


class TestParams:
    def test_gamma_must_be_positive(self):
        with pytest.raises(ValueError):
            KerrParams(gamma=0.0)
        with pytest.raises(ValueError):
            KerrParams(gamma=-1.0)

    def test_initial_state_alpha(self):
        s = InitialState(1.5, 0.33 * np.pi)
        assert abs(s.alpha) == pytest.approx(1.5)
        assert np.angle(s.alpha) == pytest.approx(0.33 * np.pi)
        back = InitialState.from_alpha(s.alpha)
        assert back.amplitude == pytest.approx(1.5)

    def test_negative_amplitude_rejected(self):
        with pytest.raises(ValueError):
            InitialState(-0.1, 0.0)

    def test_bath_validation(self):
        with pytest.raises(ValueError):
            BathSpec.for_gamma(1.0, omega_c=-5.0, n_sites=10)
        with pytest.raises(ValueError):
            BathSpec.for_gamma(1.0, omega_c=5.0, n_sites=0)
