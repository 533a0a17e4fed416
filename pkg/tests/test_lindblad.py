import numpy as np
import pytest

from kerrsim.errors import (
    CutoffTooSmall,
    DimensionTooSmall,
    TraceDrift,
    VacuumG2Undefined,
)
from kerrsim.lindblad import (
    build_liouvillian,
    coherent_dm,
    coherent_state_vector,
    destroy,
    evolve_master,
    expectations,
    fidelity_with_pure,
    fock_dm,
    steady_state,
    thermal_dm,
)
from kerrsim.model import KerrParams

PAPER = KerrParams()


def linear_cavity_alpha(p):
    return -p.drive / (1j * p.delta + p.gamma / 2)


class TestLiouvillian:
    def test_dim_too_small(self):
        with pytest.raises(DimensionTooSmall):
            build_liouvillian(PAPER, 1)

    def test_vacuum_is_null_vector_without_drive(self):
        p = KerrParams(delta=-3.0, chi2=0.0, gamma=2.0, drive=0.0)
        liou = build_liouvillian(p, 8)
        rho_vac = np.zeros((8, 8), dtype=complex)
        rho_vac[0, 0] = 1.0
        assert np.max(np.abs(liou @ rho_vac.reshape(-1, order="F"))) < 1e-14

    def test_trace_functional_is_left_null_vector(self):
        p = PAPER.with_drive(4.0)
        liou = build_liouvillian(p, 14)
        trace_vec = np.zeros(14 * 14)
        trace_vec[np.arange(14) * 15] = 1.0
        assert np.max(np.abs(trace_vec @ liou)) < 1e-12

    def test_two_level_damped_cavity_spectrum(self):
        p = KerrParams(delta=0.0, chi2=0.0, gamma=1.0, drive=0.0)
        liou = build_liouvillian(p, 2)
        evals = np.sort_complex(np.linalg.eigvals(liou))
        expected = np.sort_complex(np.array([0.0, -0.5, -0.5, -1.0], dtype=complex))
        assert np.allclose(evals, expected, atol=1e-12)


class TestSteadyState:
    def test_vacuum_at_zero_drive(self):
        state = steady_state(PAPER.with_drive(0.0), 12)
        state.validate()
        assert state.rho[0, 0].real == pytest.approx(1.0, abs=1e-12)

    def test_linear_cavity_is_coherent(self):
        p = KerrParams(delta=-3.0, chi2=0.0, gamma=2.0, drive=2.0)
        state = steady_state(p, 25).validate()
        alpha = linear_cavity_alpha(p)
        vec = coherent_state_vector(alpha, 25)
        assert fidelity_with_pure(state, vec) > 1.0 - 1e-8

    def test_cutoff_guard_raises(self):
        with pytest.raises(CutoffTooSmall):
            steady_state(PAPER.with_drive(20.0), 14)

    def test_cutoff_convergence(self):
        p = PAPER.with_drive(10.0)
        mean_a_30 = expectations(steady_state(p, 30))[0]
        mean_a_40 = expectations(steady_state(p, 40))[0]
        assert abs(mean_a_40 - mean_a_30) < 1e-8

    def test_cptp_invariants_at_strong_drive(self):
        state = steady_state(PAPER.with_drive(20.0), 45)
        state.validate(herm_tol=1e-10, trace_tol=1e-10, eig_tol=-1e-8)


class TestExpectations:
    def test_coherent_state_is_poissonian(self):
        p = KerrParams(delta=-3.0, chi2=0.0, gamma=2.0, drive=2.0)
        state = steady_state(p, 25)
        mean_a, n, g2 = expectations(state)
        alpha = linear_cavity_alpha(p)
        assert mean_a == pytest.approx(alpha, abs=1e-8)
        assert n == pytest.approx(abs(alpha) ** 2, rel=1e-8)
        assert g2 == pytest.approx(1.0, abs=1e-8)

    def test_fock_one_antibunched(self):
        _, n, g2 = expectations(fock_dm(1, 6))
        assert n == pytest.approx(1.0)
        assert g2 == pytest.approx(0.0, abs=1e-12)

    def test_thermal_bunching(self):
        _, n, g2 = expectations(thermal_dm(1.0, 60))
        assert n == pytest.approx(1.0, rel=1e-12)
        assert g2 == pytest.approx(2.0, rel=1e-9)

    def test_vacuum_g2_undefined(self):
        with pytest.raises(VacuumG2Undefined):
            expectations(fock_dm(0, 5))


class TestEvolveMaster:
    def test_linear_cavity_against_closed_form(self):
        p = KerrParams(delta=-2.0, chi2=0.0, gamma=1.5, drive=0.5)
        rho0 = fock_dm(0, 15)
        times, states = evolve_master(rho0, p, 1e-2, 2.0)
        a_ss = linear_cavity_alpha(p)
        exact = a_ss * (1.0 - np.exp(-(1j * p.delta + p.gamma / 2) * times))
        a_op = destroy(15)
        simulated = np.array([np.trace(s.rho @ a_op) for s in states])
        assert np.max(np.abs(simulated - exact)) < 1e-6

    def test_zero_drive_vacuum_invariant(self):
        p = KerrParams(delta=-12.0, chi2=1.5, gamma=6.28, drive=0.0)
        _, states = evolve_master(fock_dm(0, 8), p, 1e-2, 0.5)
        assert abs(states[-1].rho[0, 0] - 1.0) < 1e-10

    def test_long_time_limit_is_steady_state(self):
        # slowest relaxation ~ gamma/2; t=6 leaves a residual ~ exp(-18.8);
        # the finer step keeps the cumulative RK4 trace drift under its guard
        p = PAPER.with_drive(3.0)
        _, states = evolve_master(fock_dm(0, 20), p, 5e-3, 6.0)
        target = steady_state(p, 20)
        assert np.max(np.abs(states[-1].rho - target.rho)) < 1e-6

    def test_trace_drift_guard(self):
        p = PAPER.with_drive(8.0)
        with pytest.raises(TraceDrift):
            evolve_master(fock_dm(0, 20), p, 0.5, 5.0)

    def test_trace_preserved_at_fine_step(self):
        p = PAPER.with_drive(2.0)
        _, states = evolve_master(fock_dm(0, 15), p, 1e-2, 1.0)
        for s in states[:: len(states) // 5]:
            assert abs(np.trace(s.rho) - 1.0) < 1e-8


class TestStateFactories:
    def test_coherent_dm_mean(self):
        state = coherent_dm(1.2 - 0.5j, 30)
        mean_a, n, _ = expectations(state)
        assert mean_a == pytest.approx(1.2 - 0.5j, abs=1e-10)
        assert n == pytest.approx(abs(1.2 - 0.5j) ** 2, rel=1e-10)

    def test_density_matrix_shape_validation(self):
        from kerrsim.lindblad import FockDensityMatrix
        with pytest.raises(ValueError):
            FockDensityMatrix(dim=3, rho=np.eye(4))
