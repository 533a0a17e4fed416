import math

import numpy as np
import pytest

from kerrsim.errors import Diverged, NoBistability
from kerrsim.model import InitialState, KerrParams, eom_rhs
from kerrsim.semiclassical import (
    Branch,
    bistable_drive_window,
    evolve_euler,
    evolve_euler_maruyama,
    signed_area,
    steady_states,
    turning_points,
)

PAPER = KerrParams()  # delta=-12, chi2=1.5, gamma=6.28


def drive_squared(p, n):
    return n * ((p.delta + 2 * p.chi2 * n) ** 2 + p.gamma**2 / 4)


class TestSteadyStates:
    def test_zero_drive_single_vacuum_root(self):
        pts = steady_states(PAPER.with_drive(0.0))
        assert len(pts) == 1
        assert pts[0].n == 0.0
        assert pts[0].alpha == 0.0

    def test_linear_cavity_closed_form(self):
        p = KerrParams(delta=0.0, chi2=0.0, gamma=2.0, drive=1.0)
        (pt,) = steady_states(p)
        assert pt.n == pytest.approx(1.0, rel=1e-12)
        assert pt.alpha == pytest.approx(-1.0, abs=1e-12)

    def test_three_roots_middle_unstable(self):
        pts = steady_states(PAPER.with_drive(8.0))
        assert len(pts) == 3
        assert [pt.branch for pt in pts] == [Branch.LOWER, Branch.METASTABLE, Branch.UPPER]
        assert pts[0].stable and pts[2].stable and not pts[1].stable
        # occupation ascending and consistent with alpha
        ns = [pt.n for pt in pts]
        assert ns == sorted(ns)
        for pt in pts:
            assert abs(abs(pt.alpha) ** 2 - pt.n) < 1e-10 * max(1.0, pt.n)

    def test_roots_solve_drive_equation(self):
        p = PAPER.with_drive(8.0)
        for pt in steady_states(p):
            assert drive_squared(p, pt.n) == pytest.approx(64.0, rel=1e-10)

    def test_every_root_is_a_fixed_point(self):
        for e in [0.5, 3.0, 6.5, 8.0, 9.5, 12.0, 20.0]:
            p = PAPER.with_drive(e)
            for pt in steady_states(p):
                assert abs(eom_rhs(pt.alpha, p)) < 1e-10

    def test_root_count_across_drive_window(self):
        e_lo, e_hi = bistable_drive_window(PAPER)
        for e in np.linspace(e_lo + 0.05, e_hi - 0.05, 15):
            assert len(steady_states(PAPER.with_drive(e))) == 3
        for e in [*np.linspace(0.2, e_lo - 0.05, 8), *np.linspace(e_hi + 0.05, 25.0, 8)]:
            assert len(steady_states(PAPER.with_drive(e))) == 1

    def test_single_root_branch_labels(self):
        assert steady_states(PAPER.with_drive(2.0))[0].branch == Branch.LOWER
        assert steady_states(PAPER.with_drive(15.0))[0].branch == Branch.UPPER


class TestTurningPoints:
    def test_reference_values(self):
        # frozen from direct evaluation of the closed form
        n_l, n_u = turning_points(PAPER)
        assert n_l == pytest.approx(1.4781350484892588, rel=1e-12)
        assert n_u == pytest.approx(3.8551982848440747, rel=1e-12)

    def test_closed_form_identity(self):
        n_l, n_u = turning_points(PAPER)
        root = math.sqrt(PAPER.delta**2 - 0.75 * PAPER.gamma**2)
        assert n_l == (-2 * PAPER.delta - root) / (6 * PAPER.chi2)
        assert n_u == (-2 * PAPER.delta + root) / (6 * PAPER.chi2)

    def test_turning_points_are_extrema_of_drive_curve(self):
        n_l, n_u = turning_points(PAPER)
        eps = 1e-6
        for n in (n_l, n_u):
            slope = (drive_squared(PAPER, n + eps) - drive_squared(PAPER, n - eps)) / (2 * eps)
            assert abs(slope) < 1e-6

    def test_no_bistability_below_critical_detuning(self):
        with pytest.raises(NoBistability):
            turning_points(KerrParams(delta=-1.0, chi2=1.5, gamma=6.28))

    def test_no_bistability_for_wrong_sign_combination(self):
        with pytest.raises(NoBistability):
            turning_points(KerrParams(delta=12.0, chi2=1.5, gamma=6.28))

    def test_small_gamma_limit(self):
        p = KerrParams(delta=-12.0, chi2=1.5, gamma=1e-9)
        n_l, n_u = turning_points(p)
        assert n_l == pytest.approx(12.0 / 9.0, rel=1e-6)
        assert n_u == pytest.approx(4.0, rel=1e-6)


class TestEvolveEuler:
    def test_null_run(self):
        rec = evolve_euler(PAPER.with_drive(0.0), 0.0, 1e-2, 1.0)
        assert np.all(rec.values == 0.0)
        rec.validate_uniform()

    def test_linear_solution(self):
        p = KerrParams(delta=-2.0, chi2=0.0, gamma=1.5, drive=0.8)
        a0 = 0.3 + 0.1j
        dt = 1e-4
        rec = evolve_euler(p, a0, dt, 1.0)
        a_ss = -p.drive / (1j * p.delta + p.gamma / 2)
        exact = a_ss + (a0 - a_ss) * np.exp(-(1j * p.delta + p.gamma / 2) * rec.times)
        # forward Euler: global error O(dt)
        assert np.max(np.abs(rec.values - exact)) < 50 * dt

    def test_reference_run_reaches_a_branch(self):
        p = PAPER.with_drive(8.0)
        rec = evolve_euler(p, 0.0, 1e-2, 2.0)
        dists = [abs(rec.values[-1] - pt.alpha) for pt in steady_states(p)]
        assert min(dists) < 0.05

    def test_divergence_guard(self):
        p = KerrParams(delta=-12.0, chi2=1.5, gamma=6.28, drive=50.0)
        with pytest.raises(Diverged):
            evolve_euler(p, 0.0, 0.5, 50.0)

    def test_accepts_initial_state_object(self):
        rec = evolve_euler(PAPER.with_drive(1.0), InitialState(1.5, 0.33 * np.pi), 1e-2, 0.1)
        assert rec.values[0] == pytest.approx(1.5 * np.exp(1j * 0.33 * np.pi))


class TestHysteresis:
    def test_initial_state_selects_branch(self):
        # The pi-rotated phase-space point [2.5, 0.63*pi] sits in the upper
        # basin under this drive-sign convention (phase quoted for the +E
        # convention maps by phi -> phi + pi).
        upper_start = InitialState(2.5, 0.63 * math.pi)
        splits = 0
        for e in [7.0, 8.0, 9.0]:
            p = PAPER.with_drive(e)
            pts = steady_states(p)
            lower, upper = pts[0].alpha, pts[2].alpha
            a_vac = evolve_euler(p, 0.0, 1e-2, 2.0).values[-1]
            a_up = evolve_euler(p, upper_start, 1e-2, 2.0).values[-1]
            if abs(a_vac - lower) < 0.05 and abs(a_up - upper) < 0.05:
                splits += 1
        assert splits == 3

    def test_rotation_sense_differs_between_branches(self):
        upper_start = InitialState(2.5, 0.63 * math.pi)
        for e in [7.0, 8.0, 9.0]:
            p = PAPER.with_drive(e)
            pts = steady_states(p)
            lower_run = evolve_euler(p, 0.0, 1e-2, 2.0)
            upper_run = evolve_euler(p, upper_start, 1e-2, 2.0)
            # fixed convention (attractor-centered): lower-branch spirals
            # sweep positive (counter-clockwise), upper-branch negative
            assert signed_area(lower_run, pts[0].alpha) > 0.0
            assert signed_area(upper_run, pts[2].alpha) < 0.0


class TestEulerMaruyama:
    def test_zero_noise_matches_euler(self):
        # gamma must stay positive; make the noise amplitude negligible instead
        p = KerrParams(delta=-2.0, chi2=0.5, gamma=1e-24, drive=0.3)
        det = evolve_euler(p, 0.1, 1e-2, 0.5)
        (sto,) = evolve_euler_maruyama(p, 0.1, 1e-2, 0.5, seed=3, n_traj=1)
        assert np.max(np.abs(det.values - sto.values)) < 1e-10

    def test_same_seed_bit_identical(self):
        p = PAPER.with_drive(1.0)
        run1 = evolve_euler_maruyama(p, 0.0, 1e-2, 1.0, seed=11, n_traj=3)
        run2 = evolve_euler_maruyama(p, 0.0, 1e-2, 1.0, seed=11, n_traj=3)
        for r1, r2 in zip(run1, run2):
            assert np.array_equal(r1.values, r2.values)

    def test_different_seed_differs(self):
        p = PAPER.with_drive(1.0)
        (r1,) = evolve_euler_maruyama(p, 0.0, 1e-2, 0.5, seed=11, n_traj=1)
        (r2,) = evolve_euler_maruyama(p, 0.0, 1e-2, 0.5, seed=12, n_traj=1)
        assert not np.array_equal(r1.values, r2.values)

    def test_stationary_variance_matches_vacuum_level(self):
        # chi2=0, E=0: symmetrized stationary variance of a is 1/2
        p = KerrParams(delta=-3.0, chi2=0.0, gamma=4.0, drive=0.0)
        trajs = evolve_euler_maruyama(p, 0.0, 5e-3, 60.0, seed=21, n_traj=24)
        samples = np.concatenate([t.values[len(t.values) // 4:] for t in trajs])
        var = np.mean(np.abs(samples) ** 2)
        assert var == pytest.approx(0.5, rel=0.05)

    def test_ensemble_mean_converges_to_deterministic(self):
        p = KerrParams(delta=-2.0, chi2=0.0, gamma=2.0, drive=1.0)
        det = evolve_euler(p, 0.0, 1e-2, 2.0)
        trajs = evolve_euler_maruyama(p, 0.0, 1e-2, 2.0, seed=5, n_traj=64)
        mean = np.mean([t.values for t in trajs], axis=0)
        # fluctuation scale ~ 1/2, reduced by sqrt(64)
        assert np.max(np.abs(mean - det.values)) < 5.0 / math.sqrt(64)
