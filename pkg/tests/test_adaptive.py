import math

import numpy as np
import pytest

from qfi_lab import (
    AdaptiveTrajectory,
    DriveParams,
    LandscapeGrid,
    PulseSchedule,
    adaptive_loop,
    iteration_info,
    landscape_sweep,
    log_iteration_info,
    mismatched_schedule,
    phase_slope_frequency,
    predicted_rounds,
    qfi_phase_mismatch,
    total_info_bounds,
)
from conftest import A_DEFAULT, OMEGA_DEFAULT


class TestIterationInfo:
    def test_round_zero(self):
        assert iteration_info(2.5, A_DEFAULT, 100, 0) == pytest.approx(2.5, rel=1e-12)

    def test_round_one(self):
        I0, N = 1.7, 100
        expected = I0 * I0 * (A_DEFAULT / math.pi) ** 2 * (1.0 - 1.0 / (2 * N))
        assert iteration_info(I0, A_DEFAULT, N, 1) == pytest.approx(expected, rel=1e-12)

    def test_log_affine_in_2_to_n(self):
        # log I_n = 2^n * (log I0 + log K) - log K exactly
        I0, N = 1.3, 50
        log_k = 2.0 * math.log(A_DEFAULT / math.pi) + math.log1p(-1.0 / (2 * N))
        for n in range(7):
            expected = (2.0**n) * (math.log(I0) + log_k) - log_k
            assert log_iteration_info(I0, A_DEFAULT, N, n) == pytest.approx(
                expected, abs=1e-10
            )

    def test_overflow_guarded(self):
        assert iteration_info(10.0, A_DEFAULT, 100, 30) == math.inf
        assert math.isfinite(log_iteration_info(10.0, A_DEFAULT, 100, 30))

    def test_validation(self):
        with pytest.raises(ValueError):
            iteration_info(0.0, A_DEFAULT, 100, 1)
        with pytest.raises(ValueError):
            iteration_info(1.0, A_DEFAULT, 0, 1)
        with pytest.raises(ValueError):
            iteration_info(1.0, A_DEFAULT, 100, -1)


class TestTotalInfoBounds:
    def test_ordering_where_informative(self):
        # the pessimistic divisor exceeds 1 once T_total/N >= e^2
        for x in (8.0, 20.0, 100.0, 1e4):
            lo, hi = total_info_bounds(x * 100.0, 100, A_DEFAULT)
            assert lo <= hi

    def test_ratio_identity(self):
        T_tot, N = 5000.0, 100
        lo, hi = total_info_bounds(T_tot, N, A_DEFAULT)
        assert hi / lo == pytest.approx(math.log2(math.log(T_tot / N)) ** 4, rel=1e-12)

    def test_domain(self):
        with pytest.raises(ValueError):
            total_info_bounds(100.0, 100, A_DEFAULT)  # T/N < e


class TestAdaptiveLoop:
    def test_exact_loop_matches_closed_form(self, drive):
        traj = adaptive_loop(drive, N_per_round=100, n_rounds=6, exact=True)
        I0 = traj.iterations[0].I_n
        for r in traj.iterations:
            assert math.log(r.I_n) == pytest.approx(
                log_iteration_info(I0, A_DEFAULT, 100, r.n), abs=1e-8
            )

    def test_info_never_decreases_in_exact_mode(self, drive):
        traj = adaptive_loop(drive, N_per_round=100, n_rounds=6, exact=True)
        infos = traj.info_sequence()
        assert np.all(np.diff(infos) >= 0.0)

    def test_rounds_match_double_log_prediction(self, drive):
        traj0 = adaptive_loop(drive, N_per_round=100, n_rounds=0, exact=True)
        I0 = traj0.iterations[0].I_n
        for budget in (10.0, 100.0, 1000.0):
            traj = adaptive_loop(drive, N_per_round=100, T_budget=budget, exact=True)
            measured = traj.iterations[-1].n
            predicted = predicted_rounds(budget, I0, A_DEFAULT, 100)
            assert abs(measured - predicted) <= 1.0

    def test_total_information_within_bounds(self, drive):
        traj = adaptive_loop(drive, N_per_round=100, T_budget=100.0, exact=True)
        lo, hi = total_info_bounds(traj.total_time, 100, A_DEFAULT)
        assert lo <= traj.total_information <= hi

    def test_crude_round_lands_in_main_peak(self, drive):
        # N = 100 uncontrolled repetitions at T = 1.25 us suffice to land
        # within the main information peak (|delta_omega| * T < 1)
        hits = 0
        for seed in range(50):
            traj = adaptive_loop(drive, N_per_round=100, n_rounds=0,
                                 initial_T=1.25, seed=seed)
            if abs(traj.iterations[0].delta_omega) * 1.25 < 1.0:
                hits += 1
        assert hits >= 48

    def test_estimate_shrinkage_respects_cramer_rao(self, drive):
        # delta_omega^2 <= 10/(N * I_{n-1}) in at least 95% of seeded rounds
        total = violations = 0
        for seed in range(300):
            traj = adaptive_loop(drive, N_per_round=100, n_rounds=4, seed=seed)
            infos = traj.info_sequence()
            for r in traj.iterations[1:]:
                total += 1
                if r.delta_omega**2 > 10.0 / (100 * infos[r.n - 1]):
                    violations += 1
        assert violations / total < 0.05

    def test_sampled_estimates_are_seeded(self, drive):
        a = adaptive_loop(drive, N_per_round=100, n_rounds=3, seed=21)
        b = adaptive_loop(drive, N_per_round=100, n_rounds=3, seed=21)
        assert [r.omega_estimate for r in a.iterations] == [
            r.omega_estimate for r in b.iterations
        ]

    def test_requires_stop_condition(self, drive):
        with pytest.raises(ValueError):
            adaptive_loop(drive)

    def test_trajectory_invariants(self):
        from qfi_lab import AdaptiveRound

        with pytest.raises(ValueError):  # non-contiguous rounds
            AdaptiveTrajectory(
                (AdaptiveRound(0, 1.0, 1.0, 6.28, 0.0),
                 AdaptiveRound(2, 2.0, 2.0, 6.28, 0.0)),
                100,
            )
        with pytest.raises(ValueError):  # controlled times must not shrink
            AdaptiveTrajectory(
                (AdaptiveRound(0, 1.0, 1.0, 6.28, 0.0),
                 AdaptiveRound(1, 2.0, 2.0, 6.28, 0.0),
                 AdaptiveRound(2, 1.5, 3.0, 6.28, 0.0)),
                100,
            )


class TestLandscape:
    def test_axes_validation(self):
        with pytest.raises(ValueError):
            LandscapeGrid(np.array([2.0, 1.0]), np.array([0.0, 1.0]), 1.0,
                          np.zeros((2, 2)))
        with pytest.raises(ValueError):
            LandscapeGrid(np.array([1.0, 2.0]), np.array([0.0, 1.0]), 1.0,
                          np.zeros((3, 2)))

    def test_matched_cell_is_argmax_noiseless(self, drive):
        grid = landscape_sweep(drive, T=1.25, noiseless=True)
        peak_w, peak_th = grid.argmax_cell()
        assert peak_w == pytest.approx(OMEGA_DEFAULT, rel=1e-12)
        assert peak_th == pytest.approx(0.0, abs=1e-12)

    def test_frequency_cut_symmetric_in_leading_order_regime(self, drive):
        # the leading-order mismatch law is even in delta_omega; the exact
        # integral matches that symmetry at the 1e-6 level for small
        # detunings (odd terms enter at (delta_omega*T)^3)
        T = 1.0
        freqs = OMEGA_DEFAULT * np.linspace(0.998, 1.002, 21)
        grid = landscape_sweep(drive, T=T, control_freqs=freqs,
                               control_phases=np.array([-1e-9, 1e-9]),
                               noiseless=True)
        _, cut = grid.frequency_cut(0.0)
        asym = np.abs(cut - cut[::-1]) / np.max(cut)
        assert np.max(asym) < 1e-6

    def test_phase_cut_matches_closed_form(self, drive):
        # N_half = 8 pulses over T = 4 half-periods... T = N*pi/omega
        n_half = 8
        T = n_half * math.pi / OMEGA_DEFAULT
        phases = np.linspace(-0.2, 0.2, 17)
        grid = landscape_sweep(drive, T=T,
                               control_freqs=np.array([OMEGA_DEFAULT * (1 - 1e-12),
                                                       OMEGA_DEFAULT]),
                               control_phases=phases, noiseless=True)
        _, cut = grid.phase_cut(OMEGA_DEFAULT)
        for dth, val in zip(phases, cut):
            assert val == pytest.approx(
                qfi_phase_mismatch(A_DEFAULT, OMEGA_DEFAULT, n_half, float(dth)),
                rel=0.05,
            )

    def test_far_detuned_cells_near_uncontrolled_level(self, drive):
        # outside the main peak the sidelobes oscillate about the
        # uncontrolled envelope level; their mean sits within a factor 2
        T = 1.25
        level = (A_DEFAULT * T / OMEGA_DEFAULT) ** 2
        for lo, hi in ((0.50, 0.75), (1.25, 1.50)):
            freqs = OMEGA_DEFAULT * np.linspace(lo, hi, 11)
            grid = landscape_sweep(drive, T=T, control_freqs=freqs,
                                   control_phases=np.array([-1e-9, 1e-9]),
                                   noiseless=True)
            _, cut = grid.frequency_cut(0.0)
            mean = float(np.mean(cut))
            assert 0.5 * level <= mean <= 2.0 * level

    def test_statistical_mode_seed_deterministic(self, drive):
        freqs = OMEGA_DEFAULT * np.linspace(0.95, 1.05, 3)
        phases = np.linspace(-0.3, 0.3, 3)
        a = landscape_sweep(drive, T=1.0, control_freqs=freqs,
                            control_phases=phases, N_per_point=200, seed=4)
        b = landscape_sweep(drive, T=1.0, control_freqs=freqs,
                            control_phases=phases, N_per_point=200, seed=4)
        assert np.array_equal(a.qfi, b.qfi)

    def test_bitwise_invariant_under_workers(self, drive):
        freqs = OMEGA_DEFAULT * np.linspace(0.9, 1.1, 5)
        phases = np.linspace(-0.5, 0.5, 5)
        serial = landscape_sweep(drive, T=1.0, control_freqs=freqs,
                                 control_phases=phases, N_per_point=100, seed=2,
                                 workers=1)
        parallel = landscape_sweep(drive, T=1.0, control_freqs=freqs,
                                   control_phases=phases, N_per_point=100, seed=2,
                                   workers=2)
        assert np.array_equal(serial.qfi, parallel.qfi)

    def test_time_offset_shifts_peak_phase(self, drive):
        # a constant pulse delay looks like a control-phase offset of
        # omega * delay at matched frequency
        delay = 0.006
        T = 2.0
        sched = mismatched_schedule(drive, OMEGA_DEFAULT, OMEGA_DEFAULT * delay, T)
        shifted = mismatched_schedule(drive, OMEGA_DEFAULT, 0.0, T, time_offset=-delay)
        a = phase_slope_frequency(drive, sched, T)
        b = phase_slope_frequency(drive, shifted, T)
        assert a == pytest.approx(b, rel=1e-9)
