"""Control-landscape sweeps and the iterative adaptive estimation schedule.

The landscape maps the slope-based information as the control frequency and
control phase are swept around the true drive; its peak at the matched point
is broad enough that a crude uncontrolled estimate suffices to land on it,
which is what makes the adaptive schedule work.  The schedule itself sets
each interrogation time to the square root of the previous information,
T_n = sqrt(I_{n-1}), producing a double-exponential information growth and a
round count that grows only as a double logarithm of the target duration.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .dynamics import (
    DriveParams,
    PulseSchedule,
    accumulated_phase,
    antinode_schedule,
    phase_slope_frequency,
)
from .fisher import qfi_freq_mismatch
from .noise import NoiseParams, decoherence_envelope, estimate_phase, sample_outcomes
from .protocols import (
    ProtocolKind,
    ProtocolSpec,
    envelope_times,
    parameter_grid,
    slope_fit_qfi,
)

DEFAULT_GRID_POINTS = 41
DEFAULT_FREQ_SPAN = (0.8, 1.2)   # omega_c / omega
DEFAULT_PHASE_SPAN = (-math.pi / 2.0, math.pi / 2.0)


@dataclass(frozen=True)
class LandscapeGrid:
    """Information landscape over control frequency x control phase at fixed T."""

    control_freq_axis: np.ndarray
    control_phase_axis: np.ndarray
    T: float
    qfi: np.ndarray

    def __post_init__(self):
        f = np.asarray(self.control_freq_axis, dtype=float)
        p = np.asarray(self.control_phase_axis, dtype=float)
        q = np.asarray(self.qfi, dtype=float)
        if np.any(np.diff(f) <= 0.0) or np.any(np.diff(p) <= 0.0):
            raise ValueError("landscape axes must be strictly increasing")
        if q.shape != (f.size, p.size):
            raise ValueError(
                f"qfi shape {q.shape} does not match axes ({f.size}, {p.size})"
            )
        object.__setattr__(self, "control_freq_axis", f)
        object.__setattr__(self, "control_phase_axis", p)
        object.__setattr__(self, "qfi", q)

    def argmax_cell(self) -> tuple[float, float]:
        i, j = np.unravel_index(int(np.argmax(self.qfi)), self.qfi.shape)
        return float(self.control_freq_axis[i]), float(self.control_phase_axis[j])

    def frequency_cut(self, delta_theta: float = 0.0) -> tuple[np.ndarray, np.ndarray]:
        j = int(np.argmin(np.abs(self.control_phase_axis - delta_theta)))
        return self.control_freq_axis, self.qfi[:, j]

    def phase_cut(self, omega_c: float | None = None) -> tuple[np.ndarray, np.ndarray]:
        axis = self.control_freq_axis
        i = axis.size // 2 if omega_c is None else int(np.argmin(np.abs(axis - omega_c)))
        return self.control_phase_axis, self.qfi[i, :]


def mismatched_schedule(
    true_drive: DriveParams,
    omega_c: float,
    delta_theta: float,
    T: float,
    time_offset: float = 0.0,
) -> PulseSchedule:
    """Antinode pulses for the assumed drive sin(omega_c*t + theta + dtheta).

    time_offset shifts every pulse by a constant delay (models a fixed cable
    or trigger latency between the control and the modulation); pulses
    shifted outside (0, T] are dropped.
    """
    assumed = DriveParams(true_drive.amplitude_A, omega_c, true_drive.theta + delta_theta)
    horizon = T + abs(time_offset) + math.pi / omega_c
    centers = np.asarray(antinode_schedule(assumed, horizon).pulse_centers)
    centers = centers + time_offset
    centers = centers[(centers > 0.0) & (centers <= T)]
    return PulseSchedule(tuple(centers))


def _cell_qfi(args) -> float:
    (true_drive, omega_c, dtheta, T, N_per_point, cell_seed, noiseless, offset) = args
    sched = mismatched_schedule(true_drive, omega_c, dtheta, T, offset)
    if noiseless:
        return phase_slope_frequency(true_drive, sched, T) ** 2
    # Statistical mode reuses the slope-fit machinery over a frequency grid
    # around the true drive, with a derived stream per cell.
    spec = ProtocolSpec(
        ProtocolKind.FREQUENCY_OPTIMAL, true_drive, T, schedule_override=sched
    )
    point = slope_fit_qfi(spec, parameter_grid(spec), N_per_point, seed=cell_seed)
    return point.qfi.value


def landscape_sweep(
    true_drive: DriveParams,
    T: float = 1.25,
    control_freqs: np.ndarray | None = None,
    control_phases: np.ndarray | None = None,
    N_per_point: int = 100,
    seed: int = 0,
    noiseless: bool = False,
    time_offset: float = 0.0,
    workers: int = 1,
) -> LandscapeGrid:
    """Sweep the slope-based information over (control frequency, phase).

    Defaults to a 41x41 grid spanning omega_c/omega in [0.8, 1.2] and
    delta_theta in [-pi/2, pi/2].  Cells are independent tasks with derived
    seeds (master seed plus cell index), so the result is bitwise identical
    for any worker count or execution order.  noiseless=True evaluates the
    analytic slope integral instead of simulating measurements.
    """
    if not T > 0.0:
        raise ValueError(f"T must be > 0, got {T}")
    if control_freqs is None:
        lo, hi = DEFAULT_FREQ_SPAN
        control_freqs = true_drive.omega * np.linspace(lo, hi, DEFAULT_GRID_POINTS)
    if control_phases is None:
        lo, hi = DEFAULT_PHASE_SPAN
        control_phases = np.linspace(lo, hi, DEFAULT_GRID_POINTS)
    freqs = np.asarray(control_freqs, dtype=float)
    phases = np.asarray(control_phases, dtype=float)

    tasks = []
    for i, wc in enumerate(freqs):
        for j, dth in enumerate(phases):
            tasks.append(
                (true_drive, float(wc), float(dth), T, N_per_point,
                 _cell_seed(seed, i, j), noiseless, time_offset)
            )

    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            values = list(pool.map(_cell_qfi, tasks, chunksize=64))
    else:
        values = [_cell_qfi(t) for t in tasks]
    qfi = np.asarray(values, dtype=float).reshape(freqs.size, phases.size)
    return LandscapeGrid(freqs, phases, T, qfi)


def _cell_seed(seed: int, i: int, j: int) -> int:
    # Flatten the cell index into a single integer so the stream split stays
    # independent of grid shape changes elsewhere.
    return (int(seed) << 24) ^ (i << 12) ^ j


def log_iteration_info(I0: float, amplitude_A: float, N: int, n: int) -> float:
    """log of I_n = I0**(2^n) * ((A/pi)^2 * (1 - 1/(2N)))**(2^n - 1)."""
    if not I0 > 0.0:
        raise ValueError(f"I0 must be > 0, got {I0}")
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    log_k = _log_gain(amplitude_A, N)
    return (2.0**n) * math.log(I0) + (2.0**n - 1.0) * log_k


def iteration_info(I0: float, amplitude_A: float, N: int, n: int) -> float:
    """Closed-form information of adaptive round n (double exponential in n).

    Evaluated in log space; values beyond float range come back as inf, with
    log_iteration_info as the overflow-safe carrier.
    """
    log_val = log_iteration_info(I0, amplitude_A, N, n)
    return math.exp(log_val) if log_val < 700.0 else math.inf


def _log_gain(amplitude_A: float, N: int) -> float:
    # per-round gain factor K = (A/pi)^2 * (1 - 1/(2N))
    return 2.0 * math.log(amplitude_A / math.pi) + math.log1p(-0.5 / N)


def total_info_bounds(T_total: float, N: int, amplitude_A: float) -> tuple[float, float]:
    """Bounds on the total adaptive information for total time T_total.

    upper: all time concentrated in the last round, (N*A^2/pi^2)*(T/N)^4.
    lower: every round as long as the last, dividing T/N by log2(ln(T/N)).
    Requires T_total/N > e so the double log is positive; the lower bound is
    informative (below the upper) once T_total/N >= e^2.
    """
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    x = T_total / N
    if x <= math.e:
        raise ValueError(f"T_total/N must exceed e, got {x}")
    scale = N * (amplitude_A / math.pi) ** 2
    upper = scale * x**4
    lower = scale * (x / math.log2(math.log(x))) ** 4
    return lower, upper


def predicted_rounds(T_target: float, I0: float, amplitude_A: float, N: int) -> float:
    """Closed-form round count at which T_n = sqrt(I_{n-1}) reaches T_target.

    n = 1 + log2((2*ln(T_target) + ln K)/(ln I0 + ln K)), a double logarithm
    of the target duration.  Requires a growing schedule (I0*K > 1).
    """
    log_k = _log_gain(amplitude_A, N)
    denom = math.log(I0) + log_k
    if denom <= 0.0:
        raise ValueError("schedule does not grow: need I0*(A/pi)^2*(1-1/2N) > 1")
    ratio = (2.0 * math.log(T_target) + log_k) / denom
    if ratio <= 0.0:
        raise ValueError("T_target already reached by the crude round")
    return 1.0 + math.log2(ratio)


@dataclass(frozen=True)
class AdaptiveRound:
    n: int
    T_n: float
    I_n: float
    omega_estimate: float
    delta_omega: float
    capped: bool = False


@dataclass(frozen=True)
class AdaptiveTrajectory:
    """Per-round record of the adaptive loop.

    Round 0 is the crude uncontrolled measurement that seeds the schedule;
    the controlled rounds n >= 1 have nondecreasing interrogation times.
    """

    iterations: tuple[AdaptiveRound, ...]
    N_per_round: int

    def __post_init__(self):
        ns = [r.n for r in self.iterations]
        if ns != list(range(len(ns))):
            raise ValueError("round indices must be contiguous from 0")
        ts = [r.T_n for r in self.iterations[1:]]
        if any(b < a for a, b in zip(ts, ts[1:])):
            raise ValueError("controlled interrogation times must be nondecreasing")

    @property
    def total_time(self) -> float:
        return self.N_per_round * sum(r.T_n for r in self.iterations)

    @property
    def total_information(self) -> float:
        return self.N_per_round * sum(r.I_n for r in self.iterations)

    def info_sequence(self) -> np.ndarray:
        return np.array([r.I_n for r in self.iterations])


def adaptive_loop(
    true_drive: DriveParams,
    N_per_round: int = 100,
    n_rounds: int | None = None,
    T_budget: float | None = None,
    initial_T: float = 2.0,
    omega_guess: float | None = None,
    seed: int = 0,
    noise: NoiseParams | None = None,
    exact: bool = False,
) -> AdaptiveTrajectory:
    """Iterative frequency estimation with feedback-matched antinode control.

    Round 0 measures uncontrolled at the envelope time nearest initial_T and
    seeds I_0 with the squared crude slope.  Each later round sets
    T_n = sqrt(I_{n-1}), rebuilds the antinode schedule at the current
    frequency estimate, simulates N_per_round two-quadrature measurements,
    and updates the estimate through the analytic slope.  The booked
    information follows the mismatch budget of the schedule,
    I_n = (A^2 T_n^4/pi^2)*(1 - 1/(2N)), i.e. the frequency mismatch is
    budgeted at the Cramer-Rao deviation of the previous round.

    exact=True replaces the sampled estimator by the exact one (the estimate
    stays at the true frequency); the information sequence then reproduces
    the closed-form double exponential.  A phase-wrap guard caps T_n whenever
    the a-priori phase spread sigma_omega * slope(T_n) would exceed pi/2 and
    flags the round; with an exact estimator the guard never triggers.

    The loop stops after n_rounds controlled rounds or once T_n reaches
    T_budget, whichever is given (at least one is required).  Only the
    frequency is adapted; the drive phase is taken as known.
    """
    if n_rounds is None and T_budget is None:
        raise ValueError("specify n_rounds and/or T_budget")
    A = true_drive.amplitude_A
    omega_true = true_drive.omega
    omega_hat = omega_true if omega_guess is None else float(omega_guess)

    # Crude round at a stationary (envelope) time so the uncontrolled slope
    # is on its envelope rather than at a fringe zero.
    T0 = _crude_time(true_drive, initial_T)
    empty = PulseSchedule(())
    slope0 = phase_slope_frequency(
        DriveParams(A, omega_hat, true_drive.theta), empty, T0
    )
    I0 = slope0 * slope0
    omega_hat, sigma_omega = _measure_round(
        true_drive, omega_hat, empty, T0, slope0, N_per_round, noise, seed, 0, exact
    )
    rounds = [AdaptiveRound(0, T0, I0, omega_hat, omega_hat - omega_true)]

    info = I0
    t_prev = 0.0
    n = 0
    while True:
        if n_rounds is not None and n >= n_rounds:
            break
        if T_budget is not None and rounds[-1].T_n >= T_budget and n >= 1:
            break
        n += 1
        t_next = math.sqrt(info)
        capped = False
        if not exact and sigma_omega > 0.0:
            # Keep the a-priori phase spread below pi/2 to avoid fringe-order
            # ambiguity at the longer time.
            t_cap = math.sqrt(0.5 * math.pi**2 / (A * sigma_omega))
            if t_next > t_cap:
                t_next = t_cap
                capped = True
        t_next = max(t_next, t_prev)
        t_prev = t_next

        sigma_budget = 1.0 / math.sqrt(N_per_round * info)
        info = qfi_freq_mismatch(A, t_next, sigma_budget)

        sched = antinode_schedule(
            DriveParams(A, omega_hat, true_drive.theta), t_next
        )
        slope = phase_slope_frequency(
            DriveParams(A, omega_hat, true_drive.theta), sched, t_next
        )
        omega_hat, sigma_omega = _measure_round(
            true_drive, omega_hat, sched, t_next, slope, N_per_round, noise,
            seed, n, exact,
        )
        rounds.append(
            AdaptiveRound(n, t_next, info, omega_hat, omega_hat - omega_true, capped)
        )
        if n > 64:
            raise RuntimeError("adaptive loop failed to terminate")
    return AdaptiveTrajectory(tuple(rounds), N_per_round)


def _crude_time(drive: DriveParams, initial_T: float) -> float:
    ts = envelope_times(drive, count=max(4, int(initial_T * drive.omega / math.pi) + 2))
    below = ts[ts <= initial_T * (1.0 + 1e-12)]
    return float(below[-1]) if below.size else float(ts[0])


def _measure_round(
    true_drive, omega_hat, sched, T, slope, N, noise, seed, round_idx, exact
):
    """One estimation round; returns (new estimate, its standard error)."""
    if exact:
        return true_drive.omega, 0.0
    if slope == 0.0:
        raise ValueError("estimation round has zero slope; cannot invert phase")
    phi_true = accumulated_phase(true_drive, sched, T)
    phi_pred = accumulated_phase(
        DriveParams(true_drive.amplitude_A, omega_hat, true_drive.theta), sched, T
    )
    C = noise.contrast_C if noise else 1.0
    cv = C * decoherence_envelope(T, noise)
    n_sin = N // 2
    n_cos = N - n_sin
    # Read out around the predicted phase so the measured offset is small.
    x = phi_true - phi_pred
    rec_sin = sample_outcomes(0.5 * (1.0 - cv * math.sin(x)), n_sin, seed, round_idx, 0)
    rec_cos = sample_outcomes(0.5 * (1.0 - cv * math.cos(x)), n_cos, seed, round_idx, 1)
    dphi, stderr = estimate_phase(rec_sin, rec_cos)
    return omega_hat + dphi / slope, stderr / abs(slope)
