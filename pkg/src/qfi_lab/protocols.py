"""Measurement protocols: Ramsey baselines, optimal pulse control, Rabi drive.

Each protocol prepares an equal superposition, lets the modulated sigma_z
drive (plus control pulses) imprint a phase, and reads out through a fringe
P = (1 - C*v(T)*cos(phi - ref))/2.  The sign convention maps phi = ref to
the ground state, and slope fits read out at the two quadratures around the
steepest point so the phase inversion is well defined on a full fringe.

The slope-based information estimate mirrors the experimental procedure:
sweep the signal parameter over a narrow grid, fit phase versus parameter,
and square the fitted slope.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable

import numpy as np

from .dynamics import (
    DriveParams,
    PulseSchedule,
    PureState,
    accumulated_phase,
    antinode_schedule,
    node_schedule,
    phase_slope_amplitude,
    phase_slope_frequency,
    phases_vs_omega,
)
from .fisher import QfiMethod, QfiResult
from .noise import NoiseParams, decoherence_envelope, estimate_phase, sample_outcomes
from .regression import linear_regression

#: Default signal-parameter grid for slope fits: 101 points spanning +-0.2%
#: of the working value, widened to +-2% when the expected phase excursion
#: across the narrow grid falls below PHASE_SPAN_MIN (short interaction
#: times, where the slope is small).  Widening any further would trade the
#: projection-noise error for a cubic-curvature bias of the fitted slope.
GRID_POINTS = 101
NARROW_SPAN = 0.002
WIDE_SPAN = 0.02
PHASE_SPAN_MIN = 0.02
AMPLITUDE_SPAN = 0.07

#: Target phase excursion for the noiseless (infinite-N) fit mode.  Keeping
#: the excursion tiny pins the regression to the linear-response regime so
#: its slope can be compared with the analytic derivative at 1e-6 relative.
NOISELESS_EXCURSION = 5e-4


class ProtocolKind(Enum):
    RAMSEY_UNCONTROLLED = "uncontrolled"
    FREQUENCY_OPTIMAL = "optimal"
    AMPLITUDE_OPTIMAL = "amplitude"
    RABI = "rabi"


@dataclass(frozen=True)
class ProtocolSpec:
    """A protocol kind with its drive, interrogation time, readout and noise.

    schedule_override replaces the kind's default pulse pattern; the
    landscape sweep uses it to probe deliberately mismatched controls.
    """

    kind: ProtocolKind
    drive: DriveParams
    T: float
    readout_phase: float = 0.0
    noise: NoiseParams | None = None
    schedule_override: PulseSchedule | None = None

    def __post_init__(self):
        if not self.T > 0.0:
            raise ValueError(f"T must be > 0, got {self.T}")

    def schedule(self) -> PulseSchedule:
        if self.schedule_override is not None:
            return self.schedule_override
        return build_schedule(self.kind, self.drive, self.T)


def build_schedule(kind: ProtocolKind, drive: DriveParams, T: float) -> PulseSchedule:
    """Control schedule for a protocol kind (empty for uncontrolled and Rabi)."""
    if kind is ProtocolKind.FREQUENCY_OPTIMAL:
        return antinode_schedule(drive, T)
    if kind is ProtocolKind.AMPLITUDE_OPTIMAL:
        return node_schedule(drive, T)
    return PulseSchedule(())


def rabi_optimal_detuning(amplitude_A: float, T: float) -> float:
    """Detuning that parks the Rabi fringe on the side of its first lobe.

    Chosen so T*sqrt(A^2 + Delta^2) = A*T + pi/2, which maximizes the
    frequency slope of the accumulated Rabi phase.
    """
    return math.sqrt(math.pi * math.pi / 4.0 + math.pi * amplitude_A * T) / T


def protocol_phase(spec: ProtocolSpec) -> float:
    """Accumulated phase of the protocol at its working point."""
    if spec.kind is ProtocolKind.RABI:
        # At the optimal working detuning the generalized-Rabi phase is
        # A*T + pi/2 by construction.
        return spec.drive.amplitude_A * spec.T + math.pi / 2.0
    return accumulated_phase(spec.drive, spec.schedule(), spec.T)


def excitation_probability(spec: ProtocolSpec) -> float:
    """Excited-state probability (1 - C*v(T)*cos(phi - readout_phase))/2.

    phi = readout_phase maps to the ground state; the probability is
    2*pi-periodic in the readout phase.
    """
    C = spec.noise.contrast_C if spec.noise else 1.0
    v = decoherence_envelope(spec.T, spec.noise)
    phi = protocol_phase(spec)
    return 0.5 * (1.0 - C * v * math.cos(phi - spec.readout_phase))


def protocol_slope(spec: ProtocolSpec) -> float:
    """Analytic phase slope of the protocol w.r.t. its estimated parameter.

    d(phi)/d(omega) for the frequency protocols and Rabi, d(phi)/dA for the
    amplitude protocol.
    """
    if spec.kind is ProtocolKind.RABI:
        return rabi_slope(spec.drive.amplitude_A, spec.T)
    if spec.kind is ProtocolKind.AMPLITUDE_OPTIMAL:
        return phase_slope_amplitude(spec.drive, spec.schedule(), spec.T)
    return phase_slope_frequency(spec.drive, spec.schedule(), spec.T)


@dataclass(frozen=True)
class SensitivityPoint:
    """One point of a sensitivity curve: slope, its error, QFI and 1/|slope|."""

    T: float
    slope: float
    slope_stderr: float
    qfi: QfiResult
    sensitivity: float

    @classmethod
    def from_slope(
        cls, T: float, slope: float, slope_stderr: float = 0.0,
        method: QfiMethod = QfiMethod.SLOPE_FIT,
    ) -> "SensitivityPoint":
        sens = math.inf if slope == 0.0 else 1.0 / abs(slope)
        return cls(T, slope, slope_stderr, QfiResult(slope * slope, method), sens)


def parameter_grid(
    spec: ProtocolSpec,
    noiseless: bool = False,
    span: float | None = None,
    points: int | None = None,
) -> np.ndarray:
    """Signal-parameter grid for a slope fit, centered on the working value.

    span is the half-width as a fraction of the center; when omitted the
    frequency protocols use +-0.2%, widened to +-2% when the expected phase
    excursion is below PHASE_SPAN_MIN, and the amplitude protocol uses +-7%.
    """
    s0 = abs(protocol_slope(spec))
    if spec.kind is ProtocolKind.AMPLITUDE_OPTIMAL:
        center = spec.drive.amplitude_A
        if span is None:
            span = AMPLITUDE_SPAN
    else:
        center = spec.drive.omega
        if span is None:
            span = NARROW_SPAN
            if s0 * span * center < PHASE_SPAN_MIN:
                span = WIDE_SPAN
    if noiseless and s0 > 0.0:
        span = min(span, NOISELESS_EXCURSION / (s0 * center))
    return center * np.linspace(1.0 - span, 1.0 + span, points or GRID_POINTS)


def _phase_curve(spec: ProtocolSpec, grid: np.ndarray) -> np.ndarray:
    """True accumulated phase at each grid value of the signal parameter.

    The control schedule stays fixed at the working point; only the signal
    parameter varies, exactly as in the calibration sweep of an experiment.
    """
    drive, T = spec.drive, spec.T
    if spec.kind is ProtocolKind.RABI:
        omega0 = drive.omega - rabi_optimal_detuning(drive.amplitude_A, T)
        det = grid - omega0
        return T * np.sqrt(drive.amplitude_A**2 + det**2)
    if spec.kind is ProtocolKind.AMPLITUDE_OPTIMAL:
        return grid * phase_slope_amplitude(drive, spec.schedule(), T)
    return phases_vs_omega(drive.amplitude_A, drive.theta, spec.schedule(), T, grid)


def slope_fit_qfi(
    spec: ProtocolSpec,
    param_grid: np.ndarray | None = None,
    N_per_point: int = 10_000,
    seed: int = 0,
    noiseless: bool = False,
    seed_key: tuple[int, ...] = (),
) -> SensitivityPoint:
    """Slope-based information estimate from simulated fringe measurements.

    For each grid value of the signal parameter the fringe is sampled at two
    readout quadratures (N_per_point shots split between them), the phase is
    inverted and unwrapped by continuity, and a weighted line fit gives the
    slope, its regression standard error, QFI = slope**2 and sensitivity =
    1/|slope|.  noiseless=True skips sampling and fits the exact phases on a
    linear-response grid, reproducing the analytic slope to high accuracy.
    Deterministic for a fixed (spec, seed) regardless of evaluation order.
    """
    if param_grid is None:
        param_grid = parameter_grid(spec, noiseless=noiseless)
    grid = np.asarray(param_grid, dtype=float)
    if grid.size < 3:
        raise ValueError(f"slope fit needs at least 3 grid points, got {grid.size}")

    phis = _phase_curve(spec, grid)
    if noiseless:
        fit = linear_regression(grid, phis)
    else:
        phases, errors = _sample_phases(spec, phis, N_per_point, seed, seed_key)
        fit = linear_regression(grid, phases, errors)
    return SensitivityPoint.from_slope(spec.T, fit.slope, fit.slope_stderr)


def _sample_phases(spec, phis, N_per_point, seed, seed_key=()):
    C = spec.noise.contrast_C if spec.noise else 1.0
    cv = C * decoherence_envelope(spec.T, spec.noise)
    n_sin = N_per_point // 2
    n_cos = N_per_point - n_sin
    phases = np.empty_like(phis)
    errors = np.empty_like(phis)
    for i, phi in enumerate(phis):
        p_sin = 0.5 * (1.0 - cv * math.sin(phi))
        p_cos = 0.5 * (1.0 - cv * math.cos(phi))
        rec_sin = sample_outcomes(p_sin, n_sin, seed, *seed_key, i, 0)
        rec_cos = sample_outcomes(p_cos, n_cos, seed, *seed_key, i, 1)
        phases[i], errors[i] = estimate_phase(rec_sin, rec_cos)
    return np.unwrap(phases), errors


def rabi_probability(amplitude_A: float, detuning: float, T: float) -> float:
    """Transition probability of a resonant Rabi drive seen at a detuning.

    P = sin^2(T*sqrt(A^2 + Delta^2)/2) / (1 + Delta^2/A^2).
    """
    gen = math.sqrt(amplitude_A**2 + detuning**2)
    pre = 1.0 / (1.0 + (detuning / amplitude_A) ** 2)
    return pre * math.sin(0.5 * T * gen) ** 2


def rabi_slope(amplitude_A: float, T: float) -> float:
    """Frequency slope of the Rabi phase at the optimal working detuning.

    d(phi)/d(omega) = T*sqrt(pi*(pi + 4*A*T)) / (pi + 2*A*T); its square is
    rabi_qfi.
    """
    at = amplitude_A * T
    return T * math.sqrt(math.pi * (math.pi + 4.0 * at)) / (math.pi + 2.0 * at)


def rabi_qfi(amplitude_A: float, T: float) -> float:
    """Best Rabi-spectroscopy information: pi*T^2*(pi + 4*A*T)/(pi + 2*A*T)^2.

    Grows only linearly at long times (asymptote pi*T/A), which is why the
    side-of-fringe Rabi method loses to antinode pulse control for any T
    beyond one signal period.
    """
    if not amplitude_A > 0.0:
        raise ValueError(f"amplitude_A must be > 0, got {amplitude_A}")
    if not T > 0.0:
        raise ValueError(f"T must be > 0, got {T}")
    at = amplitude_A * T
    return math.pi * T * T * (math.pi + 4.0 * at) / (math.pi + 2.0 * at) ** 2


def sensitivity_limits(
    kind: ProtocolKind, amplitude_A: float, omega: float, T: float
) -> float:
    """Closed-form sensitivity limit curve of a protocol kind.

    Frequency: omega/(A*T) uncontrolled, pi/(A*T^2) with antinode control
    (the controlled curve wins exactly when omega*T > pi).  Amplitude with
    node control: pi/T (quoted in the half-eigenvalue convention, see
    README).  Rabi: 1/sqrt(rabi_qfi).
    """
    if not (amplitude_A > 0.0 and omega > 0.0 and T > 0.0):
        raise ValueError("amplitude_A, omega and T must all be > 0")
    if kind is ProtocolKind.RAMSEY_UNCONTROLLED:
        return omega / (amplitude_A * T)
    if kind is ProtocolKind.FREQUENCY_OPTIMAL:
        return math.pi / (amplitude_A * T * T)
    if kind is ProtocolKind.AMPLITUDE_OPTIMAL:
        return math.pi / T
    if kind is ProtocolKind.RABI:
        return 1.0 / math.sqrt(rabi_qfi(amplitude_A, T))
    raise ValueError(f"unknown protocol kind: {kind!r}")


def envelope_times(drive: DriveParams, count: int, k_start: int = 0) -> np.ndarray:
    """Times where the uncontrolled frequency slope is stationary.

    Solutions of omega*T + theta = pi/2 + k*pi; at these times the
    uncontrolled slope magnitude touches its envelope (A/omega)*(T -+
    1/omega), approaching A*T/omega from either side as omega*T grows.
    """
    ks = np.arange(k_start, k_start + count)
    t = (0.5 * math.pi + ks * math.pi - drive.theta) / drive.omega
    return t[t > 0.0]


def state_map(spec: ProtocolSpec) -> Callable[[float], PureState]:
    """Map signal frequency -> output pure state, for derivative-based QFI.

    The control schedule stays fixed at the spec's working frequency; only
    the signal frequency of the drive varies.  The returned states carry the
    symmetric global-phase convention of the sigma_z propagator, so their
    phase varies smoothly with frequency.
    """
    sched = spec.schedule()
    A, th, T = spec.drive.amplitude_A, spec.drive.theta, spec.T

    def _state(omega: float) -> PureState:
        phi = accumulated_phase(DriveParams(A, omega, th), sched, T)
        return PureState.equal_superposition(phi)

    return _state
