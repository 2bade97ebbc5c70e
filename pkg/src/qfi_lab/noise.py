"""Decoherence, density-matrix evolution, projection noise and phase estimation.

Decoherence enters the measurement model through a visibility envelope v(T)
(pure dephasing by default, exp(-T/T2*)) and a readout contrast C, so the
excited-state probability of a fringe reads P = (1 - C*v*cos(phi - ref))/2.
The density-matrix path evolves populations and coherences explicitly and is
used to validate that picture; projection noise is simulated with seeded,
stream-split binomial draws so parameter sweeps stay reproducible under any
execution order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .dynamics import (
    DriveParams,
    PulseSchedule,
    PureState,
    _pulse_unitary,
    _segments,
    phase_slope_frequency,
)

ENVELOPE_MODELS = ("exponential", "gaussian")


@dataclass(frozen=True)
class NoiseParams:
    """Relaxation time T1, dephasing time T2*, and readout contrast.

    Defaults are the hardware-motivated values T1 = 14 us, T2* = 4 us and
    80% combined readout/preparation fidelity.  envelope selects the Ramsey
    decay shape used by the measurement model; the exponential form is the
    default and the Gaussian variant exists for A/B comparisons (the decay
    shape is not pinned down by the sensitivity data alone).
    """

    T1: float = 14.0
    T2_star: float = 4.0
    contrast_C: float = 0.8
    envelope: str = "exponential"

    def __post_init__(self):
        if not self.T1 > 0.0:
            raise ValueError(f"T1 must be > 0, got {self.T1}")
        if not self.T2_star > 0.0:
            raise ValueError(f"T2_star must be > 0, got {self.T2_star}")
        if not 0.0 <= self.contrast_C <= 1.0:
            raise ValueError(f"contrast_C must be in [0, 1], got {self.contrast_C}")
        if self.envelope not in ENVELOPE_MODELS:
            raise ValueError(f"envelope must be one of {ENVELOPE_MODELS}")

    @classmethod
    def ideal(cls) -> "NoiseParams":
        """No relaxation, no dephasing, unit contrast."""
        return cls(T1=math.inf, T2_star=math.inf, contrast_C=1.0)


@dataclass(frozen=True)
class DensityMatrix:
    """2x2 density matrix: Hermitian, trace 1 to 1e-10, eigenvalues >= -1e-10."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.shape != (2, 2):
            raise ValueError("DensityMatrix requires a 2x2 matrix")
        if float(np.max(np.abs(m - m.conj().T))) > 1e-10:
            raise ValueError("density matrix is not Hermitian")
        if abs(np.trace(m).real - 1.0) > 1e-10:
            raise ValueError(f"trace deviates from 1 by {abs(np.trace(m) - 1.0):.3e}")
        if float(np.min(np.linalg.eigvalsh(m))) < -1e-10:
            raise ValueError("density matrix has a negative eigenvalue")
        object.__setattr__(self, "matrix", m)

    @classmethod
    def from_pure(cls, state: PureState) -> "DensityMatrix":
        v = state.vector()
        return cls(np.outer(v, v.conj()))

    @property
    def excited_population(self) -> float:
        return float(self.matrix[1, 1].real)

    @property
    def coherence(self) -> complex:
        return complex(self.matrix[0, 1])


def decoherence_envelope(T: float, noise: NoiseParams | None) -> float:
    """Fringe visibility v(T) in [0, 1] from pure dephasing.

    exp(-T/T2*) by default, exp(-(T/T2*)**2) for the Gaussian variant.  T1
    is deliberately left out of the default envelope: at the interrogation
    times of interest (T <~ T2* = 4 us) pure dephasing dominates since
    T1 = 14 us.
    """
    if T < 0.0:
        raise ValueError(f"T must be >= 0, got {T}")
    if noise is None:
        return 1.0
    x = T / noise.T2_star
    return math.exp(-(x * x)) if noise.envelope == "gaussian" else math.exp(-x)


def evolve_density(
    drive: DriveParams,
    schedule: PulseSchedule,
    T: float,
    noise: NoiseParams | None,
    initial: DensityMatrix | PureState | None = None,
) -> DensityMatrix:
    """Piecewise evolution of a density matrix under drive, pulses and noise.

    Between pulses the Hamiltonian is sigma_z-diagonal, so the segment update
    is exact: the coherence rotates by the closed-form segment phase and
    decays at 1/T2*, the excited population relaxes toward the ground state
    at 1/T1.  Pi pulses are applied as exact unitaries.  Requires the
    physicality condition 1/T2* >= 1/(2*T1); with noise=None (or infinite
    times) the result matches the pure-state propagator exactly.
    """
    if initial is None:
        initial = PureState.equal_superposition()
    if isinstance(initial, PureState):
        rho = DensityMatrix.from_pure(initial).matrix.copy()
    else:
        rho = initial.matrix.copy()

    if noise is not None and 1.0 / noise.T2_star < 0.5 / noise.T1 - 1e-15:
        raise ValueError(
            "unphysical noise parameters: need 1/T2* >= 1/(2*T1), got "
            f"T1={noise.T1}, T2*={noise.T2_star}"
        )
    g_phi = 0.0 if noise is None else 1.0 / noise.T2_star
    g_relax = 0.0 if noise is None else 1.0 / noise.T1

    bounds, _ = _segments(schedule, T)
    w, th, A = drive.omega, drive.theta, drive.amplitude_A
    n_pulses = len(schedule.pulse_centers)
    pulse = _pulse_unitary(schedule.pulse_axis)

    for k in range(bounds.size - 1):
        a, b = bounds[k], bounds[k + 1]
        tau = b - a
        if tau > 0.0:
            dphi = A * (math.cos(w * a + th) - math.cos(w * b + th)) / w
            # rho[0,1] = amp0*conj(amp1) picks up exp(-i*dphi); decay rates act
            # independently because populations and coherences decouple for a
            # sigma_z-diagonal Hamiltonian.
            rho01 = rho[0, 1] * np.exp(-1j * dphi) * math.exp(-g_phi * tau)
            p_e = rho[1, 1].real * math.exp(-g_relax * tau)
            rho = np.array(
                [[1.0 - p_e, rho01], [np.conj(rho01), p_e]], dtype=complex
            )
        if k < n_pulses:
            rho = pulse @ rho @ pulse.conj().T
    return DensityMatrix(rho)


@dataclass(frozen=True)
class MeasurementRecord:
    """Outcome tally of N projective readouts: excited_count successes."""

    N: int
    excited_count: int
    seed: int

    def __post_init__(self):
        if self.N < 1:
            raise ValueError(f"N must be >= 1, got {self.N}")
        if not 0 <= self.excited_count <= self.N:
            raise ValueError("excited_count must lie in [0, N]")

    @property
    def probability(self) -> float:
        return self.excited_count / self.N


def spawn_rng(seed: int, *key: int) -> np.random.Generator:
    """Deterministic per-task generator.

    Streams are split by seeding PCG64 with SeedSequence((seed, *key)), so a
    (master seed, cell index...) pair always yields the same stream no matter
    which worker or execution order evaluates it.
    """
    ss = np.random.SeedSequence((int(seed),) + tuple(int(k) for k in key))
    return np.random.Generator(np.random.PCG64(ss))


def sample_outcomes(P: float, N: int, seed: int, *key: int) -> MeasurementRecord:
    """Draw the excited count of N repetitions binomially; seed-reproducible."""
    if not 0.0 <= P <= 1.0:
        raise ValueError(f"P must be in [0, 1], got {P}")
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    rng = spawn_rng(seed, *key)
    return MeasurementRecord(N=N, excited_count=int(rng.binomial(N, P)), seed=seed)


def estimate_phase(
    record_sin: MeasurementRecord, record_cos: MeasurementRecord
) -> tuple[float, float]:
    """Two-quadrature phase estimate with binomial error propagation.

    record_sin was taken with the readout reference advanced by pi/2 relative
    to record_cos, so 1 - 2*P_sin estimates C*v*sin(phi) and 1 - 2*P_cos
    estimates C*v*cos(phi); the contrast factor cancels in the atan2 ratio.
    Returns (phase in (-pi, pi], standard error).  Raises when both
    quadratures land exactly at P = 1/2, where the inversion is singular.
    """
    u = 1.0 - 2.0 * record_sin.probability
    w = 1.0 - 2.0 * record_cos.probability
    r2 = u * u + w * w
    if r2 == 0.0:
        raise ValueError("phase inversion singular: both quadratures at P = 1/2")
    phase = math.atan2(u, w)

    var_u = 4.0 * _binomial_variance(record_sin)
    var_w = 4.0 * _binomial_variance(record_cos)
    stderr = math.sqrt(w * w * var_u + u * u * var_w) / r2
    return phase, stderr


def _binomial_variance(record: MeasurementRecord) -> float:
    # Clip P away from {0, 1} so a fully polarized tally still reports a
    # finite (floor-level) uncertainty instead of zero.
    p = min(max(record.probability, 0.5 / record.N), 1.0 - 0.5 / record.N)
    return p * (1.0 - p) / record.N


def cfi_vs_time_with_decoherence(
    drive: DriveParams,
    schedule_builder: Callable[[DriveParams, float], PulseSchedule] | None,
    noise: NoiseParams | None,
    T_grid,
) -> tuple[np.ndarray, np.ndarray]:
    """Classical Fisher information of the decohered fringe readout per time.

    At the optimal readout phase (mid-fringe) the binary-outcome information
    is (C*v(T))**2 * (d phi/d omega)**2, so dephasing multiplies the
    noiseless QFI by exp(-2T/T2*).  schedule_builder maps (drive, T) to the
    control schedule; None means uncontrolled (no pulses).
    """
    Ts = np.asarray(T_grid, dtype=float)
    out = np.empty_like(Ts)
    for i, T in enumerate(Ts):
        sched = PulseSchedule(()) if schedule_builder is None else schedule_builder(drive, T)
        slope = phase_slope_frequency(drive, sched, T)
        cv = 1.0 if noise is None else noise.contrast_C * decoherence_envelope(T, noise)
        out[i] = (cv * slope) ** 2
    return Ts, out
