"""Two-level-system dynamics under a periodically modulated sigma_z Hamiltonian.

The signal Hamiltonian is H(t) = hbar * A * sin(omega*t + theta) * sigma_z / 2,
written in the frame rotating at the qubit frequency (the static splitting is
rotated away).  A schedule of pi pulses toggles the sign function f(t) that
multiplies the sigma_z coupling in every accumulated integral, so the phase
picked up by an equal superposition is

    phi = A * integral_0^T f(t) sin(omega*t + theta) dt.

Units throughout: times in microseconds, angular frequencies and amplitudes in
rad/us (so A/2pi = 0.60 MHz reads as A = 2*pi*0.6 rad/us).

Everything here is a pure function of its inputs; the dataclasses are frozen
and freely shareable across concurrent tasks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

TWO_PI = 2.0 * math.pi

IDENTITY = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)

# Relative tolerance for "is this pulse center still inside [0, T]" checks.
_EDGE_RTOL = 1e-12


class PulseAxis(Enum):
    X = "x"
    Y = "y"


@dataclass(frozen=True)
class DriveParams:
    """Signal drive A*sin(omega*t + theta) on sigma_z/2.

    amplitude_A and omega are angular quantities in rad/us; theta is stored
    normalized to [0, 2*pi).
    """

    amplitude_A: float
    omega: float
    theta: float = 0.0

    def __post_init__(self):
        if not self.amplitude_A >= 0.0:
            raise ValueError(f"amplitude_A must be >= 0, got {self.amplitude_A}")
        if not self.omega > 0.0:
            raise ValueError(f"omega must be > 0, got {self.omega}")
        object.__setattr__(self, "theta", float(self.theta) % TWO_PI)

    @property
    def period(self) -> float:
        return TWO_PI / self.omega


@dataclass(frozen=True)
class PulseSchedule:
    """Ordered pi-pulse centers with axis, duration and Rabi amplitude.

    pulse_duration == 0 means instantaneous pulses (the closed-form
    idealization).  A finite duration requires rabi_amplitude*pulse_duration
    == pi to within 1e-9 relative, so that each pulse is a full pi rotation,
    and pulses must not overlap.
    """

    pulse_centers: tuple[float, ...]
    pulse_axis: PulseAxis = PulseAxis.Y
    pulse_duration: float = 0.0
    rabi_amplitude: float = 0.0

    def __post_init__(self):
        centers = tuple(float(t) for t in self.pulse_centers)
        object.__setattr__(self, "pulse_centers", centers)
        if any(t <= 0.0 for t in centers):
            raise ValueError("pulse centers must be strictly positive")
        if any(b <= a for a, b in zip(centers, centers[1:])):
            raise ValueError("pulse centers must be strictly increasing")
        if self.pulse_duration < 0.0:
            raise ValueError("pulse_duration must be >= 0")
        if self.pulse_duration > 0.0:
            area = self.rabi_amplitude * self.pulse_duration
            if abs(area - math.pi) > 1e-9 * math.pi:
                raise ValueError(
                    f"rabi_amplitude*pulse_duration = {area!r} is not a pi rotation"
                )
            gaps = np.diff(centers)
            if centers and gaps.size and np.any(gaps < self.pulse_duration):
                raise ValueError("finite-duration pulses overlap")

    @property
    def n_pulses(self) -> int:
        return len(self.pulse_centers)

    def sign_function(self) -> "SignFunction":
        return SignFunction(self)


@dataclass(frozen=True)
class SignFunction:
    """Toggling sign f(t) = (-1)**(number of pulse centers <= t).

    f(0) = +1 because centers are strictly positive; f flips exactly once per
    pulse, so f(T) = (-1)**n_pulses for T past the last center.
    """

    schedule: PulseSchedule

    def __call__(self, t):
        centers = np.asarray(self.schedule.pulse_centers, dtype=float)
        flips = np.searchsorted(centers, np.asarray(t, dtype=float), side="right")
        return np.where(flips % 2 == 0, 1.0, -1.0)[()]


@dataclass(frozen=True)
class PureState:
    """Two-level pure state with amplitudes on |0> and |1> (norm 1 to 1e-12)."""

    amp0: complex
    amp1: complex

    def __post_init__(self):
        norm = abs(self.amp0) ** 2 + abs(self.amp1) ** 2
        if abs(norm - 1.0) > 1e-12:
            raise ValueError(f"state norm deviates from 1 by {abs(norm - 1.0):.3e}")

    @classmethod
    def equal_superposition(cls, relative_phase: float = 0.0) -> "PureState":
        """(|0> + exp(i*phi)|1>)/sqrt(2)."""
        r = 1.0 / math.sqrt(2.0)
        return cls(complex(r), complex(r * np.exp(1j * relative_phase)))

    def vector(self) -> np.ndarray:
        return np.array([self.amp0, self.amp1], dtype=complex)

    def overlap(self, other: "PureState") -> complex:
        return complex(
            np.conj(self.amp0) * other.amp0 + np.conj(self.amp1) * other.amp1
        )

    def relative_phase(self) -> float:
        """arg(amp1) - arg(amp0), the phase of the |1> component."""
        return float(np.angle(self.amp1 * np.conj(self.amp0)))


@dataclass(frozen=True)
class Unitary2:
    """2x2 unitary (U^dag U = 1 to 1e-10 per entry)."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.shape != (2, 2):
            raise ValueError("Unitary2 requires a 2x2 matrix")
        dev = float(np.max(np.abs(m.conj().T @ m - np.eye(2))))
        if dev > 1e-10:
            raise ValueError(f"matrix is not unitary, max deviation {dev:.3e}")
        object.__setattr__(self, "matrix", m)

    def apply(self, state: PureState) -> PureState:
        # Renormalize to strip the ~1e-12 float drift a long product leaves.
        v = self.matrix @ state.vector()
        v = v / np.linalg.norm(v)
        return PureState(complex(v[0]), complex(v[1]))


def antinode_schedule(
    drive: DriveParams, T: float, axis: PulseAxis = PulseAxis.Y
) -> PulseSchedule:
    """Instantaneous pi pulses at every antinode of the drive in (0, T].

    Antinodes solve omega*t + theta = pi/2 + n*pi.  A pulse landing exactly
    at t = T is kept in the schedule; it flips f(T) but cannot change any
    integral over [0, T].  Returns an empty schedule when T is shorter than
    the first antinode.
    """
    _check_horizon(T)
    w, th = drive.omega, drive.theta
    first = (0.5 * math.pi - th) / w
    step = math.pi / w
    return PulseSchedule(_grid_times(first, step, T, include_end=True), pulse_axis=axis)


def node_schedule(
    drive: DriveParams, T: float, axis: PulseAxis = PulseAxis.Y
) -> PulseSchedule:
    """Instantaneous pi pulses at every node of the drive interior to (0, T).

    Nodes solve omega*t + theta = n*pi with n >= 1; the endpoints are
    excluded.  This is the optimal placement for amplitude estimation.
    """
    _check_horizon(T)
    w, th = drive.omega, drive.theta
    first = (math.pi - th) / w
    step = math.pi / w
    return PulseSchedule(_grid_times(first, step, T, include_end=False), pulse_axis=axis)


def _grid_times(first: float, step: float, T: float, include_end: bool) -> tuple:
    """Arithmetic progression first + n*step restricted to (0, T] or (0, T)."""
    n_lo = max(0, math.ceil(-first / step - _EDGE_RTOL))
    if first + n_lo * step <= T * _EDGE_RTOL:  # endpoint t == 0 is excluded
        n_lo += 1
    n_hi = math.floor((T - first) / step + _EDGE_RTOL * max(1.0, abs(T / step)))
    if n_hi < n_lo:
        return ()
    t = first + step * np.arange(n_lo, n_hi + 1)
    t = np.minimum(t, T)  # snap float overshoot at the right edge
    if not include_end:
        t = t[t < T * (1.0 - _EDGE_RTOL)]
    return tuple(t)


def _check_horizon(T: float) -> None:
    if not T > 0.0:
        raise ValueError(f"T must be > 0, got {T}")


def _segments(schedule: PulseSchedule, T: float):
    """Segment boundaries [0, c_1, ..., c_k, T] and alternating signs.

    Raises if any pulse center lies beyond T.  A center exactly at T yields
    an empty final segment, i.e. no contribution to any integral.
    """
    centers = np.asarray(schedule.pulse_centers, dtype=float)
    if centers.size and centers[-1] > T * (1.0 + _EDGE_RTOL):
        raise ValueError(
            f"pulse center {centers[-1]} lies beyond the evolution time T={T}"
        )
    bounds = np.concatenate(([0.0], np.minimum(centers, T), [T]))
    signs = (-1.0) ** np.arange(bounds.size - 1)
    return bounds, signs


def phase_slope_amplitude(drive: DriveParams, schedule: PulseSchedule, T: float) -> float:
    """d(phi)/dA = integral_0^T f(t) sin(omega*t + theta) dt, exact per segment.

    With node pulses and theta = 0 this grows as 2*T/pi at integer
    half-periods; uncontrolled it stays bounded by 2/omega.
    """
    _check_horizon(T)
    bounds, signs = _segments(schedule, T)
    w, th = drive.omega, drive.theta
    anti = -np.cos(w * bounds + th) / w
    return float(np.sum(signs * np.diff(anti)))


def accumulated_phase(drive: DriveParams, schedule: PulseSchedule, T: float) -> float:
    """Accumulated relative phase A * integral_0^T f(t) sin(omega*t + theta) dt.

    Closed form per segment (instantaneous-pulse idealization).  This is the
    phase of the |1> amplitude relative to |0> after evolving an equal
    superposition, for an even number of pulses.
    """
    return drive.amplitude_A * phase_slope_amplitude(drive, schedule, T)


def phase_slope_frequency(drive: DriveParams, schedule: PulseSchedule, T: float) -> float:
    """d(phi)/d(omega) = A * integral_0^T f(t) t cos(omega*t + theta) dt.

    Exact piecewise-analytic value.  For the antinode schedule with theta = 0
    this equals A*T**2/pi exactly whenever T is an integer number of
    half-periods of the drive.
    """
    _check_horizon(T)
    bounds, signs = _segments(schedule, T)
    w, th = drive.omega, drive.theta
    anti = bounds * np.sin(w * bounds + th) / w + np.cos(w * bounds + th) / w**2
    return drive.amplitude_A * float(np.sum(signs * np.diff(anti)))


def phases_vs_omega(
    amplitude_A: float,
    theta: float,
    schedule: PulseSchedule,
    T: float,
    omegas: np.ndarray,
) -> np.ndarray:
    """Accumulated phase for many signal frequencies over one fixed schedule.

    Vectorized version of accumulated_phase used by slope fits and sweeps:
    the pulse pattern stays fixed (it was built for some working frequency)
    while the signal frequency varies across `omegas`.
    """
    _check_horizon(T)
    bounds, signs = _segments(schedule, T)
    w = np.asarray(omegas, dtype=float)[:, None]
    anti = -np.cos(w * bounds[None, :] + theta) / w
    return amplitude_A * np.sum(signs * np.diff(anti, axis=1), axis=1)


def _pulse_unitary(axis: PulseAxis) -> np.ndarray:
    """Exact pi rotation exp(-i*pi*sigma_axis/2)."""
    return -1j * (SIGMA_Y if axis is PulseAxis.Y else SIGMA_X)


def _free_step(drive: DriveParams, a: float, b: float) -> np.ndarray:
    """Exact sigma_z step over [a, b]: diag phase from the closed-form integral."""
    w, th = drive.omega, drive.theta
    dphi = drive.amplitude_A * (math.cos(w * a + th) - math.cos(w * b + th)) / w
    half = np.exp(-0.5j * dphi)
    return np.array([[half, 0.0], [0.0, np.conj(half)]], dtype=complex)


def _driven_step(drive: DriveParams, rabi: float, axis: PulseAxis, a: float, b: float) -> np.ndarray:
    """Midpoint-frozen exp(-i*dt*(az*sigma_z + rabi*sigma_axis)/2) over [a, b]."""
    dt = b - a
    t_mid = 0.5 * (a + b)
    az = drive.amplitude_A * math.sin(drive.omega * t_mid + drive.theta)
    h = math.hypot(az, rabi)
    if h * dt == 0.0:
        return IDENTITY.copy()
    half = 0.5 * h * dt
    sig = SIGMA_Y if axis is PulseAxis.Y else SIGMA_X
    return math.cos(half) * IDENTITY - 1j * (math.sin(half) / h) * (
        az * SIGMA_Z + rabi * sig
    )


def propagate_unitary(
    drive: DriveParams, schedule: PulseSchedule, T: float, step: float = 1e-3
) -> Unitary2:
    """Time-ordered propagator over [0, T] including the control pulses.

    With instantaneous pulses the off-pulse steps are exact (diagonal phase
    from the closed-form integral) and each pulse applies an exact pi
    rotation, so the result is independent of `step` up to float roundoff.
    With finite-duration pulses the pulse windows are integrated with
    midpoint-frozen matrix exponentials and `step` must resolve them
    (step <= pulse_duration/10).

    Serves as a numeric cross-check oracle for the closed-form phase and
    slope integrals.
    """
    _check_horizon(T)
    if not step > 0.0:
        raise ValueError(f"step must be > 0, got {step}")
    centers = np.asarray(schedule.pulse_centers, dtype=float)
    if centers.size and centers[-1] > T * (1.0 + _EDGE_RTOL):
        raise ValueError("pulse center lies beyond the evolution time")

    d = schedule.pulse_duration
    if d > 0.0:
        if step > d / 10.0:
            raise ValueError("step must be <= pulse_duration/10 for finite pulses")
        if centers.size and (centers[0] - d / 2 < 0.0 or centers[-1] + d / 2 > T):
            raise ValueError("finite-duration pulse extends beyond [0, T]")

    U = IDENTITY.copy()

    def advance_free(a: float, b: float) -> None:
        nonlocal U
        if b <= a:
            return
        n = max(1, math.ceil((b - a) / step))
        edges = np.linspace(a, b, n + 1)
        for lo, hi in zip(edges[:-1], edges[1:]):
            U = _free_step(drive, lo, hi) @ U

    t = 0.0
    for c in centers:
        if d == 0.0:
            advance_free(t, min(c, T))
            U = _pulse_unitary(schedule.pulse_axis) @ U
            t = min(c, T)
        else:
            advance_free(t, c - d / 2)
            n = max(10, math.ceil(d / step))
            edges = np.linspace(c - d / 2, c + d / 2, n + 1)
            for lo, hi in zip(edges[:-1], edges[1:]):
                U = _driven_step(drive, schedule.rabi_amplitude, schedule.pulse_axis, lo, hi) @ U
            t = c + d / 2
    advance_free(t, T)
    return Unitary2(U)
