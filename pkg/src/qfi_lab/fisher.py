"""Quantum and classical Fisher information by several independent routes.

For the pure states produced by sigma_z-phase protocols the quantum Fisher
information about the drive frequency equals the squared phase slope
(d phi/d omega)**2, which the generator route evaluates in closed form.  The
state-derivative and Bures routes recompute the same quantity from finite
differences of the states themselves and act as cross-method oracles.
Closed-form mismatch formulas quantify how the controlled information
degrades when the pulse pattern is built from an imperfect frequency or
phase estimate.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from enum import Enum
from typing import Callable

import numpy as np

from .dynamics import DriveParams, PulseSchedule, PureState, phase_slope_frequency


class QfiMethod(Enum):
    GENERATOR = "generator"
    STATE_DERIVATIVE = "state_derivative"
    BURES = "bures"
    SLOPE_FIT = "slope_fit"
    CLOSED_FORM = "closed_form"


class StepSizeError(ValueError):
    """Finite-difference step too large (or inconsistent) for a reliable QFI."""


@dataclass(frozen=True)
class QfiResult:
    """Fisher information value in us^2 (i.e. (rad/us)**-2) plus its method."""

    value: float
    method: QfiMethod

    def __post_init__(self):
        if not self.value >= 0.0:
            raise ValueError(f"Fisher information must be >= 0, got {self.value}")


def qfi_generator(drive: DriveParams, schedule: PulseSchedule, T: float) -> QfiResult:
    """QFI from the eigenvalue-separation integral: (d phi/d omega)**2.

    With antinode pulses, theta = 0 and T an integer number of drive periods
    this equals A**2 T**4 / pi**2 exactly; uncontrolled over a full period it
    vanishes.
    """
    slope = phase_slope_frequency(drive, schedule, T)
    return QfiResult(slope * slope, QfiMethod.GENERATOR)


def qfi_state_derivative(
    state_map: Callable[[float], PureState],
    omega: float,
    domega: float | None = None,
    check: bool = True,
) -> QfiResult:
    """Pure-state QFI 4*(<dpsi|dpsi> - |<psi|dpsi>|^2) by central differences.

    `state_map` must return states with a smoothly varying global phase.
    The default step is 1e-5*omega.  With check=True the computation is
    repeated at half the step and the two must agree to 1e-4 relative
    (a Richardson-style consistency guard); the half-step value is returned.
    Raises StepSizeError when neighbouring states overlap below 0.99 or the
    consistency guard fails.
    """
    if domega is None:
        domega = 1e-5 * omega
    if domega == 0.0:
        raise StepSizeError("domega must be nonzero")

    value = _qfi_central_difference(state_map, omega, domega)
    if check:
        finer = _qfi_central_difference(state_map, omega, domega / 2.0)
        scale = max(abs(finer), abs(value), 1e-30)
        if abs(value) > 1e-30 and abs(value - finer) > 1e-4 * scale:
            raise StepSizeError(
                f"finite-difference QFI not converged: {value!r} vs {finer!r} "
                "at half step"
            )
        value = finer
    return QfiResult(max(value, 0.0), QfiMethod.STATE_DERIVATIVE)


def _qfi_central_difference(state_map, omega, domega) -> float:
    psi0 = state_map(omega)
    psi_p = state_map(omega + domega)
    psi_m = state_map(omega - domega)
    for psi in (psi_p, psi_m):
        if abs(psi0.overlap(psi)) <= 0.99:
            raise StepSizeError(
                "neighbouring states overlap below 0.99; reduce domega"
            )
    dpsi = (psi_p.vector() - psi_m.vector()) / (2.0 * domega)
    v0 = psi0.vector()
    grad2 = float(np.real(np.vdot(dpsi, dpsi)))
    proj = complex(np.vdot(v0, dpsi))
    return 4.0 * (grad2 - abs(proj) ** 2)


def qfi_bures(psi_a: PureState, psi_b: PureState, domega: float) -> QfiResult:
    """QFI from the Bures distance: 8*(1 - |<psi_a|psi_b>|)/domega**2.

    psi_a and psi_b should be the states at frequencies domega apart (for a
    centered estimate, at omega -+ domega/2 with separation domega).
    """
    if domega == 0.0:
        raise ValueError("domega must be nonzero")
    overlap = abs(psi_a.overlap(psi_b))
    return QfiResult(8.0 * (1.0 - overlap) / domega**2, QfiMethod.BURES)


def cfi_binary(P: float, dP_domega: float) -> float:
    """Classical Fisher information of a two-outcome measurement.

    (dP/d omega)**2 / (P*(1-P)).  P exactly 0 or 1 makes the information
    undefined (divergent) and is rejected.
    """
    if not 0.0 < P < 1.0:
        raise ValueError(f"binary-outcome CFI requires 0 < P < 1, got P={P}")
    return dP_domega**2 / (P * (1.0 - P))


def cramer_rao(information: float, repetitions: int = 1) -> float:
    """Variance lower bound 1/(v*I) for v repetitions at Fisher information I."""
    if not information > 0.0:
        raise ValueError(f"Fisher information must be > 0, got {information}")
    if repetitions < 1:
        raise ValueError(f"repetitions must be >= 1, got {repetitions}")
    return 1.0 / (repetitions * information)


def qfi_freq_mismatch(amplitude_A: float, T: float, delta_omega: float) -> float:
    """Leading-order controlled QFI with a control-frequency mismatch.

    A**2 T**4/pi**2 * (1 - delta_omega**2 T**2 / 2).  Valid for
    |delta_omega|*T at most of order 1; when the truncated expansion goes
    negative the value is clamped to 0 and a warning is emitted.
    """
    ideal = (amplitude_A * T * T / math.pi) ** 2
    correction = 1.0 - 0.5 * (delta_omega * T) ** 2
    if correction < 0.0:
        warnings.warn(
            "frequency-mismatch expansion left its validity range "
            f"(|delta_omega|*T = {abs(delta_omega) * T:.3g}); clamping QFI to 0",
            stacklevel=2,
        )
        return 0.0
    return ideal * correction


def qfi_phase_mismatch(
    amplitude_A: float,
    omega: float,
    N_half: int,
    delta_theta: float,
    delta_phi: float = 0.0,
) -> float:
    """Controlled QFI of an N_half-pulse sequence with a control-phase mismatch.

    Evaluates
        [pi*N^2*A*cos(dtheta)/omega^2
         + 2*N*(dphi*cos(dtheta) - sin(dtheta))/omega^2]**2
    with N = N_half interpreted as the number of pi pulses (the sequence
    spans N half-periods, T = N*pi/omega), which is the reading that reduces
    to (A*T**2/pi)**2 at zero mismatch.  `delta_phi` is an experimental
    residual-phase knob and defaults to 0.
    """
    if N_half < 1:
        raise ValueError(f"N_half must be >= 1, got {N_half}")
    n = float(N_half)
    bracket = (
        math.pi * n * n * amplitude_A * math.cos(delta_theta)
        + 2.0 * n * (delta_phi * math.cos(delta_theta) - math.sin(delta_theta))
    ) / omega**2
    return bracket * bracket


def small_mismatch_reduction(delta_theta: float) -> float:
    """Small-angle QFI reduction factor (1 - delta_theta**2) for large N."""
    return 1.0 - delta_theta**2
