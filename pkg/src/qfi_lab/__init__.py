"""qfi-lab: desk-scale simulation of pi-pulse-controlled frequency estimation.

A two-level system under a sinusoidally modulated sigma_z Hamiltonian
accumulates phase at a rate set by the modulation; pi pulses placed at the
antinodes rectify the phase-slope integral so the extractable information
grows as T^4 instead of the uncontrolled T^2.  This package provides the
closed-form dynamics, Fisher-information estimators, measurement protocols
with projection noise and decoherence, the control-mismatch landscape, and
the adaptive square-root-of-information schedule, plus a CLI that emits the
corresponding data files.
"""

from .dynamics import (
    DriveParams,
    PulseAxis,
    PulseSchedule,
    PureState,
    SignFunction,
    Unitary2,
    accumulated_phase,
    antinode_schedule,
    node_schedule,
    phase_slope_amplitude,
    phase_slope_frequency,
    propagate_unitary,
)
from .fisher import (
    QfiMethod,
    QfiResult,
    StepSizeError,
    cfi_binary,
    cramer_rao,
    qfi_bures,
    qfi_freq_mismatch,
    qfi_generator,
    qfi_phase_mismatch,
    qfi_state_derivative,
    small_mismatch_reduction,
)
from .noise import (
    DensityMatrix,
    MeasurementRecord,
    NoiseParams,
    cfi_vs_time_with_decoherence,
    decoherence_envelope,
    estimate_phase,
    evolve_density,
    sample_outcomes,
    spawn_rng,
)
from .protocols import (
    ProtocolKind,
    ProtocolSpec,
    SensitivityPoint,
    build_schedule,
    envelope_times,
    excitation_probability,
    parameter_grid,
    protocol_phase,
    protocol_slope,
    rabi_probability,
    rabi_qfi,
    rabi_slope,
    sensitivity_limits,
    slope_fit_qfi,
    state_map,
)
from .adaptive import (
    AdaptiveRound,
    AdaptiveTrajectory,
    LandscapeGrid,
    adaptive_loop,
    iteration_info,
    landscape_sweep,
    log_iteration_info,
    mismatched_schedule,
    predicted_rounds,
    total_info_bounds,
)
from .regression import RegressionResult, linear_regression

__version__ = "0.1.0"

__all__ = [
    "AdaptiveRound",
    "AdaptiveTrajectory",
    "DensityMatrix",
    "DriveParams",
    "LandscapeGrid",
    "MeasurementRecord",
    "NoiseParams",
    "ProtocolKind",
    "ProtocolSpec",
    "PulseAxis",
    "PulseSchedule",
    "PureState",
    "QfiMethod",
    "QfiResult",
    "RegressionResult",
    "SensitivityPoint",
    "SignFunction",
    "StepSizeError",
    "Unitary2",
    "accumulated_phase",
    "adaptive_loop",
    "antinode_schedule",
    "build_schedule",
    "cfi_binary",
    "cfi_vs_time_with_decoherence",
    "cramer_rao",
    "decoherence_envelope",
    "envelope_times",
    "estimate_phase",
    "evolve_density",
    "excitation_probability",
    "iteration_info",
    "landscape_sweep",
    "linear_regression",
    "log_iteration_info",
    "mismatched_schedule",
    "node_schedule",
    "parameter_grid",
    "phase_slope_amplitude",
    "phase_slope_frequency",
    "predicted_rounds",
    "propagate_unitary",
    "protocol_phase",
    "protocol_slope",
    "qfi_bures",
    "qfi_freq_mismatch",
    "qfi_generator",
    "qfi_phase_mismatch",
    "qfi_state_derivative",
    "rabi_probability",
    "rabi_qfi",
    "rabi_slope",
    "sample_outcomes",
    "sensitivity_limits",
    "slope_fit_qfi",
    "small_mismatch_reduction",
    "spawn_rng",
    "state_map",
    "total_info_bounds",
]
