"""Experiment configuration and runners behind the command-line driver.

Each runner is a pure function of an ExperimentConfig and returns a tabular
result; the CLI serializes it.  Identical config (including seed) always
produces identical numbers, independent of worker count, so emitted files
are byte-reproducible.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from .adaptive import adaptive_loop, landscape_sweep
from .dynamics import DriveParams, PulseSchedule, antinode_schedule, node_schedule
from .fisher import qfi_generator
from .noise import NoiseParams, decoherence_envelope, estimate_phase, sample_outcomes
from .protocols import (
    ProtocolKind,
    ProtocolSpec,
    envelope_times,
    parameter_grid,
    protocol_phase,
    protocol_slope,
    rabi_qfi,
    slope_fit_qfi,
)

TWO_PI = 2.0 * math.pi

SEED_ENV_VAR = "QFI_LAB_SEED"

PROTOCOL_NAMES = {
    "optimal": ProtocolKind.FREQUENCY_OPTIMAL,
    "uncontrolled": ProtocolKind.RAMSEY_UNCONTROLLED,
    "amplitude": ProtocolKind.AMPLITUDE_OPTIMAL,
    "rabi": ProtocolKind.RABI,
}


class ConfigError(ValueError):
    """Invalid experiment configuration; carries the offending key."""

    def __init__(self, key: str, message: str):
        super().__init__(message)
        self.key = key


def default_seed() -> int:
    raw = os.environ.get(SEED_ENV_VAR)
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError as exc:
        raise ConfigError("seed", f"{SEED_ENV_VAR} must be an integer, got {raw!r}") from exc


@dataclass
class ExperimentConfig:
    """Flat bag of experiment parameters; flags and JSON keys mirror fields.

    Defaults follow the hardware-motivated values: A/2pi = 0.60 MHz,
    T1 = 14 us, T2* = 4 us, 80% readout contrast, N = 10^4 shots per grid
    point and 101 grid points.
    """

    protocol: str = "optimal"
    amplitude_A: float = TWO_PI * 0.6
    omega: float = TWO_PI
    theta: float = 0.0
    T: float = 1.0
    T_grid: list[float] | None = None
    N: int = 10_000
    span: float | None = None
    grid_points: int | None = None
    reps: int = 101
    N_list: list[int] = field(default_factory=lambda: [100, 1000, 10_000, 100_000])
    seed: int = field(default_factory=default_seed)
    T1: float = 14.0
    T2_star: float = 4.0
    contrast: float = 0.8
    envelope: str = "exponential"
    no_noise: bool = False
    noiseless: bool = False
    freq_lo: float = 0.8
    freq_hi: float = 1.2
    freq_points: int = 41
    phase_lo: float = -math.pi / 2.0
    phase_hi: float = math.pi / 2.0
    phase_points: int = 41
    time_offset: float = 0.0
    N_per_point: int = 100
    N_per_round: int = 100
    rounds: int | None = None
    T_budget: float | None = None
    initial_T: float = 2.0
    omega_guess: float | None = None
    exact: bool = False
    workers: int = 1
    out: str | None = None
    format: str = "csv"

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        for key in data:
            if key not in known:
                raise ConfigError(key, f"unknown configuration key: {key!r}")
        return cls(**data)

    def merged(self, overrides: dict) -> "ExperimentConfig":
        """New config with non-None override values applied on top."""
        data = asdict(self)
        data.update({k: v for k, v in overrides.items() if v is not None})
        return ExperimentConfig.from_dict(data)

    def validate(self) -> None:
        if self.protocol not in PROTOCOL_NAMES:
            raise ConfigError(
                "protocol",
                f"protocol must be one of {sorted(PROTOCOL_NAMES)}, got {self.protocol!r}",
            )
        if self.format not in ("csv", "json"):
            raise ConfigError("format", f"format must be csv or json, got {self.format!r}")
        for key, lower in (("N", 1), ("reps", 2), ("N_per_point", 1),
                           ("N_per_round", 1), ("workers", 1)):
            if getattr(self, key) < lower:
                raise ConfigError(key, f"{key} must be >= {lower}")
        for key in ("freq_points", "phase_points"):
            if getattr(self, key) < 2:
                raise ConfigError(key, f"{key} must be >= 2")
        if self.grid_points is not None and self.grid_points < 3:
            raise ConfigError("grid_points", "grid_points must be >= 3")
        if not self.freq_lo < self.freq_hi:
            raise ConfigError("freq_lo", "freq_lo must be below freq_hi")
        if not self.phase_lo < self.phase_hi:
            raise ConfigError("phase_lo", "phase_lo must be below phase_hi")
        if any(n < 1 for n in self.N_list):
            raise ConfigError("N_list", "N_list entries must be >= 1")
        if self.T_grid is not None and any(t <= 0.0 for t in self.T_grid):
            raise ConfigError("T_grid", "T_grid entries must be > 0")
        # Re-run the domain-type invariants on the referenced parameters.
        try:
            self.drive()
        except ValueError as exc:
            raise ConfigError("omega", str(exc)) from exc
        try:
            self.noise()
        except ValueError as exc:
            raise ConfigError("T2_star", str(exc)) from exc
        if not self.T > 0.0:
            raise ConfigError("T", f"T must be > 0, got {self.T}")

    def drive(self) -> DriveParams:
        return DriveParams(self.amplitude_A, self.omega, self.theta)

    def noise(self) -> NoiseParams | None:
        if self.no_noise:
            return None
        return NoiseParams(self.T1, self.T2_star, self.contrast, self.envelope)

    def kind(self) -> ProtocolKind:
        return PROTOCOL_NAMES[self.protocol]

    def hash(self) -> str:
        """Short digest of the experiment parameters.

        Output path, format and worker count are excluded: they must never
        change the computed numbers.
        """
        data = asdict(self)
        for key in ("out", "format", "workers"):
            data.pop(key)
        canon = json.dumps(data, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canon.encode()).hexdigest()[:12]


@dataclass(frozen=True)
class TableResult:
    """Tabular experiment output plus a one-line summary."""

    name: str
    columns: tuple[str, ...]
    rows: list[tuple]
    units: str
    summary: str


def run_qfi(cfg: ExperimentConfig) -> TableResult:
    """Single-point information value for the configured protocol."""
    drive = cfg.drive()
    kind = cfg.kind()
    if kind is ProtocolKind.RABI:
        value = rabi_qfi(drive.amplitude_A, cfg.T)
    elif kind is ProtocolKind.AMPLITUDE_OPTIMAL:
        value = protocol_slope(ProtocolSpec(kind, drive, cfg.T)) ** 2
    else:
        sched = (
            antinode_schedule(drive, cfg.T)
            if kind is ProtocolKind.FREQUENCY_OPTIMAL
            else PulseSchedule(())
        )
        value = qfi_generator(drive, sched, cfg.T).value
    return TableResult(
        name="qfi",
        columns=("protocol", "T", "qfi"),
        rows=[(cfg.protocol, cfg.T, value)],
        units="T [us]; qfi [us^2]",
        summary=f"qfi = {value:.6g} us^2 (protocol={cfg.protocol}, T={cfg.T:g} us)",
    )


def _default_T_grid(cfg: ExperimentConfig, drive: DriveParams) -> list[float]:
    kind = cfg.kind()
    if kind is ProtocolKind.RAMSEY_UNCONTROLLED:
        return [float(t) for t in envelope_times(drive, count=16)]
    # integer periods 1..8 for the controlled and Rabi sweeps
    return [float(m * drive.period) for m in range(1, 9)]


def run_sweep_sensitivity(cfg: ExperimentConfig) -> TableResult:
    """Sensitivity-versus-time sweep (slope fit per interrogation time)."""
    drive = cfg.drive()
    noise = cfg.noise()
    kind = cfg.kind()
    t_values = cfg.T_grid if cfg.T_grid is not None else _default_T_grid(cfg, drive)
    rows = []
    for ti, T in enumerate(t_values):
        spec = ProtocolSpec(kind, drive, float(T), noise=noise)
        grid = parameter_grid(spec, noiseless=cfg.noiseless, span=cfg.span,
                              points=cfg.grid_points)
        point = slope_fit_qfi(
            spec, grid, cfg.N, seed=cfg.seed, noiseless=cfg.noiseless, seed_key=(ti,)
        )
        rows.append(
            (float(T), point.slope, point.slope_stderr, point.sensitivity,
             point.qfi.value, cfg.protocol)
        )
    return TableResult(
        name="sweep-sensitivity",
        columns=("T", "slope", "slope_stderr", "sensitivity", "qfi", "protocol"),
        rows=rows,
        units="T [us]; slope [rad/(rad/us)]; sensitivity [(rad/us)/rad]; qfi [us^2]",
        summary=f"sweep-sensitivity: {len(rows)} points, protocol={cfg.protocol}",
    )


def run_phase_noise(cfg: ExperimentConfig) -> TableResult:
    """Phase-estimate scatter versus repetition number (projection noise)."""
    drive = cfg.drive()
    noise = cfg.noise()
    spec = ProtocolSpec(cfg.kind(), drive, cfg.T, noise=noise)
    phi = protocol_phase(spec)
    contrast = noise.contrast_C if noise else 1.0
    cv = contrast * decoherence_envelope(cfg.T, noise)
    p_sin = 0.5 * (1.0 - cv * math.sin(phi))
    p_cos = 0.5 * (1.0 - cv * math.cos(phi))
    rows = []
    for i, N in enumerate(cfg.N_list):
        estimates = np.empty(cfg.reps)
        n_sin = N // 2
        n_cos = N - n_sin
        for rep in range(cfg.reps):
            rec_sin = sample_outcomes(p_sin, max(n_sin, 1), cfg.seed, i, rep, 0)
            rec_cos = sample_outcomes(p_cos, max(n_cos, 1), cfg.seed, i, rep, 1)
            estimates[rep], _ = estimate_phase(rec_sin, rec_cos)
        rows.append((int(N), float(np.std(estimates, ddof=1))))
    return TableResult(
        name="phase-noise",
        columns=("N", "stddev_phase"),
        rows=rows,
        units="N [repetitions]; stddev_phase [rad]",
        summary=f"phase-noise: {len(rows)} repetition counts, {cfg.reps} trials each",
    )


def run_sweep_landscape(cfg: ExperimentConfig) -> TableResult:
    """Control-landscape sweep over (control frequency, control phase)."""
    drive = cfg.drive()
    freqs = drive.omega * np.linspace(cfg.freq_lo, cfg.freq_hi, cfg.freq_points)
    phases = np.linspace(cfg.phase_lo, cfg.phase_hi, cfg.phase_points)
    grid = landscape_sweep(
        drive,
        T=cfg.T,
        control_freqs=freqs,
        control_phases=phases,
        N_per_point=cfg.N_per_point,
        seed=cfg.seed,
        noiseless=cfg.noiseless,
        time_offset=cfg.time_offset,
        workers=cfg.workers,
    )
    rows = []
    for i, wc in enumerate(grid.control_freq_axis):
        for j, dth in enumerate(grid.control_phase_axis):
            rows.append((float(wc), float(dth), float(grid.qfi[i, j])))
    peak_w, peak_th = grid.argmax_cell()
    return TableResult(
        name="sweep-landscape",
        columns=("omega_c", "delta_theta", "qfi"),
        rows=rows,
        units="omega_c [rad/us]; delta_theta [rad]; qfi [us^2]",
        summary=(
            f"sweep-landscape: {len(rows)} cells at T={cfg.T:g} us, "
            f"argmax at omega_c={peak_w:.6g}, delta_theta={peak_th:.6g}"
        ),
    )


def run_adapt(cfg: ExperimentConfig) -> TableResult:
    """Adaptive square-root-of-information schedule."""
    if cfg.rounds is None and cfg.T_budget is None:
        raise ConfigError("rounds", "adapt needs rounds and/or T_budget")
    traj = adaptive_loop(
        cfg.drive(),
        N_per_round=cfg.N_per_round,
        n_rounds=cfg.rounds,
        T_budget=cfg.T_budget,
        initial_T=cfg.initial_T,
        omega_guess=cfg.omega_guess,
        seed=cfg.seed,
        noise=cfg.noise(),
        exact=cfg.exact,
    )
    rows = [
        (r.n, r.T_n, r.I_n, r.omega_estimate, r.delta_omega)
        for r in traj.iterations
    ]
    return TableResult(
        name="adapt",
        columns=("n", "T_n", "I_n", "omega_est", "delta_omega"),
        rows=rows,
        units="T_n [us]; I_n [us^2]; omega_est, delta_omega [rad/us]",
        summary=(
            f"adapt: {len(rows) - 1} controlled rounds, final I = "
            f"{traj.iterations[-1].I_n:.6g} us^2, final |delta_omega| = "
            f"{abs(traj.iterations[-1].delta_omega):.3g} rad/us"
        ),
    )


def run_compare_rabi(cfg: ExperimentConfig) -> TableResult:
    """Side-of-fringe Rabi information versus antinode-controlled information."""
    drive = cfg.drive()
    t_values = cfg.T_grid if cfg.T_grid is not None else [
        float(m * drive.period) for m in range(1, 11)
    ]
    rows = []
    for T in t_values:
        q_rabi = rabi_qfi(drive.amplitude_A, float(T))
        q_ctrl = qfi_generator(drive, antinode_schedule(drive, float(T)), float(T)).value
        rows.append((float(T), q_rabi, q_ctrl, q_ctrl / q_rabi))
    return TableResult(
        name="compare-rabi",
        columns=("T", "qfi_rabi", "qfi_controlled", "ratio"),
        rows=rows,
        units="T [us]; qfi [us^2]; ratio [1]",
        summary=f"compare-rabi: {len(rows)} times, controlled/rabi ratio "
                f"{rows[0][3]:.3g} at T={rows[0][0]:g} to {rows[-1][3]:.3g} at T={rows[-1][0]:g}",
    )


def run_amplitude(cfg: ExperimentConfig) -> TableResult:
    """Amplitude-estimation sweep: node pulses versus no control."""
    drive = cfg.drive()
    noise = cfg.noise()
    t_values = cfg.T_grid if cfg.T_grid is not None else [
        0.5 * drive.period * (2 * k + 1) for k in range(0, 10)
    ]
    rows = []
    for ti, T in enumerate(t_values):
        for pi_, (label, override) in enumerate(
            (("amplitude-node", None), ("amplitude-uncontrolled", PulseSchedule(())))
        ):
            spec = ProtocolSpec(
                ProtocolKind.AMPLITUDE_OPTIMAL, drive, float(T), noise=noise,
                schedule_override=override,
            )
            if cfg.noiseless:
                slope = protocol_slope(spec)
                point_slope, stderr = slope, 0.0
            else:
                grid = parameter_grid(spec, span=cfg.span, points=cfg.grid_points)
                point = slope_fit_qfi(
                    spec, grid, cfg.N, seed=cfg.seed, seed_key=(ti, pi_)
                )
                point_slope, stderr = point.slope, point.slope_stderr
            sens = math.inf if point_slope == 0.0 else 1.0 / abs(point_slope)
            rows.append(
                (float(T), point_slope, stderr, sens, point_slope**2, label)
            )
    return TableResult(
        name="amplitude",
        columns=("T", "slope", "slope_stderr", "sensitivity", "qfi", "protocol"),
        rows=rows,
        units="T [us]; slope [d(phi)/dA, us]; sensitivity [(rad/us)/rad]; qfi [us^2]",
        summary=f"amplitude: {len(rows)} rows over {len(t_values)} times",
    )


RUNNERS = {
    "qfi": run_qfi,
    "sweep-sensitivity": run_sweep_sensitivity,
    "phase-noise": run_phase_noise,
    "sweep-landscape": run_sweep_landscape,
    "adapt": run_adapt,
    "compare-rabi": run_compare_rabi,
    "amplitude": run_amplitude,
}
