"""Command-line driver: `qfi-lab <experiment> [flags]`.

Every experiment prints a one-line summary and can write its table to CSV or
JSON.  Files are written atomically and serialize floats at full round-trip
precision; the same config and seed always produce byte-identical artifacts,
whatever the worker count.  Config precedence: built-in defaults < JSON
config file (--config) < command-line flags.  Exit codes: 0 ok, 1 runtime
error, 2 configuration error (both error paths emit a JSON object on
stderr).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile

from .experiments import RUNNERS, ConfigError, ExperimentConfig, TableResult


def _fmt(value) -> str:
    if isinstance(value, bool):
        return str(value)
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return format(value, ".17e")
    return str(value)


def write_csv(path: str, result: TableResult, cfg: ExperimentConfig) -> None:
    lines = [
        f"# qfi-lab {result.name}",
        f"# units: {result.units}",
        f"# config: {cfg.hash()}",
        ",".join(result.columns),
    ]
    for row in result.rows:
        lines.append(",".join(_fmt(v) for v in row))
    _atomic_write(path, "\n".join(lines) + "\n")


def write_json(path: str, result: TableResult, cfg: ExperimentConfig) -> None:
    payload = {
        "experiment": result.name,
        "config": cfg.hash(),
        "units": result.units,
        "columns": list(result.columns),
        "rows": [list(row) for row in result.rows],
    }
    _atomic_write(path, json.dumps(payload, indent=1) + "\n")


def _atomic_write(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".qfi-lab-")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _comma_floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated floats: {text!r}") from exc


def _comma_ints(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated ints: {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qfi-lab",
        description="Simulated frequency estimation of a modulated two-level "
        "system with optimal pi-pulse control.",
    )
    sub = parser.add_subparsers(dest="experiment", required=True)

    def common(p: argparse.ArgumentParser, protocols=True) -> None:
        p.add_argument("--config", help="JSON config file with flat keys mirroring the flags")
        p.add_argument("--A", dest="amplitude_A", type=float,
                       help="drive amplitude in rad/us (default 2*pi*0.6)")
        p.add_argument("--omega", type=float, help="drive angular frequency in rad/us (default 2*pi)")
        p.add_argument("--theta", type=float, help="drive phase in rad (default 0)")
        p.add_argument("--seed", type=int,
                       help="master seed (default: $QFI_LAB_SEED or 0)")
        p.add_argument("--T1", dest="T1", type=float, help="relaxation time in us (default 14)")
        p.add_argument("--T2-star", dest="T2_star", type=float, help="dephasing time in us (default 4)")
        p.add_argument("--contrast", type=float, help="readout contrast in [0,1] (default 0.8)")
        p.add_argument("--envelope", choices=("exponential", "gaussian"),
                       help="dephasing envelope shape (default exponential)")
        p.add_argument("--no-noise", dest="no_noise", action="store_const", const=True,
                       help="disable decoherence and contrast loss")
        p.add_argument("--out", help="output file path (prints summary only if omitted)")
        p.add_argument("--format", choices=("csv", "json"), help="output format (default csv)")
        if protocols:
            p.add_argument("--protocol", choices=("optimal", "uncontrolled", "amplitude", "rabi"),
                           help="protocol kind (default optimal)")

    p = sub.add_parser("qfi", help="information value of one protocol at one time")
    common(p)
    p.add_argument("--T", type=float, help="interrogation time in us (default 1)")

    p = sub.add_parser("sweep-sensitivity", help="slope-fit sensitivity versus interrogation time")
    common(p)
    p.add_argument("--T-grid", dest="T_grid", type=_comma_floats,
                   help="comma-separated interrogation times in us")
    p.add_argument("--N", type=int, help="shots per grid point (default 10000)")
    p.add_argument("--span", type=float, help="half-width of the fit grid as a fraction")
    p.add_argument("--grid-points", dest="grid_points", type=int, help="fit grid size (default 101)")
    p.add_argument("--noiseless", action="store_const", const=True,
                   help="fit exact phases instead of sampled ones")

    p = sub.add_parser("phase-noise", help="phase-estimate scatter versus repetition number")
    common(p)
    p.add_argument("--T", type=float, help="interrogation time in us (default 1)")
    p.add_argument("--N-list", dest="N_list", type=_comma_ints,
                   help="comma-separated repetition counts (default 100,1000,10000,100000)")
    p.add_argument("--reps", type=int, help="trials per repetition count (default 101)")

    p = sub.add_parser("sweep-landscape", help="information versus control frequency and phase")
    common(p, protocols=False)
    p.add_argument("--T", type=float, help="interrogation time in us (default 1, figure value 1.25)")
    p.add_argument("--freq-lo", dest="freq_lo", type=float, help="lowest omega_c/omega (default 0.8)")
    p.add_argument("--freq-hi", dest="freq_hi", type=float, help="highest omega_c/omega (default 1.2)")
    p.add_argument("--freq-points", dest="freq_points", type=int, help="frequency cells (default 41)")
    p.add_argument("--phase-lo", dest="phase_lo", type=float, help="lowest delta_theta (default -pi/2)")
    p.add_argument("--phase-hi", dest="phase_hi", type=float, help="highest delta_theta (default pi/2)")
    p.add_argument("--phase-points", dest="phase_points", type=int, help="phase cells (default 41)")
    p.add_argument("--N-per-point", dest="N_per_point", type=int,
                   help="shots per fit point in each cell (default 100)")
    p.add_argument("--time-offset", dest="time_offset", type=float,
                   help="constant pulse delay in us (default 0)")
    p.add_argument("--noiseless", action="store_const", const=True,
                   help="analytic cell values instead of sampled fits")
    p.add_argument("--workers", type=int, help="parallel workers; never changes the output bytes")

    p = sub.add_parser("adapt", help="iterative adaptive frequency estimation")
    common(p, protocols=False)
    p.add_argument("--rounds", type=int, help="number of controlled rounds")
    p.add_argument("--T-budget", dest="T_budget", type=float,
                   help="stop once the interrogation time reaches this many us")
    p.add_argument("--initial-T", dest="initial_T", type=float,
                   help="crude-round interrogation time in us (default 2)")
    p.add_argument("--N-per-round", dest="N_per_round", type=int,
                   help="measurements per round (default 100)")
    p.add_argument("--omega-guess", dest="omega_guess", type=float,
                   help="prior frequency estimate in rad/us (default: true value)")
    p.add_argument("--exact", action="store_const", const=True,
                   help="exact estimator (reproduces the closed-form schedule)")

    p = sub.add_parser("compare-rabi", help="Rabi-spectroscopy information versus pulse control")
    common(p, protocols=False)
    p.add_argument("--T-grid", dest="T_grid", type=_comma_floats,
                   help="comma-separated interrogation times in us")

    p = sub.add_parser("amplitude", help="amplitude estimation: node pulses versus no control")
    common(p, protocols=False)
    p.add_argument("--T-grid", dest="T_grid", type=_comma_floats,
                   help="comma-separated interrogation times in us")
    p.add_argument("--N", type=int, help="shots per grid point (default 10000)")
    p.add_argument("--span", type=float, help="half-width of the fit grid as a fraction")
    p.add_argument("--grid-points", dest="grid_points", type=int, help="fit grid size (default 101)")
    p.add_argument("--noiseless", action="store_const", const=True,
                   help="analytic slopes instead of sampled fits")

    return parser


def load_config(args: argparse.Namespace) -> ExperimentConfig:
    cfg = ExperimentConfig()
    path = getattr(args, "config", None)
    if path:
        try:
            with open(path) as handle:
                data = json.load(handle)
        except OSError as exc:
            raise ConfigError("config", f"cannot read config file: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError("config", f"config file is not valid JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("config", "config file must hold a JSON object")
        try:
            cfg = cfg.merged(data)
        except TypeError as exc:
            raise ConfigError("config", str(exc)) from exc
    overrides = {
        k: v for k, v in vars(args).items() if k not in ("experiment", "config")
    }
    cfg = cfg.merged(overrides)
    cfg.validate()
    return cfg


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args)
        runner = RUNNERS[args.experiment]
        result = runner(cfg)
        if cfg.out:
            if cfg.format == "json":
                write_json(cfg.out, result, cfg)
            else:
                write_csv(cfg.out, result, cfg)
            print(f"{result.summary} -> {cfg.out}")
        else:
            print(result.summary)
        return 0
    except ConfigError as exc:
        json.dump({"error": "config", "key": exc.key, "message": str(exc)}, sys.stderr)
        sys.stderr.write("\n")
        return 2
    except Exception as exc:  # runtime failure: machine-readable report
        json.dump(
            {"error": "runtime", "type": type(exc).__name__, "message": str(exc)},
            sys.stderr,
        )
        sys.stderr.write("\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
