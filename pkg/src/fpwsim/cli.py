"""Batch workbench: simulate and analyze devices described by config files.

Subcommands: ``plate`` (effective membrane parameters), ``dispersion``
(loaded velocity, frequency and sensitivities), ``s21`` (two-port sweep to
CSV plus resonance summary), ``fit`` and ``invert`` (density calibration
workflow). Exit status 0 on success, 1 on numerical failure, 2 on usage or
configuration errors. Outputs are deterministic: identical inputs produce
byte-identical CSV files.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .com_resonator import (
    NoResonanceError,
    find_resonance,
    fpw_device_response,
    s21_sweep,
    write_sweep_csv,
)
from .config import (
    ConfigError,
    DeviceConfig,
    parse_calibration_points,
    parse_device_config,
)
from .fpw_dispersion import (
    ConvergenceError,
    LiquidLoad,
    LoadingState,
    NoSolutionError,
    loaded_velocity,
    sensitivities,
)
from .liquid_sensing import (
    DegenerateFitError,
    LiquidSample,
    fit_density_sensitivity,
    invert_density_calibrated,
    load_liquid_library,
)

_NUM = "%.9e"


class UsageError(ValueError):
    """Bad command-line input (maps to exit status 2)."""


@dataclass
class RunResult:
    """Outcome of one CLI invocation."""

    command: str
    summary: tuple[str, ...] = field(default_factory=tuple)
    errors: tuple[str, ...] = field(default_factory=tuple)
    output_files: tuple[str, ...] = field(default_factory=tuple)
    exit_status: int = 0


def _bundled(name: str) -> str:
    return resources.files("fpwsim").joinpath("data", name).read_text()


def _load_config(args) -> DeviceConfig:
    if args.config is None:
        text = _bundled("reference_device.cfg")
    else:
        text = Path(args.config).read_text()
    return parse_device_config(text)


def _load_liquids(args) -> dict[str, LiquidSample]:
    if args.liquids is None:
        text = _bundled("liquids.txt")
    else:
        text = Path(args.liquids).read_text()
    return load_liquid_library(text)


def _pick_liquid(args) -> LiquidSample | None:
    if args.liquid is None:
        return None
    library = _load_liquids(args)
    name = args.liquid.lower()
    if name not in library:
        raise UsageError(
            f"unknown liquid {args.liquid!r}; available: "
            + ", ".join(sorted(library))
        )
    return library[name]


def _loading(args, liquid: LiquidSample | None) -> LoadingState:
    load = None
    if liquid is not None:
        load = LiquidLoad(density=liquid.density, viscosity=liquid.viscosity)
    return LoadingState(tension=args.tension, liquid=load)


def _value_line(label: str, value: float, config_overrides, key=None) -> str:
    text = f"{label}: {_NUM % value}"
    if key is not None and key in config_overrides:
        text += f" (override; computed {_NUM % config_overrides[key]})"
    return text


def _cmd_plate(args) -> RunResult:
    cfg = _load_config(args)
    plate = cfg.plate()
    computed = plate.computed()
    shown = {k: computed[k] for k in plate.overrides}
    wavelength = cfg.geometry.wavelength
    lines = [
        f"layers: {len(plate.layers)}",
        _value_line("total_thickness_m", plate.total_thickness, shown,
                    "total_thickness"),
        _value_line("young_modulus_n_m2", plate.young_modulus, shown,
                    "young_modulus"),
        _value_line("poisson_ratio", plate.poisson_ratio, shown,
                    "poisson_ratio"),
        _value_line("plate_modulus_n_m2", plate.plate_modulus, shown,
                    "plate_modulus"),
        _value_line("mass_per_area_kg_m2", plate.mass_per_area, shown,
                    "mass_per_area"),
        f"flexural_rigidity_n_m: {_NUM % plate.flexural_rigidity()}",
        f"bending_term_n_m: {_NUM % plate.bending_term(wavelength)}"
        f" (wavelength_m {_NUM % wavelength})",
    ]
    return RunResult(command="plate", summary=tuple(lines))


def _cmd_dispersion(args) -> RunResult:
    cfg = _load_config(args)
    plate = cfg.plate()
    liquid = _pick_liquid(args)
    loading = _loading(args, liquid)
    wavelength = cfg.geometry.wavelength
    solution = loaded_velocity(plate, loading, wavelength)
    s_m, s_t = sensitivities(plate, loading, wavelength)
    lines = [
        f"liquid: {liquid.name if liquid else 'none'}",
        f"tension_n_m: {_NUM % args.tension}",
        f"phase_velocity_m_s: {_NUM % solution.phase_velocity}",
        f"resonant_frequency_hz: {_NUM % solution.resonant_frequency}",
        f"evanescent_length_m: {_NUM % solution.evanescent_length}",
        f"viscous_length_m: {_NUM % solution.viscous_length}",
        f"viscous_mass_kg_m2: {_NUM % solution.viscous_mass}",
        f"mass_sensitivity_m3_kg: {_NUM % s_m}",
        f"tension_sensitivity_m_n: {_NUM % s_t}",
        f"iterations: {solution.iterations}",
        f"sound_speed_ratio: {_NUM % solution.sound_speed_ratio}",
    ]
    lines += [f"warning: {w}" for w in solution.warnings]

    outputs: list[str] = []
    if args.sweep_out is not None:
        lo, hi, count = _parse_sweep_range(args.sweep_densities)
        viscosity = liquid.viscosity if liquid is not None else 0.0
        rows = []
        for density in np.linspace(lo, hi, count):
            sol = loaded_velocity(
                plate,
                LoadingState(args.tension, LiquidLoad(float(density), viscosity)),
                wavelength,
            )
            rows.append((float(density), sol.resonant_frequency))
        _write_csv(args.sweep_out, "density_kg_m3,frequency_hz", rows)
        outputs.append(args.sweep_out)
        lines.append(f"sweep_csv: {args.sweep_out} ({count} rows)")
    return RunResult(
        command="dispersion", summary=tuple(lines), output_files=tuple(outputs)
    )


def _parse_sweep_range(text: str) -> tuple[float, float, int]:
    fields = text.split(":")
    if len(fields) != 3:
        raise UsageError(
            f"sweep range must be 'lo:hi:count', got {text!r}"
        )
    try:
        lo, hi, count = float(fields[0]), float(fields[1]), int(fields[2])
    except ValueError as exc:
        raise UsageError(f"bad sweep range {text!r}: {exc}") from None
    if not (0 < lo < hi and count >= 2):
        raise UsageError("sweep range needs 0 < lo < hi and count >= 2")
    return lo, hi, count


def _write_csv(path: str, header: str, rows) -> None:
    with open(path, "w", newline="") as handle:
        handle.write(header + "\n")
        for row in rows:
            handle.write(",".join(_NUM % value for value in row) + "\n")


def _cmd_s21(args) -> RunResult:
    cfg = _load_config(args)
    geometry = cfg.geometry
    if args.bulk:
        if cfg.com_velocity is None:
            raise UsageError("--bulk requires a [com] velocity in the config")
        params = cfg.com_parameters()
        response = s21_sweep(
            geometry, params, args.f_start, args.f_stop, args.points
        )
        mode = "bulk"
    else:
        plate = cfg.plate()
        liquid = _pick_liquid(args)
        loading = _loading(args, liquid)
        params = cfg.com_parameters(free_velocity=1.0)
        response = fpw_device_response(
            plate,
            loading,
            geometry,
            params,
            args.f_start,
            args.f_stop,
            args.points,
            include_viscous_loss=args.viscous_loss,
        )
        mode = f"fpw ({liquid.name if liquid else 'unloaded'})"

    write_sweep_csv(response, args.out)
    lines = [
        f"mode: {mode}",
        f"points: {len(response.frequencies)}",
        f"csv: {args.out}",
    ]
    if response.gap_indices:
        lines.append(
            f"warning: {len(response.gap_indices)} singular sweep points "
            "recorded as gaps"
        )
    summary = find_resonance(response)
    lines += [
        f"peak_frequency_hz: {_NUM % summary.peak_frequency}",
        f"peak_magnitude: {_NUM % summary.peak_magnitude}",
        f"insertion_loss_db: {_NUM % summary.insertion_loss_db}",
        f"bandwidth_3db_hz: {_NUM % summary.bandwidth_3db}",
        f"quality_factor: {_NUM % summary.quality_factor}",
    ]
    return RunResult(
        command="s21", summary=tuple(lines), output_files=(args.out,)
    )


def _cmd_fit(args) -> RunResult:
    points = parse_calibration_points(Path(args.points).read_text())
    fit = fit_density_sensitivity(points)
    lines = [
        f"points: {len(fit.points)}",
        f"slope_hz_per_kg_m3: {_NUM % fit.slope}",
        f"slope_mhz_per_g_cm3: {_NUM % fit.slope_mhz_per_gcm3}",
        f"intercept_hz: {_NUM % fit.intercept}",
        f"r_squared: {fit.r_squared:.9f}",
    ]
    return RunResult(command="fit", summary=tuple(lines))


def _cmd_invert(args) -> RunResult:
    points = parse_calibration_points(Path(args.points).read_text())
    fit = fit_density_sensitivity(points)
    density, extrapolated = invert_density_calibrated(args.freq, fit)
    lines = [
        f"frequency_hz: {_NUM % args.freq}",
        f"density_kg_m3: {_NUM % density}",
        f"density_g_cm3: {_NUM % (density / 1000.0)}",
    ]
    if extrapolated:
        lines.append(
            "warning: frequency outside the calibrated range; extrapolating"
        )
    return RunResult(command="invert", summary=tuple(lines))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fpwsim",
        description="Flexural plate wave resonator simulation workbench",
    )
    parser.add_argument(
        "--config",
        help="device config file (default: bundled reference device)",
    )
    parser.add_argument(
        "--liquids",
        help="liquid library file (default: bundled library)",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_plate = sub.add_parser("plate", help="print composite plate parameters")
    p_plate.set_defaults(func=_cmd_plate)

    p_disp = sub.add_parser(
        "dispersion", help="loaded velocity, frequency and sensitivities"
    )
    p_disp.add_argument("--liquid", help="liquid name from the library")
    p_disp.add_argument(
        "--tension", type=float, default=0.0, help="in-plane tension (N/m)"
    )
    p_disp.add_argument(
        "--sweep-out", help="write a density sweep CSV to this path"
    )
    p_disp.add_argument(
        "--sweep-densities",
        default="500:2000:16",
        help="density sweep as lo:hi:count (kg/m^3)",
    )
    p_disp.set_defaults(func=_cmd_dispersion)

    p_s21 = sub.add_parser("s21", help="two-port S21 sweep to CSV")
    mode = p_s21.add_mutually_exclusive_group()
    mode.add_argument(
        "--bulk", action="store_true",
        help="sweep at the configured [com] velocity",
    )
    mode.add_argument(
        "--fpw", action="store_true",
        help="sweep at the flexural-plate-wave velocity (default)",
    )
    p_s21.add_argument("--liquid", help="liquid name (fpw mode)")
    p_s21.add_argument(
        "--tension", type=float, default=0.0, help="in-plane tension (N/m)"
    )
    p_s21.add_argument(
        "--viscous-loss", action="store_true",
        help="add viscous propagation loss (fpw mode)",
    )
    p_s21.add_argument("--out", required=True, help="output CSV path")
    p_s21.add_argument("--points", type=int, default=2001)
    p_s21.add_argument("--f-start", type=float, default=None)
    p_s21.add_argument("--f-stop", type=float, default=None)
    p_s21.set_defaults(func=_cmd_s21)

    p_fit = sub.add_parser("fit", help="density calibration least squares")
    p_fit.add_argument(
        "--points", required=True, help="file of 'density frequency' lines"
    )
    p_fit.set_defaults(func=_cmd_fit)

    p_inv = sub.add_parser("invert", help="density from a measured frequency")
    p_inv.add_argument("--freq", type=float, required=True, help="frequency (Hz)")
    p_inv.add_argument(
        "--points", required=True, help="file of 'density frequency' lines"
    )
    p_inv.set_defaults(func=_cmd_invert)
    return parser


def run(argv=None) -> RunResult:
    """Parse arguments and execute; errors are folded into the result."""
    parser = build_parser()
    args = parser.parse_args(argv)
    command = args.command
    try:
        return args.func(args)
    except (ConfigError, UsageError, DegenerateFitError) as exc:
        return RunResult(command=command, errors=(str(exc),), exit_status=2)
    except FileNotFoundError as exc:
        return RunResult(
            command=command,
            errors=(f"cannot read {exc.filename!r}",),
            exit_status=2,
        )
    except (ConvergenceError, NoResonanceError, NoSolutionError) as exc:
        return RunResult(command=command, errors=(str(exc),), exit_status=1)


def main(argv=None) -> int:
    result = run(argv)
    for line in result.summary:
        print(line)
    for line in result.errors:
        print(f"error: {line}", file=sys.stderr)
    return result.exit_status


if __name__ == "__main__":
    sys.exit(main())
