"""Density calibration, inversion, and viscosity-coupling analysis.

Builds on the loading model: predicted resonant frequencies for candidate
liquids, an ordinary least-squares density calibration line (frequency
regressed on density, matching how such sensors are characterized), its
inversion back to density, and a report on when viscous entrained mass
makes a frequency reading ambiguous between density and viscosity.

Published characterization data for the sol-gel PZT on silicon nitride
device are embedded for side-by-side comparison; they are reference data,
not model outputs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .fpw_dispersion import (
    LiquidLoad,
    LoadingState,
    VelocitySolution,
    evanescent_decay_length,
    loaded_velocity,
)
from .plate_materials import CompositePlate

# Fraction of the total added liquid mass the viscous part may reach before
# a frequency reading stops identifying density alone.
DEFAULT_COUPLING_THRESHOLD = 0.05


class DegenerateFitError(ValueError):
    """Calibration points do not determine a line."""


@dataclass(frozen=True)
class LiquidSample:
    """A candidate liquid: density in kg/m^3, shear viscosity in Pa*s."""

    name: str
    density: float
    viscosity: float

    def __post_init__(self):
        if self.density <= 0:
            raise ValueError("liquid density must be > 0")
        if self.viscosity < 0:
            raise ValueError("liquid viscosity must be >= 0")


@dataclass(frozen=True)
class Measurement:
    """One measured operating point of the device under a liquid."""

    frequency: float
    insertion_loss_db: float
    liquid_name: str

    def __post_init__(self):
        if self.frequency <= 0:
            raise ValueError("frequency must be > 0")
        if self.insertion_loss_db > 0:
            raise ValueError("insertion loss is expressed in dB <= 0")


@dataclass(frozen=True)
class CalibrationFit:
    """Least-squares line frequency = slope * density + intercept.

    slope in Hz/(kg/m^3), intercept in Hz. ``points`` keeps the fitted
    (density, frequency) pairs so range checks and residuals stay
    reproducible.
    """

    slope: float
    intercept: float
    r_squared: float
    points: tuple[tuple[float, float], ...]

    @property
    def slope_mhz_per_gcm3(self) -> float:
        """Slope converted to MHz per g/cm^3 for reporting."""
        return self.slope * 1.0e-3

    def frequency_at(self, density: float) -> float:
        """Evaluate the fitted line (Hz)."""
        return self.slope * density + self.intercept

    def frequency_range(self) -> tuple[float, float]:
        """(min, max) of the fitted frequencies."""
        freqs = [f for _, f in self.points]
        return min(freqs), max(freqs)


@dataclass(frozen=True)
class CouplingReport:
    """Relative weight of viscous vs density-entrained liquid mass."""

    liquid: LiquidSample
    viscous_mass: float
    entrained_mass: float
    ratio: float
    threshold: float
    density_sensing_valid: bool
    verdict: str
    operating_point: VelocitySolution


# Liquids the device was characterized with. Saline viscosity is nominal.
PRESET_LIQUIDS: dict[str, LiquidSample] = {
    "ipa": LiquidSample("ipa", 787.0, 0.0025),
    "water": LiquidSample("water", 1000.0, 0.001),
    "saline": LiquidSample("saline", 1200.0, 0.0015),
    "glycerol": LiquidSample("glycerol", 1200.0, 0.934),
}


def fit_density_sensitivity(
    points: Iterable[tuple[float, float]]
) -> CalibrationFit:
    """Ordinary least squares of frequency (Hz) on density (kg/m^3).

    Needs at least two points with distinct densities; identical densities
    raise DegenerateFitError.
    """
    pts = tuple((float(d), float(f)) for d, f in points)
    if len(pts) < 2:
        raise DegenerateFitError("need at least two calibration points")
    densities = np.array([d for d, _ in pts])
    freqs = np.array([f for _, f in pts])
    if np.ptp(densities) == 0.0:
        raise DegenerateFitError("calibration densities are all identical")

    dmean = densities.mean()
    fmean = freqs.mean()
    slope = float(np.sum((densities - dmean) * (freqs - fmean))
                  / np.sum((densities - dmean) ** 2))
    intercept = float(fmean - slope * dmean)
    residuals = freqs - (slope * densities + intercept)
    ss_res = float(np.sum(residuals**2))
    ss_tot = float(np.sum((freqs - fmean) ** 2))
    r_squared = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return CalibrationFit(slope=slope, intercept=intercept,
                          r_squared=r_squared, points=pts)


def predict_frequency(
    plate: CompositePlate,
    wavelength: float,
    liquid: LiquidSample | None = None,
    tension: float = 0.0,
) -> float:
    """Model resonant frequency (Hz) of the plate under the given liquid."""
    load = None
    if liquid is not None:
        load = LiquidLoad(density=liquid.density, viscosity=liquid.viscosity)
    solution = loaded_velocity(plate, LoadingState(tension, load), wavelength)
    return solution.resonant_frequency


def invert_density_calibrated(
    frequency: float, fit: CalibrationFit
) -> tuple[float, bool]:
    """Density (kg/m^3) from a measured frequency via the calibration line.

    Returns (density, extrapolated); ``extrapolated`` is True when the
    frequency lies outside the calibrated range.
    """
    if fit.slope == 0.0:
        raise ValueError("calibration slope is zero; cannot invert")
    density = (frequency - fit.intercept) / fit.slope
    lo, hi = fit.frequency_range()
    return density, not lo <= frequency <= hi


def viscosity_coupling_report(
    liquid: LiquidSample,
    plate: CompositePlate,
    wavelength: float,
    threshold: float = DEFAULT_COUPLING_THRESHOLD,
) -> CouplingReport:
    """Judge whether a frequency reading identifies density for this liquid.

    Solves the loaded operating point, then compares the viscous mass
    against the total added liquid mass. Above ``threshold`` the density
    and viscosity contributions are entangled and a frequency shift alone
    cannot be attributed to density.
    """
    if not 0 < threshold < 1:
        raise ValueError("threshold must lie in (0, 1)")
    load = LoadingState(0.0, LiquidLoad(liquid.density, liquid.viscosity))
    solution = loaded_velocity(plate, load, wavelength)
    entrained = liquid.density * evanescent_decay_length(wavelength)
    viscous = solution.viscous_mass
    ratio = viscous / (viscous + entrained)
    valid = ratio <= threshold
    verdict = (
        "density sensing valid"
        if valid
        else "coupled; density not invertible from frequency alone"
    )
    return CouplingReport(
        liquid=liquid,
        viscous_mass=viscous,
        entrained_mass=entrained,
        ratio=ratio,
        threshold=threshold,
        density_sensing_valid=valid,
        verdict=verdict,
        operating_point=solution,
    )


def tension_effect(
    resonant_frequency: float, tension_sens: float, tension: float
) -> float:
    """First-order frequency shift (Hz) from in-plane tension."""
    if tension < 0:
        raise ValueError("tension must be >= 0")
    return resonant_frequency * tension_sens * tension


@dataclass(frozen=True)
class LoadedCaseRecord:
    """Published model operating point for one low-viscosity liquid."""

    liquid_name: str
    density: float
    viscosity: float
    phase_velocity: float
    frequency: float


@dataclass(frozen=True)
class ViscosityCaseRecord:
    """Published predicted vs measured operating point for one liquid."""

    liquid_name: str
    predicted_frequency: float
    measured_frequency: float
    measured_insertion_loss_db: float


@dataclass(frozen=True)
class ReferenceDatasets:
    """Published characterization numbers for the reference device.

    These are embedded verbatim for regression display and comparison
    plots. The low-viscosity operating points are not reproducible from
    the loading relations with the stated decay length, so they are kept
    as reference data rather than asserted as model outputs.
    """

    low_viscosity_cases: tuple[LoadedCaseRecord, ...]
    viscosity_cases: tuple[ViscosityCaseRecord, ...]
    unloaded_measured_frequency: float
    unloaded_predicted_frequency: float

    def calibration_points(self) -> tuple[tuple[float, float], ...]:
        """(density, frequency) pairs of the published low-viscosity set."""
        return tuple(
            (case.density, case.frequency) for case in self.low_viscosity_cases
        )


_REFERENCE = ReferenceDatasets(
    low_viscosity_cases=(
        LoadedCaseRecord("ipa", 787.0, 0.0025, 197.48, 4.94e6),
        LoadedCaseRecord("water", 1000.0, 0.001, 190.05, 4.75e6),
        LoadedCaseRecord("saline", 1200.0, 0.0015, 183.77, 4.59e6),
    ),
    viscosity_cases=(
        ViscosityCaseRecord("saline", 4.59e6, 4.98e6, -33.38),
        ViscosityCaseRecord("glycerol", 4.49e6, 4.73e6, -37.04),
    ),
    unloaded_measured_frequency=5.53e6,
    unloaded_predicted_frequency=5.88e6,
)


def load_reference_datasets() -> ReferenceDatasets:
    """Embedded published operating points of the reference device."""
    return _REFERENCE


def load_liquid_library(text: str) -> dict[str, LiquidSample]:
    """Parse a liquid library: one ``name density viscosity`` per line.

    Densities in kg/m^3, viscosities in Pa*s; ``#`` starts a comment.
    """
    liquids: dict[str, LiquidSample] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        if len(fields) != 3:
            raise ValueError(
                f"liquid library line {lineno}: expected 'name density "
                f"viscosity', got {raw!r}"
            )
        name = fields[0].lower()
        try:
            density = float(fields[1])
            viscosity = float(fields[2])
        except ValueError as exc:
            raise ValueError(f"liquid library line {lineno}: {exc}") from None
        liquids[name] = LiquidSample(name, density, viscosity)
    return liquids
