"""Flexural plate wave phase velocity under tension and liquid loading.

The lowest antisymmetric plate mode on a membrane much thinner than the
wavelength has phase velocity sqrt(B/M), with B the wavelength-referred
bending stiffness (N/m) and M the mass per unit area (kg/m^2). A contacting
liquid adds an entrained mass rho_F * delta_E over the evanescent decay
length delta_E = wavelength / 2 pi, plus a viscous mass M_eta =
rho_F * delta_v / 2 with delta_v = sqrt(2 eta / (omega rho_F)). In-plane
tension T_x adds to the stiffness. The loaded velocity solves

    v_p = sqrt((T_x + B) / (M + rho_F delta_E + M_eta(omega)))

self-consistently, since the viscous mass depends on the operating angular
frequency omega = 2 pi v_p / wavelength.

The low-velocity approximation for delta_E requires v_p to stay well below
the sound speed of the liquid; the solver reports the ratio against a
water-like 1482 m/s as a warning indicator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .plate_materials import CompositePlate

# Sound speed used for the v_p << c_liquid validity ratio (water at ~20 C).
WATER_SOUND_SPEED = 1482.0

REL_TOL = 1e-10
MAX_ITERATIONS = 100


class ConvergenceError(RuntimeError):
    """Fixed-point iteration failed to converge; carries the last iterate."""

    def __init__(self, message: str, last_value: float, iterations: int):
        super().__init__(message)
        self.last_value = last_value
        self.iterations = iterations


class NoSolutionError(ValueError):
    """The requested inversion has no physically meaningful solution."""


@dataclass(frozen=True)
class LiquidLoad:
    """Liquid contacting one face of the membrane.

    density in kg/m^3, viscosity (shear) in Pa*s. ``covers_decay_length``
    states whether the liquid level exceeds the evanescent decay length,
    the condition for the full entrained-mass loading to apply. A zero
    density stands for the no-liquid limit and requires zero viscosity.
    """

    density: float
    viscosity: float = 0.0
    covers_decay_length: bool = True

    def __post_init__(self):
        if self.density < 0:
            raise ValueError("liquid density must be >= 0")
        if self.viscosity < 0:
            raise ValueError("liquid viscosity must be >= 0")
        if self.density == 0 and self.viscosity > 0:
            raise ValueError("viscous liquid requires a positive density")


@dataclass(frozen=True)
class LoadingState:
    """In-plane tension (N/m, tensile only) plus optional liquid load."""

    tension: float = 0.0
    liquid: LiquidLoad | None = None

    def __post_init__(self):
        if self.tension < 0:
            raise ValueError("tension must be >= 0 (compressive not modeled)")


@dataclass(frozen=True)
class VelocitySolution:
    """Converged loading solution.

    phase_velocity in m/s, resonant_frequency in Hz, lengths in m,
    viscous_mass in kg/m^2. ``sound_speed_ratio`` is phase velocity over
    the water sound speed (small means the decay-length approximation is
    safe). ``warnings`` collects non-fatal precondition violations.
    """

    phase_velocity: float
    resonant_frequency: float
    evanescent_length: float
    viscous_length: float
    viscous_mass: float
    iterations: int
    converged: bool
    sound_speed_ratio: float
    warnings: tuple[str, ...] = field(default_factory=tuple)


def unloaded_velocity(bending: float, areal_mass: float) -> float:
    """Phase velocity sqrt(B/M) of the bare plate (m/s)."""
    if bending <= 0 or areal_mass <= 0:
        raise ValueError("bending term and areal mass must be > 0")
    return math.sqrt(bending / areal_mass)


def evanescent_decay_length(wavelength: float) -> float:
    """Penetration depth wavelength / 2 pi of plate motion into the liquid (m)."""
    if wavelength <= 0:
        raise ValueError("wavelength must be > 0")
    return wavelength / (2.0 * math.pi)


def viscous_mass(liquid: LiquidLoad, omega: float) -> tuple[float, float]:
    """Viscous decay length and viscosity-induced areal mass.

    Returns (delta_v, M_eta) with delta_v = sqrt(2 eta / (omega rho_F)) in m
    and M_eta = rho_F * delta_v / 2 in kg/m^2. Zero viscosity gives (0, 0).
    """
    if omega <= 0:
        raise ValueError("omega must be > 0")
    if liquid.viscosity == 0 or liquid.density == 0:
        return 0.0, 0.0
    delta_v = math.sqrt(2.0 * liquid.viscosity / (omega * liquid.density))
    return delta_v, liquid.density * delta_v / 2.0


def resonant_frequency(phase_velocity: float, wavelength: float) -> float:
    """Operating frequency v_p / wavelength (Hz)."""
    if phase_velocity <= 0 or wavelength <= 0:
        raise ValueError("phase velocity and wavelength must be > 0")
    return phase_velocity / wavelength


def loaded_velocity(
    plate: CompositePlate,
    loading: LoadingState,
    wavelength: float,
    rel_tol: float = REL_TOL,
    max_iterations: int = MAX_ITERATIONS,
) -> VelocitySolution:
    """Solve the loaded phase velocity self-consistently.

    With no liquid (or an inviscid one) the expression is closed-form; a
    viscous liquid couples the viscous mass to the operating frequency, so
    the velocity is iterated to a relative tolerance ``rel_tol``, seeded at
    the liquid-free velocity. Raises ConvergenceError (carrying the last
    iterate) if the cap of ``max_iterations`` is exceeded.
    """
    bending = plate.bending_term(wavelength)
    areal_mass = plate.mass_per_area
    stiffness = loading.tension + bending
    liquid = loading.liquid

    warnings: list[str] = []
    delta_e = evanescent_decay_length(wavelength)

    if liquid is None:
        v = math.sqrt(stiffness / areal_mass)
        return VelocitySolution(
            phase_velocity=v,
            resonant_frequency=v / wavelength,
            evanescent_length=delta_e,
            viscous_length=0.0,
            viscous_mass=0.0,
            iterations=0,
            converged=True,
            sound_speed_ratio=v / WATER_SOUND_SPEED,
            warnings=(),
        )

    if not liquid.covers_decay_length:
        warnings.append(
            "liquid level below the evanescent decay length; entrained mass "
            "is overestimated and the density reading is unreliable"
        )

    base_mass = areal_mass + liquid.density * delta_e
    v = math.sqrt(stiffness / areal_mass)  # liquid-free seed
    m_eta = 0.0
    delta_v = 0.0
    iterations = 0
    converged = False
    for iterations in range(1, max_iterations + 1):
        omega = 2.0 * math.pi * v / wavelength
        delta_v, m_eta = viscous_mass(liquid, omega)
        v_next = math.sqrt(stiffness / (base_mass + m_eta))
        if abs(v_next - v) <= rel_tol * v_next:
            v = v_next
            converged = True
            break
        v = v_next
    if not converged:
        raise ConvergenceError(
            f"loaded velocity did not converge within {max_iterations} "
            f"iterations (last iterate {v:.9g} m/s)",
            last_value=v,
            iterations=iterations,
        )

    # Report the viscous terms at the converged operating frequency.
    delta_v, m_eta = viscous_mass(liquid, 2.0 * math.pi * v / wavelength)
    ratio = v / WATER_SOUND_SPEED
    if ratio > 0.3:
        warnings.append(
            f"phase velocity is {ratio:.2f} of the liquid sound speed; the "
            "evanescent decay-length approximation degrades"
        )
    return VelocitySolution(
        phase_velocity=v,
        resonant_frequency=v / wavelength,
        evanescent_length=delta_e,
        viscous_length=delta_v,
        viscous_mass=m_eta,
        iterations=iterations,
        converged=converged,
        sound_speed_ratio=ratio,
        warnings=tuple(warnings),
    )


def mass_sensitivity(areal_mass: float, liquid_density: float, delta_e: float) -> float:
    """Relative velocity change per unit liquid density (m^3/kg)."""
    return -delta_e / (2.0 * (areal_mass + liquid_density * delta_e))


def tension_sensitivity(tension: float, bending: float) -> float:
    """Relative velocity change per unit in-plane tension (m/N)."""
    return 1.0 / (2.0 * (tension + bending))


def sensitivities(
    plate: CompositePlate, loading: LoadingState, wavelength: float
) -> tuple[float, float]:
    """First-order (s_m, s_T) at the given loading state.

    s_m is the relative velocity perturbation per unit liquid density
    (m^3/kg, negative), s_T per unit tension (m/N). Both are evaluated at
    the current density and tension, inviscid limit.
    """
    delta_e = evanescent_decay_length(wavelength)
    rho = loading.liquid.density if loading.liquid is not None else 0.0
    s_m = mass_sensitivity(plate.mass_per_area, rho, delta_e)
    s_t = tension_sensitivity(loading.tension, plate.bending_term(wavelength))
    return s_m, s_t


def density_from_frequency(
    measured_frequency: float,
    plate: CompositePlate,
    wavelength: float,
    assumed_viscosity: float = 0.0,
    tension: float = 0.0,
    rel_tol: float = REL_TOL,
    max_iterations: int = MAX_ITERATIONS,
) -> float:
    """Invert the loading relation for the liquid density (kg/m^3).

    With zero assumed viscosity the inversion is closed-form; otherwise the
    viscous mass is eliminated by fixed-point iteration at the measured
    operating frequency. Frequencies at or above the liquid-free resonance
    imply a non-positive density and raise NoSolutionError.
    """
    if measured_frequency <= 0:
        raise ValueError("measured frequency must be > 0")
    if assumed_viscosity < 0:
        raise ValueError("assumed viscosity must be >= 0")
    bending = plate.bending_term(wavelength)
    areal_mass = plate.mass_per_area
    stiffness = tension + bending
    unloaded_f = math.sqrt(stiffness / areal_mass) / wavelength
    if measured_frequency >= unloaded_f:
        raise NoSolutionError(
            f"measured frequency {measured_frequency:.6g} Hz is not below the "
            f"liquid-free resonance {unloaded_f:.6g} Hz; implied density "
            "would be non-positive"
        )

    v = measured_frequency * wavelength
    delta_e = evanescent_decay_length(wavelength)
    added_mass = stiffness / v**2 - areal_mass  # rho delta_E + M_eta
    if assumed_viscosity == 0.0:
        return added_mass / delta_e

    omega = 2.0 * math.pi * measured_frequency
    rho = added_mass / delta_e  # inviscid seed
    for _ in range(max_iterations):
        # M_eta = rho delta_v / 2 = sqrt(eta rho / (2 omega))
        m_eta = math.sqrt(assumed_viscosity * rho / (2.0 * omega))
        remainder = added_mass - m_eta
        if remainder <= 0:
            raise NoSolutionError(
                "assumed viscosity absorbs the entire added mass; no "
                "positive density solves the loading relation"
            )
        rho_next = remainder / delta_e
        if abs(rho_next - rho) <= rel_tol * rho_next:
            return rho_next
        rho = rho_next
    raise ConvergenceError(
        f"density inversion did not converge within {max_iterations} "
        f"iterations (last iterate {rho:.9g} kg/m^3)",
        last_value=rho,
        iterations=max_iterations,
    )
