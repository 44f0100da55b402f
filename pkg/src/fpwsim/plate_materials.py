"""Effective elastic and inertial parameters of a multilayer membrane.

A thin composite membrane (e.g. piezoelectric film on a nitride support) is
reduced to a homogeneous plate description: thickness-weighted Young's
modulus and Poisson ratio, plate modulus E/(1 - nu^2), mass per unit area,
and the wavelength-referred bending term used by the flexural wave model.

All quantities are SI: thickness in m, moduli in N/m^2, density in kg/m^3,
mass per area in kg/m^2, bending term in N/m.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import math

# Effective parameters that may be pinned to externally published values
# instead of the values derived from the layer stack.
OVERRIDABLE_PARAMETERS = (
    "young_modulus",
    "poisson_ratio",
    "plate_modulus",
    "mass_per_area",
    "total_thickness",
)


@dataclass(frozen=True)
class MaterialLayer:
    """One layer of the membrane stack.

    thickness in m, young_modulus in N/m^2, density in kg/m^3.
    """

    name: str
    thickness: float
    young_modulus: float
    poisson_ratio: float
    density: float

    def __post_init__(self):
        if self.thickness <= 0:
            raise ValueError(f"layer {self.name!r}: thickness must be > 0")
        if self.young_modulus <= 0:
            raise ValueError(f"layer {self.name!r}: young_modulus must be > 0")
        if self.density <= 0:
            raise ValueError(f"layer {self.name!r}: density must be > 0")
        if not 0 <= self.poisson_ratio < 0.5:
            raise ValueError(
                f"layer {self.name!r}: poisson_ratio must lie in [0, 0.5)"
            )

    @property
    def mass_per_area(self) -> float:
        """Areal mass density of this single layer (kg/m^2)."""
        return self.density * self.thickness


def _require_layers(layers: Sequence[MaterialLayer]) -> Sequence[MaterialLayer]:
    if not layers:
        raise ValueError("layer stack is empty")
    return layers


def total_thickness(layers: Sequence[MaterialLayer]) -> float:
    """Sum of layer thicknesses (m)."""
    _require_layers(layers)
    return sum(layer.thickness for layer in layers)


def effective_young_modulus(layers: Sequence[MaterialLayer]) -> float:
    """Thickness-weighted average Young's modulus of the stack (N/m^2)."""
    _require_layers(layers)
    h = total_thickness(layers)
    return sum(layer.young_modulus * layer.thickness for layer in layers) / h


def effective_poisson(layers: Sequence[MaterialLayer]) -> float:
    """Thickness-weighted average Poisson ratio of the stack."""
    _require_layers(layers)
    h = total_thickness(layers)
    return sum(layer.poisson_ratio * layer.thickness for layer in layers) / h


def mass_per_area(layers: Sequence[MaterialLayer]) -> float:
    """Total areal mass density of the stack, sum of rho_i * h_i (kg/m^2)."""
    _require_layers(layers)
    return sum(layer.mass_per_area for layer in layers)


def plate_modulus(young_modulus: float, poisson_ratio: float) -> float:
    """Plane-strain plate modulus E / (1 - nu^2) (N/m^2)."""
    if poisson_ratio >= 1:
        raise ValueError("poisson_ratio must be < 1")
    return young_modulus / (1.0 - poisson_ratio**2)


def flexural_rigidity(plate_mod: float, thickness: float) -> float:
    """Raw flexural rigidity E' h^3 / 12 of the plate (N*m)."""
    if thickness <= 0:
        raise ValueError("thickness must be > 0")
    return plate_mod * thickness**3 / 12.0


def bending_term(plate_mod: float, thickness: float, wavelength: float) -> float:
    """Wavelength-referred bending stiffness (N/m).

    This is the flexural rigidity E' h^3 / 12 multiplied by the squared
    wavenumber (2 pi / wavelength)^2, i.e. the stiffness that enters the
    flexural wave velocity together with the mass per unit area.

    Parameters
    ----------
    plate_mod : plate modulus E / (1 - nu^2) (N/m^2)
    thickness : total plate thickness (m)
    wavelength : acoustic wavelength (m)
    """
    if thickness <= 0 or wavelength <= 0:
        raise ValueError("thickness and wavelength must be > 0")
    k = 2.0 * math.pi / wavelength
    return flexural_rigidity(plate_mod, thickness) * k**2


@dataclass(frozen=True)
class CompositePlate:
    """Homogenized description of a layered membrane.

    The effective fields are the values used by downstream models. Any of
    them may have been pinned to an externally published or measured value
    via ``overrides`` (useful when a derived quantity and a published table
    disagree); ``computed()`` always returns the stack-derived values.
    """

    layers: tuple[MaterialLayer, ...]
    total_thickness: float
    young_modulus: float
    poisson_ratio: float
    plate_modulus: float
    mass_per_area: float
    overrides: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if self.mass_per_area <= 0:
            raise ValueError("mass_per_area must be > 0")
        if self.total_thickness <= 0:
            raise ValueError("total_thickness must be > 0")
        for key in self.overrides:
            if key not in OVERRIDABLE_PARAMETERS:
                raise ValueError(f"unknown override parameter {key!r}")

    @classmethod
    def from_layers(
        cls,
        layers: Iterable[MaterialLayer],
        overrides: Mapping[str, float] | None = None,
    ) -> "CompositePlate":
        """Build the effective plate from a layer stack.

        ``overrides`` maps parameter names (see OVERRIDABLE_PARAMETERS) to
        pinned values; everything not pinned is derived from the layers.
        An overridden Young's modulus or Poisson ratio propagates into the
        derived plate modulus unless that is itself pinned.
        """
        stack = tuple(layers)
        _require_layers(stack)
        ov = dict(overrides or {})
        for key in ov:
            if key not in OVERRIDABLE_PARAMETERS:
                raise ValueError(f"unknown override parameter {key!r}")

        e_eff = ov.get("young_modulus", effective_young_modulus(stack))
        nu_eff = ov.get("poisson_ratio", effective_poisson(stack))
        return cls(
            layers=stack,
            total_thickness=ov.get("total_thickness", total_thickness(stack)),
            young_modulus=e_eff,
            poisson_ratio=nu_eff,
            plate_modulus=ov.get("plate_modulus", plate_modulus(e_eff, nu_eff)),
            mass_per_area=ov.get("mass_per_area", mass_per_area(stack)),
            overrides=ov,
        )

    def computed(self) -> dict[str, float]:
        """Stack-derived effective parameters, ignoring any overrides."""
        e_eff = effective_young_modulus(self.layers)
        nu_eff = effective_poisson(self.layers)
        return {
            "total_thickness": total_thickness(self.layers),
            "young_modulus": e_eff,
            "poisson_ratio": nu_eff,
            "plate_modulus": plate_modulus(e_eff, nu_eff),
            "mass_per_area": mass_per_area(self.layers),
        }

    def bending_term(self, wavelength: float) -> float:
        """Bending stiffness (N/m) of this plate at the given wavelength."""
        return bending_term(self.plate_modulus, self.total_thickness, wavelength)

    def flexural_rigidity(self) -> float:
        """Raw flexural rigidity E' h^3 / 12 (N*m), for diagnostics."""
        return flexural_rigidity(self.plate_modulus, self.total_thickness)
