"""Line-oriented device configuration files.

The format is deliberately minimal and diff-friendly: ``key = value``
lines grouped under ``[layer]`` (repeatable, stacking in order),
``[geometry]``, ``[com]`` and ``[override]`` sections. ``#`` starts a
comment. Unknown sections or keys are hard errors so unit mistakes
surface immediately. All values are SI.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .com_resonator import ComParameters, DeviceGeometry, design_spacing
from .plate_materials import OVERRIDABLE_PARAMETERS, CompositePlate, MaterialLayer


class ConfigError(ValueError):
    """Malformed device configuration; carries the offending line number."""

    def __init__(self, message: str, lineno: int | None = None):
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)
        self.lineno = lineno


_LAYER_KEYS = {"name", "thickness", "young_modulus", "poisson_ratio", "density"}
_LAYER_REQUIRED = {"thickness", "young_modulus", "poisson_ratio", "density"}
_GEOMETRY_KEYS = {
    "wavelength",
    "idt_pairs",
    "grating_strips",
    "overlap",
    "idt_separation",
    "spacing_index",
    "grating_gap",
    "metallization_ratio",
}
_GEOMETRY_INT_KEYS = {"idt_pairs", "grating_strips", "spacing_index"}
_COM_KEYS = {
    "velocity",
    "strip_reflectivity",
    "reflection_phase",
    "transduction_strength",
    "static_capacitance_per_pair",
    "attenuation",
}
_SECTIONS = {"layer", "geometry", "com", "override"}


@dataclass(frozen=True)
class DeviceConfig:
    """Parsed device description: layer stack, geometry, model parameters."""

    layers: tuple[MaterialLayer, ...]
    geometry: DeviceGeometry
    com_velocity: float | None
    com_settings: dict[str, float] = field(default_factory=dict)
    overrides: dict[str, float] = field(default_factory=dict)

    def plate(self) -> CompositePlate:
        """Effective composite plate, overrides applied."""
        if not self.layers:
            raise ConfigError("configuration defines no layers")
        return CompositePlate.from_layers(self.layers, self.overrides)

    def com_parameters(self, free_velocity: float | None = None) -> ComParameters:
        """COM parameter set at the given (or configured) free velocity."""
        velocity = free_velocity if free_velocity is not None else self.com_velocity
        if velocity is None:
            raise ConfigError(
                "no free velocity: configure [com] velocity or supply one"
            )
        return ComParameters(free_velocity=velocity, **self.com_settings)


def _parse_float(value: str, key: str, lineno: int) -> float:
    try:
        return float(value)
    except ValueError:
        raise ConfigError(f"malformed number {value!r} for key {key!r}", lineno)


def _parse_int(value: str, key: str, lineno: int) -> int:
    try:
        return int(value)
    except ValueError:
        raise ConfigError(f"malformed integer {value!r} for key {key!r}", lineno)


def parse_device_config(text: str) -> DeviceConfig:
    """Parse and validate a device configuration."""
    section: str | None = None
    layers: list[MaterialLayer] = []
    current_layer: dict[str, object] | None = None
    layer_lineno = 0
    geometry: dict[str, object] = {}
    com: dict[str, float] = {}
    overrides: dict[str, float] = {}

    def close_layer():
        nonlocal current_layer
        if current_layer is None:
            return
        missing = _LAYER_REQUIRED - current_layer.keys()
        if missing:
            raise ConfigError(
                f"[layer] section is missing {sorted(missing)}", layer_lineno
            )
        current_layer.setdefault("name", f"layer{len(layers) + 1}")
        try:
            layers.append(MaterialLayer(**current_layer))  # type: ignore[arg-type]
        except ValueError as exc:
            raise ConfigError(str(exc), layer_lineno) from None
        current_layer = None

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            name = line[1:-1].strip().lower()
            if name not in _SECTIONS:
                raise ConfigError(f"unknown section [{name}]", lineno)
            close_layer()
            section = name
            if name == "layer":
                current_layer = {}
                layer_lineno = lineno
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {raw.strip()!r}", lineno)
        if section is None:
            raise ConfigError("key outside of any section", lineno)
        key, _, value = line.partition("=")
        key = key.strip().lower()
        value = value.strip()
        if not value:
            raise ConfigError(f"empty value for key {key!r}", lineno)

        if section == "layer":
            if key not in _LAYER_KEYS:
                raise ConfigError(f"unknown [layer] key {key!r}", lineno)
            assert current_layer is not None
            if key in current_layer:
                raise ConfigError(f"duplicate [layer] key {key!r}", lineno)
            current_layer[key] = (
                value if key == "name" else _parse_float(value, key, lineno)
            )
        elif section == "geometry":
            if key not in _GEOMETRY_KEYS:
                raise ConfigError(f"unknown [geometry] key {key!r}", lineno)
            if key in geometry:
                raise ConfigError(f"duplicate [geometry] key {key!r}", lineno)
            geometry[key] = (
                _parse_int(value, key, lineno)
                if key in _GEOMETRY_INT_KEYS
                else _parse_float(value, key, lineno)
            )
        elif section == "com":
            if key not in _COM_KEYS:
                raise ConfigError(f"unknown [com] key {key!r}", lineno)
            if key in com:
                raise ConfigError(f"duplicate [com] key {key!r}", lineno)
            com[key] = _parse_float(value, key, lineno)
        elif section == "override":
            if key not in OVERRIDABLE_PARAMETERS:
                raise ConfigError(f"unknown [override] key {key!r}", lineno)
            if key in overrides:
                raise ConfigError(f"duplicate [override] key {key!r}", lineno)
            overrides[key] = _parse_float(value, key, lineno)
    close_layer()

    if "wavelength" not in geometry:
        raise ConfigError("missing required [geometry] key 'wavelength'")
    if "spacing_index" in geometry and "grating_gap" in geometry:
        raise ConfigError(
            "specify either [geometry] spacing_index or grating_gap, not both"
        )
    spacing_index = geometry.pop("spacing_index", 0)
    if "grating_gap" not in geometry:
        geometry["grating_gap"] = design_spacing(
            spacing_index, geometry["wavelength"]
        )

    com_velocity = com.pop("velocity", None)
    try:
        device_geometry = DeviceGeometry(**geometry)  # type: ignore[arg-type]
        if com_velocity is not None:
            # Validate the COM settings eagerly against a real velocity.
            ComParameters(free_velocity=com_velocity, **com)
        else:
            ComParameters(free_velocity=1.0, **com)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None

    return DeviceConfig(
        layers=tuple(layers),
        geometry=device_geometry,
        com_velocity=com_velocity,
        com_settings=com,
        overrides=overrides,
    )


def parse_density(token: str) -> float:
    """Density token in kg/m^3, accepting a ``g/cm3`` suffix."""
    text = token.strip()
    for suffix, factor in (("g/cm3", 1000.0), ("kg/m3", 1.0)):
        if text.lower().endswith(suffix):
            return float(text[: -len(suffix)]) * factor
    return float(text)


def parse_calibration_points(text: str) -> list[tuple[float, float]]:
    """Parse ``density frequency`` calibration lines.

    Frequencies in Hz; densities in kg/m^3 unless suffixed ``g/cm3``.
    ``#`` starts a comment.
    """
    points: list[tuple[float, float]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        if len(fields) != 2:
            raise ValueError(
                f"points file line {lineno}: expected 'density frequency', "
                f"got {raw!r}"
            )
        try:
            points.append((parse_density(fields[0]), float(fields[1])))
        except ValueError as exc:
            raise ValueError(f"points file line {lineno}: {exc}") from None
    return points
