"""Flexural plate wave resonator simulation and liquid density sensing."""

from .plate_materials import (
    CompositePlate,
    MaterialLayer,
    bending_term,
    effective_poisson,
    effective_young_modulus,
    flexural_rigidity,
    mass_per_area,
    plate_modulus,
    total_thickness,
)
from .fpw_dispersion import (
    ConvergenceError,
    LiquidLoad,
    LoadingState,
    NoSolutionError,
    VelocitySolution,
    density_from_frequency,
    evanescent_decay_length,
    loaded_velocity,
    resonant_frequency,
    sensitivities,
    unloaded_velocity,
    viscous_mass,
)
from .com_resonator import (
    ComParameters,
    DeviceGeometry,
    FrequencyResponse,
    NoResonanceError,
    ResonanceSummary,
    array_factor,
    cascade,
    design_spacing,
    find_resonance,
    fpw_device_response,
    grating_matrix,
    grating_scattering,
    idt_matrix,
    s21_sweep,
    spacing_matrix,
    write_sweep_csv,
)
from .liquid_sensing import (
    CalibrationFit,
    CouplingReport,
    DegenerateFitError,
    LiquidSample,
    Measurement,
    PRESET_LIQUIDS,
    fit_density_sensitivity,
    invert_density_calibrated,
    load_liquid_library,
    load_reference_datasets,
    predict_frequency,
    tension_effect,
    viscosity_coupling_report,
)
from .config import ConfigError, DeviceConfig, parse_device_config

__version__ = "0.1.0"
