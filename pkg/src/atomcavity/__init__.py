"""Monte-Carlo simulator of thermal atoms coupled to a nano-beam
photonic-crystal cavity: position-dependent Jaynes-Cummings dynamics with
Casimir-Polder level shifts, trajectory ensembles and detuning sweeps."""

__version__ = "0.1.0"

from .constants import (
    CONST,
    AtomSpecies,
    PhysicalConstants,
    angular_frequency_from_wavelength,
    default_rubidium,
    rms_thermal_speed,
    wavelength_from_angular_frequency,
)
from .cavity import (
    BeamGeometry,
    CavityModel,
    ModeField,
    cooperativity,
    coupling_at,
    default_cavity,
    g_max,
    is_inside_dielectric,
    mode_amplitude,
    mode_volume,
    transit_time,
)

__all__ = [
    "CONST",
    "AtomSpecies",
    "BeamGeometry",
    "CavityModel",
    "ModeField",
    "PhysicalConstants",
    "__version__",
    "angular_frequency_from_wavelength",
    "cooperativity",
    "coupling_at",
    "default_cavity",
    "default_rubidium",
    "g_max",
    "is_inside_dielectric",
    "mode_amplitude",
    "mode_volume",
    "rms_thermal_speed",
    "transit_time",
    "wavelength_from_angular_frequency",
]
