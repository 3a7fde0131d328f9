"""Run configuration: a strict, human-editable YAML schema.

Every CLI-facing quantity uses bench units (nm, ns, GHz, m/s, K); the
conversion to internal SI/angular units happens in the resolve_* helpers
and nowhere else. Unknown keys are rejected so typos fail loudly, and
``RunConfig.to_dict`` round-trips losslessly through YAML. The defaults
reproduce the central-transit preset (fig4a).
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Union, get_args, get_origin, get_type_hints

import yaml

from .casimir import CPField, LorentzianGreen, Polarizability, build_cp_field
from .cavity import BeamGeometry, CavityModel, g_max
from .constants import TWO_PI, AtomSpecies, angular_frequency_from_wavelength
from .ensemble import SweepSpec
from .errors import ConfigurationError
from .presets import default_detuning_grid
from .trajectories import EnsembleSpec, SamplerKind, SimulationBox, WallSpec

GHZ = TWO_PI * 1e9      # rad/s per GHz
NM = 1e-9
NS = 1e-9
UM = 1e-6


@dataclass(frozen=True)
class GeometryConfig:
    width_nm: float = 420.0
    height_nm: float = 250.0
    period_nm: float = 325.0
    mirror_hole_radius_nm: float = 91.0
    taper_radii_nm: tuple[float, ...] = (63.0, 67.0, 73.0, 81.0)
    n_mirror_holes_per_side: int = 11
    n_periods_per_side: int = 15


@dataclass(frozen=True)
class CavityConfig:
    wavelength_nm: float = 780.0
    quality_factor: float = 65000.0
    mode_volume_lambda3: float = 0.08
    mode_widths_nm: tuple[float, float, float] = (450.0, 160.0, 140.0)
    geometry: GeometryConfig = field(default_factory=GeometryConfig)


@dataclass(frozen=True)
class AtomConfig:
    species: str = "Rb-87"
    # optional overrides of the built-in dataset
    mass_kg: Optional[float] = None
    wavelength_nm: Optional[float] = None
    dipole_Cm: Optional[float] = None
    gamma_mhz: Optional[float] = None        # ordinary MHz, Gamma/2pi


@dataclass(frozen=True)
class SamplerConfig:
    kind: str = "liad"                        # thermal | liad
    temperature_k: float = 300.0
    count: int = 2000
    wall_offset_um: float = -2.0
    wall_patch_um: tuple[float, float] = (4.0, 4.0)
    box_half_extents_um: tuple[float, float, float] = (2.5, 2.5, 2.5)


@dataclass(frozen=True)
class SweepConfig:
    detuning_span_g: float = 3.0        # grid covers +- span * g_max
    n_detunings: int = 201
    t_obs_ns: float = 10.0
    n_time_samples: int = 201
    photon_cutoff: int = 4
    eps_p_over_kappa: float = 0.05
    rtol: float = 1e-8
    atol: float = 1e-10
    normalization: str = "empty_cavity"


@dataclass(frozen=True)
class CPConfig:
    enabled: bool = True
    grid_spacing_nm: float = 10.0
    cache_file: Optional[str] = None


@dataclass(frozen=True)
class RunConfig:
    seed: int = 1234
    output_dir: str = "runs/out"
    workers: int = 1
    box_half_extents_um: tuple[float, float, float] = (2.0, 1.0, 1.0)
    cavity: CavityConfig = field(default_factory=CavityConfig)
    atom: AtomConfig = field(default_factory=AtomConfig)
    sampler: SamplerConfig = field(default_factory=SamplerConfig)
    sweep: SweepConfig = field(default_factory=SweepConfig)
    cp: CPConfig = field(default_factory=CPConfig)

    def to_dict(self) -> dict:
        def clean(obj):
            if dataclasses.is_dataclass(obj):
                return {f.name: clean(getattr(obj, f.name))
                        for f in dataclasses.fields(obj)}
            if isinstance(obj, tuple):
                return [clean(v) for v in obj]
            return obj
        return clean(self)


def _coerce(ftype, value, path):
    origin = get_origin(ftype)
    if origin is None and dataclasses.is_dataclass(ftype):
        return _from_mapping(ftype, value, path)
    if ftype is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigurationError(f"{path}: expected a number, got {value!r}")
        return float(value)
    if ftype is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigurationError(f"{path}: expected an integer, got {value!r}")
        return value
    if ftype is str:
        if not isinstance(value, str):
            raise ConfigurationError(f"{path}: expected a string, got {value!r}")
        return value
    if ftype is bool:
        if not isinstance(value, bool):
            raise ConfigurationError(f"{path}: expected true/false, got {value!r}")
        return value
    if origin is tuple:
        if not isinstance(value, (list, tuple)):
            raise ConfigurationError(f"{path}: expected a list, got {value!r}")
        args = get_args(ftype)
        elem = args[0]
        if len(args) == 2 and args[1] is Ellipsis:
            return tuple(_coerce(elem, v, f"{path}[{i}]") for i, v in enumerate(value))
        if len(value) != len(args):
            raise ConfigurationError(f"{path}: expected {len(args)} entries")
        return tuple(_coerce(a, v, f"{path}[{i}]")
                     for i, (a, v) in enumerate(zip(args, value)))
    if origin is Union:
        args = get_args(ftype)
        if value is None and type(None) in args:
            return None
        inner = [a for a in args if a is not type(None)]
        if len(inner) == 1:
            return _coerce(inner[0], value, path)
    raise ConfigurationError(f"{path}: unsupported config field type {ftype!r}")


def _from_mapping(cls, data, path=""):
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigurationError(f"{path or 'config'}: expected a mapping, got {data!r}")
    hints = get_type_hints(cls)
    names = {f.name for f in dataclasses.fields(cls)}
    unknown = sorted(set(data) - names)
    if unknown:
        raise ConfigurationError(
            f"unknown config key(s) {unknown} under {path or 'top level'}")
    kwargs = {}
    for name, value in data.items():
        kwargs[name] = _coerce(hints[name], value, f"{path}.{name}" if path else name)
    return cls(**kwargs)


def config_from_dict(data: dict) -> RunConfig:
    return _from_mapping(RunConfig, data)


def load_config(path: str | Path) -> RunConfig:
    with open(path) as fh:
        data = yaml.safe_load(fh)
    return config_from_dict(data or {})


def dump_config(cfg: RunConfig, path: str | Path) -> None:
    with open(path, "w") as fh:
        yaml.safe_dump(cfg.to_dict(), fh, sort_keys=False)


# resolution into domain objects ------------------------------------------

def resolve_geometry(cfg: GeometryConfig) -> BeamGeometry:
    return BeamGeometry(
        width=cfg.width_nm * NM,
        height=cfg.height_nm * NM,
        period=cfg.period_nm * NM,
        mirror_hole_radius=cfg.mirror_hole_radius_nm * NM,
        taper_radii=tuple(r * NM for r in cfg.taper_radii_nm),
        n_mirror_holes_per_side=cfg.n_mirror_holes_per_side,
        n_periods_per_side=cfg.n_periods_per_side,
    )


def resolve_cavity(cfg: CavityConfig) -> CavityModel:
    lam = cfg.wavelength_nm * NM
    return CavityModel(
        omega_res=angular_frequency_from_wavelength(lam),
        quality_factor=cfg.quality_factor,
        mode_volume=cfg.mode_volume_lambda3 * lam**3,
        mode_widths=tuple(s * NM for s in cfg.mode_widths_nm),
        geometry=resolve_geometry(cfg.geometry),
    )


def resolve_atom(cfg: AtomConfig) -> AtomSpecies:
    if cfg.species != "Rb-87":
        raise ConfigurationError(
            f"unknown atom species {cfg.species!r}; built-in dataset: 'Rb-87'")
    from .constants import default_rubidium
    base = default_rubidium()
    return AtomSpecies(
        mass=cfg.mass_kg if cfg.mass_kg is not None else base.mass,
        omega_a=(angular_frequency_from_wavelength(cfg.wavelength_nm * NM)
                 if cfg.wavelength_nm is not None else base.omega_a),
        dipole=cfg.dipole_Cm if cfg.dipole_Cm is not None else base.dipole,
        gamma=(TWO_PI * cfg.gamma_mhz * 1e6
               if cfg.gamma_mhz is not None else base.gamma),
        name=cfg.species,
    )


def resolve_box(cfg: RunConfig) -> SimulationBox:
    return SimulationBox(half_extents=tuple(h * UM for h in cfg.box_half_extents_um))


def resolve_sampler(cfg: SamplerConfig, seed: int) -> EnsembleSpec:
    kinds = {"thermal": SamplerKind.THERMAL_BOX, "liad": SamplerKind.LIAD_WALL}
    if cfg.kind not in kinds:
        raise ConfigurationError(
            f"sampler kind must be one of {sorted(kinds)}, got {cfg.kind!r}")
    return EnsembleSpec(
        kind=kinds[cfg.kind],
        temperature=cfg.temperature_k,
        count=cfg.count,
        seed=seed,
        box=SimulationBox(half_extents=tuple(h * UM for h in cfg.box_half_extents_um)),
        wall=WallSpec(offset=cfg.wall_offset_um * UM,
                      patch=tuple(p * UM for p in cfg.wall_patch_um)),
    )


def resolve_sweep(cfg: SweepConfig, cavity: CavityModel,
                  atom: AtomSpecies) -> SweepSpec:
    grid = default_detuning_grid(g_max(cavity, atom), cfg.n_detunings,
                                 cfg.detuning_span_g)
    return SweepSpec(
        delta_cl=grid,
        t_obs=cfg.t_obs_ns * NS,
        n_time_samples=cfg.n_time_samples,
        photon_cutoff=cfg.photon_cutoff,
        eps_p_over_kappa=cfg.eps_p_over_kappa,
        rtol=cfg.rtol,
        atol=cfg.atol,
        normalization=cfg.normalization,
    )


def resolve_cp_field(cfg: CPConfig, cavity: CavityModel,
                     atom: AtomSpecies) -> CPField | None:
    if not cfg.enabled:
        return None
    from .fieldio import load_cp_field
    model = LorentzianGreen.calibrated(cavity)
    pol = Polarizability.from_atom(atom)
    if cfg.cache_file is not None and Path(cfg.cache_file).exists():
        from .casimir import model_key
        return load_cp_field(cfg.cache_file, expected_key=model_key(model, pol))
    sx, sy, sz = cavity.mode_widths
    return build_cp_field(
        model, pol,
        half_extents=(2 * sx, 2 * sy, 2 * sz),
        spacing=cfg.grid_spacing_nm * NM,
        geometry=cavity.geometry,
        min_spacing_scale=min(cavity.mode_widths),
    )
