"""Atom trajectory sampling, ballistic propagation and pulse schedules.

Trajectories are straight lines r(t) = r0 + v0 (t - t_start): the
Casimir-Polder potential shifts levels but does not bend paths, and at
nanosecond transit times gravity is negligible. A trajectory segment ends
when the atom hits the dielectric, leaves the simulation box, or reaches
the time limit.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .casimir import CPField
from .cavity import BeamGeometry, CavityModel, coupling_at, is_inside_dielectric
from .constants import CONST, AtomSpecies
from .errors import ConfigurationError, InvalidStartError

MAX_SCHEDULE_DT = 1e-12     # schedules never coarser than 1 ps
TRANSIT_SAMPLES = 20        # minimum samples across the narrowest mode width


class Termination(enum.Enum):
    CRASHED_DEVICE = "crashed_device"
    LEFT_BOX = "left_box"
    MAX_TIME = "max_time"


@dataclass(frozen=True)
class Trajectory:
    r0: np.ndarray
    v0: np.ndarray
    t_start: float = 0.0
    t_end: float | None = None
    termination: Termination | None = None

    def __post_init__(self):
        object.__setattr__(self, "r0", np.asarray(self.r0, dtype=float))
        object.__setattr__(self, "v0", np.asarray(self.v0, dtype=float))
        if self.t_end is not None and self.t_end <= self.t_start:
            raise ValueError("t_end must exceed t_start")

    def position(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        return self.r0 + np.multiply.outer(t - self.t_start, self.v0)

    @property
    def speed(self) -> float:
        return float(np.linalg.norm(self.v0))


@dataclass(frozen=True)
class SimulationBox:
    """Axis-aligned box centred on the cavity, half extents in metres."""

    half_extents: tuple[float, float, float] = (2e-6, 1e-6, 1e-6)

    def __post_init__(self):
        if any(h <= 0 for h in self.half_extents):
            raise ConfigurationError("simulation box must have positive volume")

    def contains(self, r) -> np.ndarray | bool:
        r = np.asarray(r, dtype=float)
        single = r.ndim == 1
        pts = r.reshape(-1, 3)
        ok = np.all(np.abs(pts) <= np.asarray(self.half_extents), axis=1)
        return bool(ok[0]) if single else ok


@dataclass(frozen=True)
class WallSpec:
    """Desorption wall: plane z = offset, rectangular patch around x=y=0."""

    offset: float = -2e-6
    patch: tuple[float, float] = (4e-6, 4e-6)


class SamplerKind(enum.Enum):
    THERMAL_BOX = "thermal_box"
    LIAD_WALL = "liad_wall"
    FIXED = "fixed"
    DELAYED_PAIR = "delayed_pair"


@dataclass(frozen=True)
class EnsembleSpec:
    kind: SamplerKind = SamplerKind.LIAD_WALL
    temperature: float = 300.0
    count: int = 1
    seed: int = 0
    box: SimulationBox = field(default_factory=SimulationBox)
    wall: WallSpec = field(default_factory=WallSpec)

    def __post_init__(self):
        if self.count < 1:
            raise ConfigurationError("ensemble count must be >= 1")
        if self.kind in (SamplerKind.THERMAL_BOX, SamplerKind.LIAD_WALL) \
                and self.temperature <= 0:
            raise ConfigurationError("temperature must be positive")


def thermal_sigma(atom: AtomSpecies, temperature: float) -> float:
    """Per-component velocity spread sqrt(kB T / m)."""
    return math.sqrt(CONST.kB * temperature / atom.mass)


def sample_thermal(spec: EnsembleSpec, atom: AtomSpecies) -> list[Trajectory]:
    """Thermal gas entering through the box faces.

    Entry faces are chosen with probability proportional to their area (the
    per-area flux is face-independent at fixed T); the inward normal speed
    is flux-weighted (Rayleigh), tangential components are Gaussian.
    """
    if spec.kind is not SamplerKind.THERMAL_BOX:
        raise ConfigurationError("sample_thermal requires a thermal_box spec")
    rng = np.random.default_rng(spec.seed)
    sigma = thermal_sigma(atom, spec.temperature)
    hx, hy, hz = spec.box.half_extents
    areas = np.array([hy * hz, hy * hz, hx * hz, hx * hz, hx * hy, hx * hy])
    # faces: (axis, sign of the outward normal); entry velocity points inward
    faces = [(0, +1), (0, -1), (1, +1), (1, -1), (2, +1), (2, -1)]
    probs = areas / areas.sum()

    out = []
    for _ in range(spec.count):
        axis, sgn = faces[rng.choice(6, p=probs)]
        r0 = rng.uniform(-1.0, 1.0, size=3) * spec.box.half_extents
        r0[axis] = sgn * spec.box.half_extents[axis]
        v = rng.normal(0.0, sigma, size=3)
        v_n = sigma * math.sqrt(-2.0 * math.log(rng.uniform()))  # flux-weighted
        v[axis] = -sgn * v_n
        out.append(Trajectory(r0=r0, v0=v))
    return out


def sample_liad(spec: EnsembleSpec, atom: AtomSpecies) -> list[Trajectory]:
    """Atoms desorbed from the wall patch: Lambertian (cosine) directions
    about the wall normal, Maxwell-Boltzmann flux speeds."""
    if spec.kind is not SamplerKind.LIAD_WALL:
        raise ConfigurationError("sample_liad requires a liad_wall spec")
    rng = np.random.default_rng(spec.seed)
    sigma = thermal_sigma(atom, spec.temperature)
    normal_sign = 1.0 if spec.wall.offset < 0 else -1.0

    out = []
    for _ in range(spec.count):
        px = rng.uniform(-0.5, 0.5) * spec.wall.patch[0]
        py = rng.uniform(-0.5, 0.5) * spec.wall.patch[1]
        r0 = np.array([px, py, spec.wall.offset])
        u = rng.uniform()
        sin_t = math.sqrt(u)            # cosine (Lambertian) emission
        cos_t = math.sqrt(1.0 - u)
        phi = rng.uniform(0.0, 2.0 * math.pi)
        speed = sigma * math.sqrt(2.0 * rng.gamma(2.0))  # MB flux distribution
        v0 = speed * np.array([
            sin_t * math.cos(phi),
            sin_t * math.sin(phi),
            normal_sign * cos_t,
        ])
        out.append(Trajectory(r0=r0, v0=v0))
    return out


def validate_wall(spec: EnsembleSpec, geometry: BeamGeometry) -> None:
    if abs(spec.wall.offset) <= geometry.height / 2:
        raise ConfigurationError(
            f"LIAD wall plane z = {spec.wall.offset:g} m intersects the device slab")


def _bisect_crossing(predicate, t_ok: float, t_bad: float, resolution: float) -> float:
    """First-crossing time of a boolean predicate, bracketed to resolution."""
    while t_bad - t_ok > resolution:
        mid = 0.5 * (t_ok + t_bad)
        if predicate(mid):
            t_bad = mid
        else:
            t_ok = mid
    return t_bad


def propagate(
    traj: Trajectory,
    geometry: BeamGeometry,
    box: SimulationBox,
    dt: float,
    t_max: float,
) -> Trajectory:
    """Terminate a ballistic trajectory on crash, box exit, or time-out.

    The crossing time is refined by bisection to dt/100.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    if is_inside_dielectric(geometry, traj.r0):
        raise InvalidStartError(f"trajectory starts inside the dielectric at {traj.r0}")

    n = int(math.ceil(t_max / dt))
    times = traj.t_start + dt * np.arange(1, n + 1)
    times[-1] = traj.t_start + t_max
    pts = traj.position(times)
    crashed = is_inside_dielectric(geometry, pts)
    escaped = ~box.contains(pts)
    bad = crashed | escaped
    if not bad.any():
        return replace(traj, t_end=traj.t_start + t_max,
                       termination=Termination.MAX_TIME)

    k = int(np.argmax(bad))
    t_ok = times[k - 1] if k > 0 else traj.t_start
    if crashed[k]:
        term = Termination.CRASHED_DEVICE
        pred = lambda t: bool(is_inside_dielectric(geometry, traj.position(t)))
    else:
        term = Termination.LEFT_BOX
        pred = lambda t: not box.contains(traj.position(t))
    t_end = _bisect_crossing(pred, t_ok, times[k], dt / 100.0)
    return replace(traj, t_end=t_end, termination=term)


@dataclass(frozen=True)
class PulseSchedule:
    """Uniformly sampled g(t) and Casimir-Polder shift for one atom.

    Samples run from t0 at step dt; both channels are zero after the
    trajectory terminates (``active`` marks the pre-termination window).
    Consumers interpolate linearly and read zero outside the sampled range.
    """

    t0: float
    dt: float
    g: np.ndarray
    delta_cp: np.ndarray
    active: np.ndarray

    def __post_init__(self):
        if self.dt <= 0:
            raise ValueError("schedule dt must be positive")
        if np.any(self.g < 0):
            raise ValueError("coupling samples must be non-negative")
        if self.g.shape != self.delta_cp.shape or self.g.shape != self.active.shape:
            raise ValueError("schedule channels must share one length")

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(len(self.g))

    def shifted(self, delay: float) -> "PulseSchedule":
        """The same pulse arriving ``delay`` later."""
        return replace(self, t0=self.t0 + delay)

    def peak_coupling(self) -> float:
        return float(self.g.max(initial=0.0))


def default_schedule_dt(traj: Trajectory, cavity: CavityModel) -> float:
    """min(mode width) / (20 |v|), never coarser than 1 ps."""
    s_min = min(cavity.mode_widths)
    if traj.speed == 0.0:
        return MAX_SCHEDULE_DT
    return min(s_min / (TRANSIT_SAMPLES * traj.speed), MAX_SCHEDULE_DT)


def schedule_from_trajectory(
    traj: Trajectory,
    cavity: CavityModel,
    atom: AtomSpecies,
    cp: CPField | None,
    dt: float | None = None,
    t_grid_end: float | None = None,
) -> PulseSchedule:
    """Sample g(r(t)) and delta_cp(r(t)) along a terminated trajectory.

    The grid spans [t_start, max(t_end, t_grid_end)] so callers can embed
    the pulse in a longer observation window; samples past t_end are zero.
    """
    if traj.t_end is None:
        raise ValueError("trajectory must be terminated before scheduling")
    if dt is None:
        dt = default_schedule_dt(traj, cavity)
    for axis in range(3):
        v = abs(float(traj.v0[axis]))
        if v > 0 and dt > cavity.mode_widths[axis] / (TRANSIT_SAMPLES * v):
            raise ConfigurationError(
                f"schedule dt = {dt:g} s under-resolves the transit of trajectory "
                f"r0={traj.r0.tolist()}, v0={traj.v0.tolist()} along axis {axis} "
                f"(need <= {cavity.mode_widths[axis] / (TRANSIT_SAMPLES * v):g} s)")

    t_stop = traj.t_end if t_grid_end is None else max(t_grid_end, traj.t_end)
    n = int(math.ceil((t_stop - traj.t_start) / dt)) + 1
    times = traj.t_start + dt * np.arange(n)
    active = times < traj.t_end
    pts = traj.position(times[active])
    g = np.zeros(n)
    g[active] = coupling_at(cavity, atom, pts)
    delta = np.zeros(n)
    if cp is not None and active.any():
        delta[active] = cp.query(pts)
    return PulseSchedule(t0=traj.t_start, dt=dt, g=g, delta_cp=delta, active=active)
