"""Analytic single-mode model of the nano-beam photonic-crystal cavity.

Coordinates: x along the beam, y across the beam width, z normal to the
slab; the origin sits at the centre of the central hole. The resonant mode
is modelled as a separable Gaussian in amplitude,

    g(r) = g_max * exp(-x^2/(2 sx^2) - y^2/(2 sy^2) - z^2/(2 sz^2)),

with the Table-style quantities (resonance wavelength, Q, mode volume)
taken as inputs rather than recomputed from geometry.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .constants import CONST, AtomSpecies, angular_frequency_from_wavelength
from .errors import DegenerateFieldError

DEFAULT_WAVELENGTH = 780e-9
DEFAULT_Q = 65_000.0
DEFAULT_MODE_VOLUME_LAMBDA3 = 0.08
# Gaussian 1/e amplitude-squared half-widths of the mode (model choices, not
# measured values): sx spans the four-hole taper region, sy/sz follow the
# beam half-width/half-height plus evanescent tails.
DEFAULT_MODE_WIDTHS = (450e-9, 160e-9, 140e-9)


@dataclass(frozen=True)
class BeamGeometry:
    """Suspended nano-beam with a 1D hole array.

    The hole layout is: central hole ``taper_radii[0]`` at x = 0, the
    remaining taper radii mirrored outward at pitch ``period``, then
    ``n_mirror_holes_per_side`` mirror holes of ``mirror_hole_radius``.
    Holes are cylinders along z through the full slab height.
    """

    width: float = 420e-9
    height: float = 250e-9
    period: float = 325e-9
    mirror_hole_radius: float = 91e-9
    taper_radii: tuple[float, ...] = (63e-9, 67e-9, 73e-9, 81e-9)
    n_mirror_holes_per_side: int = 11
    n_periods_per_side: int = 15

    def __post_init__(self):
        if min(self.width, self.height, self.period) <= 0:
            raise ValueError("beam dimensions must be positive")
        if self.mirror_hole_radius < 0 or any(r < 0 for r in self.taper_radii):
            raise ValueError("hole radii must be non-negative")
        for r in (*self.taper_radii, self.mirror_hole_radius):
            if r >= self.width / 2:
                raise ValueError(f"hole radius {r} must be smaller than half-width")
        if self.n_mirror_holes_per_side < 0 or self.n_periods_per_side <= 0:
            raise ValueError("hole/period counts must be positive")
        xs, rs = self.hole_layout()
        order = np.argsort(xs)
        xs, rs = xs[order], rs[order]
        gaps = np.diff(xs) - (rs[:-1] + rs[1:])
        if np.any(gaps < 0):
            raise ValueError("adjacent holes overlap")

    @property
    def half_length(self) -> float:
        return self.n_periods_per_side * self.period

    def hole_layout(self) -> tuple[np.ndarray, np.ndarray]:
        """All hole centre x-positions and radii (zero-radius holes dropped)."""
        xs = [0.0]
        rs = [self.taper_radii[0]]
        for k, r in enumerate(self.taper_radii[1:], start=1):
            xs += [k * self.period, -k * self.period]
            rs += [r, r]
        first_mirror = len(self.taper_radii)
        for k in range(first_mirror, first_mirror + self.n_mirror_holes_per_side):
            xs += [k * self.period, -k * self.period]
            rs += [self.mirror_hole_radius, self.mirror_hole_radius]
        xs, rs = np.asarray(xs), np.asarray(rs)
        keep = rs > 0
        return xs[keep], rs[keep]


def is_inside_dielectric(geometry: BeamGeometry, r) -> np.ndarray | bool:
    """True where a point lies in the solid beam material.

    Accepts a single position (3,) or a stack (n, 3); air holes and the
    space outside the slab count as vacuum.
    """
    r = np.asarray(r, dtype=float)
    single = r.ndim == 1
    pts = r.reshape(-1, 3)
    x, y, z = pts[:, 0], pts[:, 1], pts[:, 2]
    inside = (
        (np.abs(y) <= geometry.width / 2)
        & (np.abs(z) <= geometry.height / 2)
        & (np.abs(x) <= geometry.half_length)
    )
    if inside.any():
        xs, rs = geometry.hole_layout()
        # a point is in a hole if (x-xi)^2 + y^2 < ri^2 for any hole i
        d2 = (x[:, None] - xs[None, :]) ** 2 + y[:, None] ** 2
        in_hole = (d2 < rs[None, :] ** 2).any(axis=1)
        inside &= ~in_hole
    return bool(inside[0]) if single else inside


@dataclass(frozen=True)
class CavityModel:
    """Single-mode cavity: resonance, Q, mode volume and Gaussian widths."""

    omega_res: float
    quality_factor: float
    mode_volume: float
    mode_widths: tuple[float, float, float] = DEFAULT_MODE_WIDTHS
    geometry: BeamGeometry = field(default_factory=BeamGeometry)

    def __post_init__(self):
        if self.omega_res <= 0 or self.quality_factor <= 0 or self.mode_volume <= 0:
            raise ValueError("omega_res, Q and mode volume must be positive")
        if any(s <= 0 for s in self.mode_widths):
            raise ValueError("mode widths must be positive")

    @property
    def kappa(self) -> float:
        """Photon decay rate omega_res / Q (1/s)."""
        return self.omega_res / self.quality_factor

    @property
    def wavelength(self) -> float:
        return 2.0 * math.pi * CONST.c / self.omega_res


def default_cavity() -> CavityModel:
    lam = DEFAULT_WAVELENGTH
    return CavityModel(
        omega_res=angular_frequency_from_wavelength(lam),
        quality_factor=DEFAULT_Q,
        mode_volume=DEFAULT_MODE_VOLUME_LAMBDA3 * lam**3,
    )


@dataclass(frozen=True)
class ModeField:
    """Field-intensity samples on a regular grid (for mode-volume checks
    and user-imported FDTD exports).

    ``eps`` and ``intensity`` have shape (nx, ny, nz); cell i,j,k sits at
    origin + (i*dx, j*dy, k*dz).
    """

    origin: tuple[float, float, float]
    spacing: tuple[float, float, float]
    eps: np.ndarray
    intensity: np.ndarray

    def __post_init__(self):
        eps = np.asarray(self.eps, dtype=float)
        inten = np.asarray(self.intensity, dtype=float)
        if eps.shape != inten.shape or eps.ndim != 3:
            raise ValueError("eps and intensity must share a 3-D shape")
        if np.any(eps < 1.0):
            raise ValueError("relative permittivity must be >= 1 everywhere")
        if np.any(inten < 0.0):
            raise ValueError("intensity must be non-negative")
        if any(d <= 0 for d in self.spacing):
            raise ValueError("grid spacing must be positive")
        object.__setattr__(self, "eps", eps)
        object.__setattr__(self, "intensity", inten)


def mode_volume(fieldmap: ModeField) -> float:
    """Energy-density mode volume: sum(eps |E|^2) dV / max(eps |E|^2)."""
    w = fieldmap.eps * fieldmap.intensity
    peak = w.max()
    if peak <= 0.0:
        raise DegenerateFieldError("mode field carries no intensity")
    dv = math.prod(fieldmap.spacing)
    return float(w.sum() * dv / peak)


def g_max(cavity: CavityModel, atom: AtomSpecies) -> float:
    """Peak vacuum Rabi frequency sqrt(omega_res/(2 hbar eps0 V)) * d (rad/s)."""
    return math.sqrt(
        cavity.omega_res / (2.0 * CONST.hbar * CONST.eps0 * cavity.mode_volume)
    ) * atom.dipole


def mode_amplitude(cavity: CavityModel, r) -> np.ndarray | float:
    """Normalised Gaussian mode amplitude u(r), u(0) = 1.

    Accepts a single position (3,) or a stack (n, 3).
    """
    r = np.asarray(r, dtype=float)
    single = r.ndim == 1
    pts = r.reshape(-1, 3)
    sx, sy, sz = cavity.mode_widths
    arg = (
        pts[:, 0] ** 2 / (2 * sx**2)
        + pts[:, 1] ** 2 / (2 * sy**2)
        + pts[:, 2] ** 2 / (2 * sz**2)
    )
    u = np.exp(-arg)
    return float(u[0]) if single else u


def coupling_at(cavity: CavityModel, atom: AtomSpecies, r) -> np.ndarray | float:
    """Position-dependent vacuum Rabi frequency g(r) = g_max * u(r)."""
    return g_max(cavity, atom) * mode_amplitude(cavity, r)


def transit_time(cavity: CavityModel, sigma_v: float) -> float:
    """Interaction-time estimate h / sigma for an atom crossing the slab."""
    if sigma_v <= 0:
        raise ValueError("speed must be positive")
    return cavity.geometry.height / sigma_v


def cooperativity(g: float, kappa: float, gamma: float) -> float:
    """Single-atom cooperativity g / sqrt(kappa * gamma)."""
    if kappa <= 0 or gamma <= 0:
        raise ValueError("kappa and gamma must be positive")
    return g / math.sqrt(kappa * gamma)
