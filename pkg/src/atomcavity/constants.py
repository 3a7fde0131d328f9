"""Physical constants and the rubidium D2 reference dataset.

Unit conventions used throughout the library:
  * every frequency and rate is ANGULAR (rad/s); conversion to ordinary
    frequency (Hz, GHz) happens only at the CLI/report boundary,
  * lengths in metres, times in seconds, masses in kilograms.

``gamma`` is the population decay rate of the excited state (1/s), i.e. the
rate that multiplies the atomic dissipator in the master equation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

TWO_PI = 2.0 * math.pi

_C = 299792458.0            # m/s, exact
_MU0 = 1.25663706212e-6     # H/m, CODATA 2018
_HBAR = 1.054571817e-34     # J s
_KB = 1.380649e-23          # J/K, exact


@dataclass(frozen=True)
class PhysicalConstants:
    """SI constants; eps0 is derived from (mu0, c) so c^2*eps0*mu0 == 1."""

    hbar: float = _HBAR
    c: float = _C
    mu0: float = _MU0
    kB: float = _KB
    eps0: float = field(default=1.0 / (_MU0 * _C * _C))

    def __post_init__(self):
        for name in ("hbar", "c", "mu0", "kB", "eps0"):
            if getattr(self, name) <= 0:
                raise ValueError(f"constant {name} must be positive")
        closure = self.c * self.c * self.eps0 * self.mu0
        if abs(closure - 1.0) > 1e-12:
            raise ValueError(f"c^2*eps0*mu0 = {closure!r} deviates from 1")


CONST = PhysicalConstants()


@dataclass(frozen=True)
class AtomSpecies:
    """Two-level emitter: D2-line data for a single alkali species.

    omega_a : transition angular frequency (rad/s)
    dipole  : transition dipole moment (C m)
    gamma   : excited-state population decay rate (1/s)
    """

    mass: float
    omega_a: float
    dipole: float
    gamma: float
    name: str = ""

    def __post_init__(self):
        if self.mass <= 0 or self.omega_a <= 0 or self.dipole <= 0 or self.gamma <= 0:
            raise ValueError("AtomSpecies requires positive mass, omega_a, dipole, gamma")


def angular_frequency_from_wavelength(lam: float) -> float:
    """2*pi*c / lambda, with lambda in metres."""
    if lam <= 0:
        raise ValueError(f"wavelength must be positive, got {lam!r}")
    return TWO_PI * CONST.c / lam


def wavelength_from_angular_frequency(omega: float) -> float:
    if omega <= 0:
        raise ValueError(f"angular frequency must be positive, got {omega!r}")
    return TWO_PI * CONST.c / omega


def default_rubidium() -> AtomSpecies:
    """Rb-87 D2 dataset (mass 1.443e-25 kg, d = 3.584e-29 C m,
    Gamma = 2*pi*6.066 MHz, lambda = 780 nm)."""
    return AtomSpecies(
        mass=1.443e-25,
        omega_a=angular_frequency_from_wavelength(780e-9),
        dipole=3.584e-29,
        gamma=TWO_PI * 6.066e6,
        name="Rb-87",
    )


def rms_thermal_speed(atom: AtomSpecies, temperature: float) -> float:
    """Root-mean-square speed sqrt(3 kB T / m) of a thermal gas."""
    if temperature <= 0:
        raise ValueError("temperature must be positive")
    return math.sqrt(3.0 * CONST.kB * temperature / atom.mass)
