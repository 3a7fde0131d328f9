import math

import numpy as np
import pytest
import scipy.constants as sc

from atomcavity.cavity import (
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
from atomcavity.constants import default_rubidium, rms_thermal_speed
from atomcavity.errors import DegenerateFieldError


@pytest.fixture(scope="module")
def cavity():
    return default_cavity()


@pytest.fixture(scope="module")
def atom():
    return default_rubidium()


# --- geometry -------------------------------------------------------------

def test_default_geometry_values():
    g = BeamGeometry()
    assert g.width == 420e-9 and g.height == 250e-9 and g.period == 325e-9
    assert g.mirror_hole_radius == 91e-9
    assert g.taper_radii == (63e-9, 67e-9, 73e-9, 81e-9)


def test_geometry_rejects_bad_holes():
    with pytest.raises(ValueError):
        BeamGeometry(taper_radii=(250e-9, 67e-9, 73e-9, 81e-9))  # > width/2
    with pytest.raises(ValueError):
        BeamGeometry(period=100e-9)  # adjacent 91 nm holes overlap


def test_zero_radius_holes_vanish():
    g = BeamGeometry(taper_radii=(0.0, 67e-9, 73e-9, 81e-9))
    xs, rs = g.hole_layout()
    assert 0.0 not in xs  # the central hole disappeared
    assert np.all(rs > 0)


def test_inside_dielectric_examples(cavity):
    geo = cavity.geometry
    # centre of the central hole is air
    assert not is_inside_dielectric(geo, (0.0, 0.0, 0.0))
    # midway between two mirror holes is solid
    x_mid = 4.5 * geo.period
    assert is_inside_dielectric(geo, (x_mid, 0.0, 0.0))
    # above the slab is vacuum
    assert not is_inside_dielectric(geo, (0.0, 0.0, geo.height))
    # solid beam between holes, off the hole line
    assert is_inside_dielectric(geo, (0.0, 150e-9, 0.0))
    # outside the width
    assert not is_inside_dielectric(geo, (0.0, 300e-9, 0.0))
    # vectorised form agrees
    pts = np.array([[0, 0, 0], [x_mid, 0, 0], [0, 0, geo.height]])
    assert list(is_inside_dielectric(geo, pts)) == [False, True, False]


# --- mode volume ----------------------------------------------------------

def test_mode_volume_uniform_box():
    shape = (10, 8, 6)
    spacing = (1e-8, 2e-8, 3e-8)
    field = ModeField(origin=(0, 0, 0), spacing=spacing,
                      eps=np.ones(shape), intensity=np.ones(shape))
    v0 = math.prod(shape) * math.prod(spacing)
    assert mode_volume(field) == pytest.approx(v0, rel=1e-12)


def test_mode_volume_gaussian_closed_form():
    sx, sy, sz = 120e-9, 90e-9, 70e-9
    axes = [np.arange(-5 * s, 5 * s + 1e-12, s / 10) for s in (sx, sy, sz)]
    gx, gy, gz = np.meshgrid(*axes, indexing="ij")
    inten = np.exp(-gx**2 / sx**2 - gy**2 / sy**2 - gz**2 / sz**2)
    field = ModeField(origin=tuple(a[0] for a in axes),
                      spacing=(sx / 10, sy / 10, sz / 10),
                      eps=np.ones_like(inten), intensity=inten)
    expect = math.pi**1.5 * sx * sy * sz
    assert mode_volume(field) == pytest.approx(expect, rel=0.01)


def test_mode_volume_max_in_dielectric_region():
    rng = np.random.default_rng(3)
    shape = (7, 7, 7)
    eps = np.ones(shape)
    eps[2:5, 2:5, 2:5] = 4.2
    inten = rng.uniform(0.0, 0.5, shape)
    inten[3, 3, 3] = 1.0  # global max of eps*I sits inside the eps=4.2 block
    field = ModeField(origin=(0, 0, 0), spacing=(1e-8, 1e-8, 1e-8),
                      eps=eps, intensity=inten)
    # brute-force oracle over all cells
    w = eps * inten
    denom = max(w.ravel())
    assert denom == pytest.approx(4.2, rel=1e-12)
    expect = w.sum() * 1e-24 / denom
    assert mode_volume(field) == pytest.approx(expect, rel=1e-12)


def test_mode_volume_scale_invariant():
    rng = np.random.default_rng(5)
    inten = rng.uniform(0, 1, (5, 5, 5))
    field = ModeField(origin=(0, 0, 0), spacing=(1e-8, 1e-8, 1e-8),
                      eps=np.ones((5, 5, 5)), intensity=inten)
    field2 = ModeField(origin=(0, 0, 0), spacing=(1e-8, 1e-8, 1e-8),
                       eps=np.ones((5, 5, 5)), intensity=1234.5 * inten)
    assert mode_volume(field) == pytest.approx(mode_volume(field2), rel=1e-12)


def test_mode_volume_degenerate():
    field = ModeField(origin=(0, 0, 0), spacing=(1e-8, 1e-8, 1e-8),
                      eps=np.ones((3, 3, 3)), intensity=np.zeros((3, 3, 3)))
    with pytest.raises(DegenerateFieldError):
        mode_volume(field)


def test_mode_field_validation():
    with pytest.raises(ValueError):
        ModeField(origin=(0, 0, 0), spacing=(1e-8,) * 3,
                  eps=0.5 * np.ones((3, 3, 3)), intensity=np.ones((3, 3, 3)))
    with pytest.raises(ValueError):
        ModeField(origin=(0, 0, 0), spacing=(1e-8,) * 3,
                  eps=np.ones((3, 3, 3)), intensity=-np.ones((3, 3, 3)))


# --- coupling -------------------------------------------------------------

def test_g_max_independent_oracle(cavity, atom):
    # scalar evaluation with scipy's constants, independent of the package
    lam = 780e-9
    v = 0.08 * lam**3
    omega = 2 * math.pi * sc.c / lam
    expect = math.sqrt(omega / (2 * sc.hbar * sc.epsilon_0 * v)) * 3.584e-29
    assert g_max(cavity, atom) == pytest.approx(expect, rel=1e-9)
    assert g_max(cavity, atom) == pytest.approx(2.09e11, rel=5e-3)


def test_g_max_scalings(cavity, atom):
    import dataclasses
    big = dataclasses.replace(cavity, mode_volume=4 * cavity.mode_volume)
    assert g_max(big, atom) == pytest.approx(0.5 * g_max(cavity, atom), rel=1e-12)
    # g^2 V independent of V
    assert g_max(big, atom) ** 2 * big.mode_volume == pytest.approx(
        g_max(cavity, atom) ** 2 * cavity.mode_volume, rel=1e-12)
    zero_dipole = dataclasses.replace(atom, dipole=1e-300)
    assert g_max(cavity, zero_dipole) < 1e-200


def test_coupling_at_gaussian(cavity, atom):
    gm = g_max(cavity, atom)
    assert coupling_at(cavity, atom, (0.0, 0.0, 0.0)) == pytest.approx(gm, rel=1e-12)
    sz = cavity.mode_widths[2]
    # amplitude convention: g/sqrt(2) at sz*sqrt(ln 2), g/2 at sz*sqrt(2 ln 2)
    r = (0.0, 0.0, sz * math.sqrt(math.log(2)))
    assert coupling_at(cavity, atom, r) == pytest.approx(gm / math.sqrt(2), rel=1e-12)
    r_half = (0.0, 0.0, sz * math.sqrt(2 * math.log(2)))
    assert coupling_at(cavity, atom, r_half) == pytest.approx(gm / 2, rel=1e-12)
    far = coupling_at(cavity, atom, (0.0, 0.0, 50 * sz))
    assert far < 1e-300 * gm or far == 0.0


def test_coupling_symmetry_and_monotonicity(cavity, atom):
    rng = np.random.default_rng(11)
    for _ in range(25):
        r = rng.uniform(-400e-9, 400e-9, 3)
        g0 = coupling_at(cavity, atom, r)
        for axis in range(3):
            flipped = r.copy()
            flipped[axis] *= -1
            assert coupling_at(cavity, atom, flipped) == pytest.approx(g0, rel=1e-12)
            farther = r.copy()
            farther[axis] = math.copysign(abs(r[axis]) + 50e-9, r[axis])
            assert coupling_at(cavity, atom, farther) < g0
    # mode_amplitude is the normalised profile
    assert mode_amplitude(cavity, (0.0, 0.0, 0.0)) == 1.0


# --- transit time and cooperativity ----------------------------------------

def test_transit_time_values(cavity, atom):
    sigma = rms_thermal_speed(atom, 300.0)
    assert sigma == pytest.approx(294.0, rel=5e-3)
    tau = transit_time(cavity, sigma)
    assert tau == pytest.approx(0.85e-9, rel=0.01)
    assert transit_time(cavity, 2 * sigma) == pytest.approx(tau / 2, rel=1e-12)
    with pytest.raises(ValueError):
        transit_time(cavity, 0.0)


def test_cooperativity(cavity, atom):
    assert cooperativity(1.0, 1.0, 1.0) == 1.0
    # direct scalar evaluation of the ratio at the quoted inputs
    g = 2 * math.pi * 15e9
    expect = g / math.sqrt(4e10 * 3.81e7)
    assert cooperativity(g, 4e10, 3.81e7) == pytest.approx(expect, rel=1e-12)
    assert cooperativity(g, 4e10, 3.81e7) == pytest.approx(76.3, rel=1e-2)
    assert cooperativity(5.0, 2.0, 3.0) == pytest.approx(5 * cooperativity(1.0, 2.0, 3.0))
    with pytest.raises(ValueError):
        cooperativity(1.0, 0.0, 1.0)


def test_kappa_from_q(cavity):
    assert cavity.kappa == pytest.approx(cavity.omega_res / cavity.quality_factor,
                                         rel=1e-12)
    assert cavity.kappa == pytest.approx(3.72e10, rel=2e-3)
    # within 10% of the nominal 4e10 1/s
    assert abs(cavity.kappa - 4e10) / 4e10 < 0.10


def test_cavity_validation():
    with pytest.raises(ValueError):
        CavityModel(omega_res=-1.0, quality_factor=1e4, mode_volume=1e-20)
    with pytest.raises(ValueError):
        CavityModel(omega_res=1.0, quality_factor=1e4, mode_volume=1e-20,
                    mode_widths=(0.0, 1e-9, 1e-9))
