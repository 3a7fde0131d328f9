"""CSV and manifest emission.

CSV schemas (bench units on every user-facing surface):

  map.csv        t_ns, delta_ghz, photon
  spectrum.csv   delta_ghz, mean, stderr, n
  timeavg.csv    delta_ghz, mean_photon, baseline_photon
  trace.csv      t_ns, photon, atom_excitation_<i>..., g<i>_ghz...
  trajectories.csv  index, x0_nm, y0_nm, z0_nm, vx_m_s, vy_m_s, vz_m_s,
                    termination, t_end_ns
  cp_rays.csv    ray, coord_nm, shift_mhz
  schedule.csv   t_ns, g_ghz, delta_cp_mhz

Floats are written with %.17g so reruns reproduce files byte for byte.
"""

from __future__ import annotations

import hashlib
import json
import platform
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .constants import TWO_PI
from .ensemble import SingleRunResult, SpectrumResult
from .trajectories import PulseSchedule, Trajectory

GHZ = TWO_PI * 1e9
MHZ = TWO_PI * 1e6
MANIFEST_SCHEMA = 1
_F = "%.17g"


def _fmt(value) -> str:
    if isinstance(value, (float, np.floating)):
        return _F % value
    return str(value)


def write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def write_map_csv(path: Path, result: SingleRunResult) -> None:
    rows = []
    for i, t in enumerate(result.times):
        for j, d in enumerate(result.delta_cl):
            rows.append((t * 1e9, d / GHZ, result.photon_map[i, j]))
    write_csv(path, ["t_ns", "delta_ghz", "photon"], rows)


def write_timeavg_csv(path: Path, result: SingleRunResult) -> None:
    rows = [(d / GHZ, result.time_avg[j], result.baseline[j])
            for j, d in enumerate(result.delta_cl)]
    write_csv(path, ["delta_ghz", "mean_photon", "baseline_photon"], rows)


def write_trace_csv(path: Path, result: SingleRunResult) -> None:
    n_atoms = result.g_of_t.shape[1]
    header = ["t_ns", "photon"]
    header += [f"atom_excitation_{i+1}" for i in range(n_atoms)]
    header += [f"g{i+1}_ghz" for i in range(n_atoms)]
    rows = []
    for i, t in enumerate(result.times):
        row = [t * 1e9, result.zero_trace[i]]
        row += [result.zero_excitation[i, k] for k in range(n_atoms)]
        row += [result.g_of_t[i, k] / GHZ for k in range(n_atoms)]
        rows.append(row)
    write_csv(path, header, rows)


def write_spectrum_csv(path: Path, spectrum: list[SpectrumResult]) -> None:
    rows = [(s.delta_cl / GHZ, s.mean_photon, s.std_error, s.n_samples)
            for s in spectrum]
    write_csv(path, ["delta_ghz", "mean", "stderr", "n"], rows)


def write_trajectories_csv(path: Path, trajectories: list[Trajectory]) -> None:
    rows = []
    for i, tr in enumerate(trajectories):
        term = tr.termination.value if tr.termination else ""
        t_end = tr.t_end * 1e9 if tr.t_end is not None else float("nan")
        rows.append((i, tr.r0[0] * 1e9, tr.r0[1] * 1e9, tr.r0[2] * 1e9,
                     tr.v0[0], tr.v0[1], tr.v0[2], term, t_end))
    write_csv(path, ["index", "x0_nm", "y0_nm", "z0_nm",
                     "vx_m_s", "vy_m_s", "vz_m_s", "termination", "t_end_ns"],
              rows)


def write_cp_rays_csv(path: Path, rays: dict[str, tuple[np.ndarray, np.ndarray]]) -> None:
    rows = []
    for name, (coords, shifts) in rays.items():
        for c, s in zip(coords, shifts):
            rows.append((name, c * 1e9, s / MHZ))
    write_csv(path, ["ray", "coord_nm", "shift_mhz"], rows)


def write_schedule_csv(path: Path, sched: PulseSchedule) -> None:
    rows = [(t * 1e9, g / GHZ, d / MHZ)
            for t, g, d in zip(sched.times, sched.g, sched.delta_cp)]
    write_csv(path, ["t_ns", "g_ghz", "delta_cp_mhz"], rows)


def sha256_of(path: Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def write_manifest(
    path: Path,
    command: list[str],
    config_dict: dict,
    outputs: list[Path],
    backend: str,
    timings: dict[str, float],
) -> None:
    import numpy
    import scipy

    doc = {
        "schema_version": MANIFEST_SCHEMA,
        "command": command,
        "config": config_dict,
        "backend": backend,
        "versions": {
            "atomcavity": __version__,
            "python": platform.python_version(),
            "numpy": numpy.__version__,
            "scipy": scipy.__version__,
        },
        "timings_s": {k: round(v, 3) for k, v in timings.items()},
        "outputs": {Path(p).name: sha256_of(p) for p in outputs},
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=False)
        fh.write("\n")


def load_manifest(path: Path) -> dict:
    with open(path) as fh:
        doc = json.load(fh)
    if doc.get("schema_version") != MANIFEST_SCHEMA:
        raise ValueError(f"unsupported manifest schema {doc.get('schema_version')!r}")
    return doc
