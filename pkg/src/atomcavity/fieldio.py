"""Column text format for field grids.

One cell per line, z fastest, header lines carry the grid layout:

    # atomcavity-field v1
    # kind: mode | cp
    # dims: nx ny nz
    # origin: x0 y0 z0
    # spacing: dx dy dz
    # key: <hex>                (cp files only)
    # columns: x y z eps intensity   (mode)  /  x y z shift   (cp)

All quantities in SI (metres; shifts in rad/s).
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .casimir import CPField
from .cavity import ModeField
from .errors import ConfigurationError


def _write(path, kind, origin, spacing, columns, table, key=None):
    head = [
        "# atomcavity-field v1",
        f"# kind: {kind}",
        f"# dims: {table.shape[0]} {table.shape[1]} {table.shape[2]}",
        "# origin: " + " ".join(repr(float(v)) for v in origin),
        "# spacing: " + " ".join(repr(float(v)) for v in spacing),
    ]
    if key is not None:
        head.append(f"# key: {key}")
    head.append(f"# columns: x y z {columns}")
    nx, ny, nz = table.shape[:3]
    xs = origin[0] + spacing[0] * np.arange(nx)
    ys = origin[1] + spacing[1] * np.arange(ny)
    zs = origin[2] + spacing[2] * np.arange(nz)
    gx, gy, gz = np.meshgrid(xs, ys, zs, indexing="ij")
    cols = [gx.ravel(), gy.ravel(), gz.ravel()]
    cols += [table[..., i].ravel() for i in range(table.shape[3])]
    body = np.column_stack(cols)
    with open(path, "w") as fh:
        fh.write("\n".join(head) + "\n")
        np.savetxt(fh, body, fmt="%.17g")


def _read_header(path) -> dict:
    meta = {}
    with open(path) as fh:
        for line in fh:
            if not line.startswith("#"):
                break
            if ":" in line:
                k, v = line[1:].split(":", 1)
                meta[k.strip()] = v.strip()
    return meta


def _load(path, kind, n_fields):
    meta = _read_header(path)
    if meta.get("kind") != kind:
        raise ConfigurationError(
            f"{path}: expected field kind {kind!r}, found {meta.get('kind')!r}")
    dims = tuple(int(v) for v in meta["dims"].split())
    origin = tuple(float(v) for v in meta["origin"].split())
    spacing = tuple(float(v) for v in meta["spacing"].split())
    data = np.loadtxt(path, comments="#")
    data = np.atleast_2d(data)
    if data.shape[0] != dims[0] * dims[1] * dims[2] or data.shape[1] != 3 + n_fields:
        raise ConfigurationError(f"{path}: table shape {data.shape} does not match "
                                 f"dims {dims} with {n_fields} field column(s)")
    fields = data[:, 3:].reshape(*dims, n_fields)
    return meta, origin, spacing, fields


def save_mode_field(path: str | Path, fieldmap: ModeField) -> None:
    table = np.stack([fieldmap.eps, fieldmap.intensity], axis=-1)
    _write(path, "mode", fieldmap.origin, fieldmap.spacing, "eps intensity", table)


def load_mode_field(path: str | Path) -> ModeField:
    _, origin, spacing, fields = _load(path, "mode", 2)
    return ModeField(origin=origin, spacing=spacing,
                     eps=fields[..., 0], intensity=fields[..., 1])


def save_cp_field(path: str | Path, field: CPField) -> None:
    table = field.values[..., None]
    _write(path, "cp", field.origin, field.spacing, "shift", table, key=field.key)


def load_cp_field(path: str | Path, expected_key: str | None = None) -> CPField:
    meta, origin, spacing, fields = _load(path, "cp", 1)
    key = meta.get("key", "")
    if expected_key is not None and key != expected_key:
        raise ConfigurationError(
            f"{path}: cached field key {key!r} does not match the current "
            f"model parameters ({expected_key!r}); rebuild the cache")
    values = fields[..., 0]
    return CPField(origin=origin, spacing=spacing, values=values,
                   valid=np.ones(values.shape, dtype=bool), key=key)
