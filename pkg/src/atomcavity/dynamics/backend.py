"""Propagation-kernel backend selection.

The compiled extension is used when it imported cleanly; the pure-numpy
reference implementation is the fallback. Set ATOMCAVITY_DISABLE_EXT=1 to
force the fallback (used by the benchmark and the equivalence tests).
"""

from __future__ import annotations

import os

from . import _core_py

try:
    from . import _core  # type: ignore[attr-defined]
except ImportError:  # extension not built
    _core = None

_FORCED_OFF = bool(os.environ.get("ATOMCAVITY_DISABLE_EXT"))


def available_backends() -> dict[str, object]:
    table: dict[str, object] = {_core_py.BACKEND_NAME: _core_py}
    if _core is not None:
        table[_core.BACKEND_NAME] = _core
    return table


def default_backend_name() -> str:
    if _core is not None and not _FORCED_OFF:
        return _core.BACKEND_NAME
    return _core_py.BACKEND_NAME


def get_kernel(name: str | None = None):
    """(kernel callable, backend name) for the requested or default backend."""
    if name is None:
        name = default_backend_name()
    table = available_backends()
    if name not in table:
        raise ValueError(f"unknown backend {name!r}; available: {sorted(table)}")
    return table[name].propagate_kernel, name
