"""Command-line front end.

Subcommands: params, single, pair, ensemble, cp-field, rerun.
Exit codes: 0 success, 1 runtime failure, 2 usage error.
Every flag has a config-file equivalent; flags win over the file.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
import tempfile
import time
from pathlib import Path

import numpy as np

from .casimir import LorentzianGreen, Polarizability, cp_shift
from .config import (
    NS,
    RunConfig,
    config_from_dict,
    dump_config,
    load_config,
    resolve_atom,
    resolve_box,
    resolve_cavity,
    resolve_cp_field,
    resolve_sampler,
    resolve_sweep,
)
from .dynamics import default_backend_name
from .ensemble import run_delayed_pair, run_ensemble, run_single
from .errors import ConfigurationError
from .outputs import (
    load_manifest,
    write_cp_rays_csv,
    write_manifest,
    write_map_csv,
    write_schedule_csv,
    write_spectrum_csv,
    write_timeavg_csv,
    write_trace_csv,
    write_trajectories_csv,
)
from .presets import FIG4_PRESETS
from .report import params_report
from .trajectories import schedule_from_trajectory


def _replace_nested(cfg, path: str, value):
    """Immutable deep replace: path like 'sweep.n_detunings'."""
    head, _, rest = path.partition(".")
    if rest:
        value = _replace_nested(getattr(cfg, head), rest, value)
    return dataclasses.replace(cfg, **{head: value})


def _apply_overrides(cfg: RunConfig, args) -> RunConfig:
    if args.output_dir is not None:
        cfg = _replace_nested(cfg, "output_dir", args.output_dir)
    if args.seed is not None:
        cfg = _replace_nested(cfg, "seed", args.seed)
    if args.workers is not None:
        cfg = _replace_nested(cfg, "workers", args.workers)
    if args.detunings is not None:
        cfg = _replace_nested(cfg, "sweep.n_detunings", args.detunings)
    if args.tobs_ns is not None:
        cfg = _replace_nested(cfg, "sweep.t_obs_ns", args.tobs_ns)
    if args.no_cp:
        cfg = _replace_nested(cfg, "cp.enabled", False)
    if getattr(args, "count", None) is not None:
        cfg = _replace_nested(cfg, "sampler.count", args.count)
    if getattr(args, "sampler", None) is not None:
        cfg = _replace_nested(cfg, "sampler.kind", args.sampler)
    return cfg


def _load_base_config(args) -> RunConfig:
    if args.config is not None:
        cfg = load_config(args.config)
    else:
        cfg = RunConfig()
    return _apply_overrides(cfg, args)


def _prepare_out(cfg: RunConfig) -> Path:
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _common_models(cfg: RunConfig):
    cavity = resolve_cavity(cfg.cavity)
    atom = resolve_atom(cfg.atom)
    sweep = resolve_sweep(cfg.sweep, cavity, atom)
    cp_field = resolve_cp_field(cfg.cp, cavity, atom)
    return cavity, atom, sweep, cp_field


def cmd_params(args) -> int:
    cfg = _load_base_config(args)
    cavity = resolve_cavity(cfg.cavity)
    atom = resolve_atom(cfg.atom)
    print(params_report(cavity, atom, temperature=cfg.sampler.temperature_k))
    return 0


def _run_single_like(cfg: RunConfig, run_info: dict, dump_schedule: bool) -> int:
    out = _prepare_out(cfg)
    cavity, atom, sweep, cp_field = _common_models(cfg)
    box = resolve_box(cfg)
    t0 = time.perf_counter()
    if run_info["subcommand"] == "single":
        traj = FIG4_PRESETS[run_info["preset"]]
        result = run_single(traj, sweep, cavity, atom, cp_field=cp_field,
                            box=box, workers=cfg.workers)
    else:
        result = run_delayed_pair(run_info["delay_ns"] * NS, sweep, cavity, atom,
                                  cp_field=cp_field, box=box, workers=cfg.workers)
    elapsed = time.perf_counter() - t0

    paths = [out / "map.csv", out / "timeavg.csv", out / "trace.csv"]
    write_map_csv(paths[0], result)
    write_timeavg_csv(paths[1], result)
    write_trace_csv(paths[2], result)
    if dump_schedule:
        traj = FIG4_PRESETS[run_info.get("preset", "fig4a")]
        from .ensemble import _prepare_single
        payload = _prepare_single(traj, sweep, cavity, atom, cp_field, box, 1)
        p = out / "schedule.csv"
        write_schedule_csv(p, payload.schedules_template[0])
        paths.append(p)
    write_manifest(out / "manifest.json", run_info["argv"], cfg.to_dict(), paths,
                   default_backend_name(), {"run": elapsed},)
    for failure in result.failures:
        print(f"warning: detuning {failure[0]:.3e} rad/s failed: {failure[1]}",
              file=sys.stderr)
    print(f"wrote {', '.join(p.name for p in paths)} and manifest.json to {out}")
    return 0


def cmd_single(args) -> int:
    cfg = _load_base_config(args)
    info = {"subcommand": "single", "preset": args.preset,
            "argv": ["single", "--preset", args.preset]}
    return _run_single_like(cfg, info, args.dump_schedule)


def cmd_pair(args) -> int:
    cfg = _load_base_config(args)
    if args.delay < 0:
        raise ConfigurationError("--delay must be non-negative (ns)")
    info = {"subcommand": "pair", "delay_ns": args.delay,
            "argv": ["pair", "--delay", repr(args.delay)]}
    return _run_single_like(cfg, info, False)


def cmd_ensemble(args) -> int:
    cfg = _load_base_config(args)
    out = _prepare_out(cfg)
    cavity, atom, sweep, cp_field = _common_models(cfg)
    spec = resolve_sampler(cfg.sampler, cfg.seed)
    t0 = time.perf_counter()
    result = run_ensemble(spec, sweep, cavity, atom, cp_field=cp_field,
                          workers=cfg.workers)
    elapsed = time.perf_counter() - t0

    paths = [out / "spectrum.csv", out / "trajectories.csv"]
    write_spectrum_csv(paths[0], result.spectrum)
    write_trajectories_csv(paths[1], list(result.trajectories))
    write_manifest(out / "manifest.json",
                   ["ensemble", "--count", str(spec.count), "--sampler",
                    cfg.sampler.kind],
                   cfg.to_dict(), paths, default_backend_name(),
                   {"run": elapsed})
    if result.n_excluded:
        print(f"warning: {result.n_excluded} trajectories excluded", file=sys.stderr)
    print(f"averaged {result.n_trajectories} trajectories; wrote spectrum.csv, "
          f"trajectories.csv and manifest.json to {out}")
    return 0


def cmd_cp_field(args) -> int:
    cfg = _load_base_config(args)
    out = _prepare_out(cfg)
    cavity = resolve_cavity(cfg.cavity)
    atom = resolve_atom(cfg.atom)
    t0 = time.perf_counter()
    field = resolve_cp_field(dataclasses.replace(cfg.cp, enabled=True, cache_file=None),
                             cavity, atom)
    model = LorentzianGreen.calibrated(cavity)
    pol = Polarizability.from_atom(atom)
    h = cavity.geometry.height
    z_coords = np.linspace(h / 2, h / 2 + 500e-9, 51)
    z_pts = np.stack([np.zeros(51), np.zeros(51), z_coords], axis=1)
    hole_r = cavity.geometry.taper_radii[0]
    y_coords = np.linspace(0.0, hole_r * 0.999, 51)
    y_pts = np.stack([np.zeros(51), y_coords, np.zeros(51)], axis=1)
    rays = {
        "z": (z_coords, cp_shift(model, pol, z_pts)),
        "y": (y_coords, cp_shift(model, pol, y_pts)),
    }
    elapsed = time.perf_counter() - t0

    from .fieldio import save_cp_field
    paths = [out / "cp_field.txt", out / "cp_rays.csv"]
    save_cp_field(paths[0], field)
    write_cp_rays_csv(paths[1], rays)
    write_manifest(out / "manifest.json", ["cp-field"], cfg.to_dict(), paths,
                   default_backend_name(), {"run": elapsed})
    print(f"wrote cp_field.txt, cp_rays.csv and manifest.json to {out}")
    return 0


def cmd_rerun(args) -> int:
    doc = load_manifest(args.manifest)
    cfg = config_from_dict(doc["config"])
    if args.output_dir is not None:
        cfg = dataclasses.replace(cfg, output_dir=args.output_dir)
    command = doc["command"]
    # replay through the normal parser so overrides resolve identically
    with tempfile.NamedTemporaryFile("w", suffix=".yaml", delete=False) as fh:
        cfg_path = Path(fh.name)
    dump_config(cfg, cfg_path)
    try:
        return main([command[0], "--config", str(cfg_path), *command[1:],
                     "--output-dir", cfg.output_dir])
    finally:
        cfg_path.unlink(missing_ok=True)


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="YAML run configuration")
    p.add_argument("--output-dir", help="output directory (overrides config)")
    p.add_argument("--seed", type=int, help="RNG seed (overrides config)")
    p.add_argument("--workers", type=int, help="parallel workers")
    p.add_argument("--detunings", type=int, help="detuning grid size")
    p.add_argument("--tobs-ns", type=float, help="observation window (ns)")
    p.add_argument("--no-cp", action="store_true",
                   help="disable the Casimir-Polder shift in the dynamics")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="atomcavity",
        description="thermal atoms flying past a photonic-crystal cavity")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("params", help="print the cavity-QED consistency report")
    _add_common(p)
    p.set_defaults(func=cmd_params)

    p = sub.add_parser("single", help="single-atom transit sweep")
    _add_common(p)
    p.add_argument("--preset", choices=sorted(FIG4_PRESETS), default="fig4a")
    p.add_argument("--dump-schedule", action="store_true",
                   help="also write the sampled pulse schedule")
    p.set_defaults(func=cmd_single)

    p = sub.add_parser("pair", help="two delayed atoms on the central chord")
    _add_common(p)
    p.add_argument("--delay", type=float, required=True,
                   help="delay of the second atom (ns)")
    p.set_defaults(func=cmd_pair)

    p = sub.add_parser("ensemble", help="trajectory-averaged spectrum")
    _add_common(p)
    p.add_argument("--count", type=int, help="number of trajectories")
    p.add_argument("--sampler", choices=("thermal", "liad"),
                   help="trajectory source")
    p.set_defaults(func=cmd_ensemble)

    p = sub.add_parser("cp-field", help="export the Casimir-Polder shift field")
    _add_common(p)
    p.set_defaults(func=cmd_cp_field)

    p = sub.add_parser("rerun", help="re-execute a run from its manifest")
    p.add_argument("manifest", help="path to manifest.json")
    p.add_argument("--output-dir", help="directory for the replayed outputs")
    p.set_defaults(func=cmd_rerun)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
