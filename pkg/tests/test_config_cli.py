import json
import math
from pathlib import Path

import numpy as np
import pytest
import yaml

from atomcavity.cli import main
from atomcavity.config import (
    RunConfig,
    config_from_dict,
    dump_config,
    load_config,
    resolve_atom,
    resolve_cavity,
    resolve_sampler,
    resolve_sweep,
)
from atomcavity.errors import ConfigurationError
from atomcavity.outputs import sha256_of


def test_config_round_trip(tmp_path):
    cfg = RunConfig()
    path = tmp_path / "run.yaml"
    dump_config(cfg, path)
    again = load_config(path)
    assert again == cfg
    # and once more through plain dict / yaml text
    text = yaml.safe_dump(cfg.to_dict())
    assert config_from_dict(yaml.safe_load(text)) == cfg


def test_unknown_keys_rejected():
    with pytest.raises(ConfigurationError, match="quality_fctor"):
        config_from_dict({"cavity": {"quality_fctor": 1000}})
    with pytest.raises(ConfigurationError, match="top level"):
        config_from_dict({"cavityy": {}})


def test_type_errors_name_the_path():
    with pytest.raises(ConfigurationError, match="sweep.n_detunings"):
        config_from_dict({"sweep": {"n_detunings": 3.5}})
    with pytest.raises(ConfigurationError, match="cp.enabled"):
        config_from_dict({"cp": {"enabled": "yes"}})


def test_defaults_reproduce_fig4a_models():
    cfg = RunConfig()
    cavity = resolve_cavity(cfg.cavity)
    atom = resolve_atom(cfg.atom)
    assert cavity.quality_factor == 65000.0
    assert cavity.wavelength == pytest.approx(780e-9, rel=1e-12)
    assert cavity.mode_volume == pytest.approx(0.08 * (780e-9) ** 3, rel=1e-12)
    assert atom.dipole == 3.584e-29
    sweep = resolve_sweep(cfg.sweep, cavity, atom)
    assert len(sweep.delta_cl) == 201
    assert sweep.delta_cl[100] == 0.0
    assert sweep.t_obs == pytest.approx(10e-9)
    spec = resolve_sampler(cfg.sampler, cfg.seed)
    assert spec.count == 2000
    assert spec.wall.offset == pytest.approx(-2e-6)


def test_atom_overrides():
    cfg = config_from_dict({"atom": {"gamma_mhz": 5.0}})
    atom = resolve_atom(cfg.atom)
    assert atom.gamma == pytest.approx(2 * math.pi * 5e6)
    with pytest.raises(ConfigurationError, match="species"):
        resolve_atom(config_from_dict({"atom": {"species": "Cs"}}).atom)


# --- CLI ----------------------------------------------------------------------

def run_cli(args):
    return main(args)


def test_cli_params_ok(capsys):
    assert run_cli(["params"]) == 0
    out = capsys.readouterr().out
    assert "kappa" in out and "g_max" in out and "tau_int" in out


def test_cli_unknown_preset_usage_error():
    with pytest.raises(SystemExit) as exc:
        run_cli(["single", "--preset", "fig9z"])
    assert exc.value.code == 2


def test_cli_single_writes_outputs(tmp_path):
    out = tmp_path / "run"
    rc = run_cli(["single", "--preset", "fig4a", "--detunings", "3",
                  "--tobs-ns", "6.0", "--no-cp", "--output-dir", str(out),
                  "--dump-schedule"])
    assert rc == 0
    for name in ("map.csv", "timeavg.csv", "trace.csv", "schedule.csv",
                 "manifest.json"):
        assert (out / name).exists(), name
    header = (out / "map.csv").read_text().splitlines()[0]
    assert header == "t_ns,delta_ghz,photon"
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["schema_version"] == 1
    # manifest hashes match the files on disk
    for name, digest in manifest["outputs"].items():
        assert sha256_of(out / name) == digest


def test_cli_rerun_bit_identical(tmp_path):
    first = tmp_path / "a"
    rc = run_cli(["single", "--preset", "fig4b", "--detunings", "3",
                  "--tobs-ns", "5.0", "--no-cp", "--output-dir", str(first)])
    assert rc == 0
    second = tmp_path / "b"
    rc = run_cli(["rerun", str(first / "manifest.json"),
                  "--output-dir", str(second)])
    assert rc == 0
    for name in ("map.csv", "timeavg.csv", "trace.csv"):
        assert (first / name).read_bytes() == (second / name).read_bytes(), name


def test_cli_flag_overrides_config(tmp_path):
    cfg_path = tmp_path / "cfg.yaml"
    dump_config(config_from_dict({"seed": 7, "sweep": {"n_detunings": 3,
                                                       "t_obs_ns": 4.0}}), cfg_path)
    out = tmp_path / "o"
    rc = run_cli(["ensemble", "--config", str(cfg_path), "--count", "6",
                  "--sampler", "liad", "--seed", "12", "--no-cp",
                  "--output-dir", str(out)])
    assert rc == 0
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["config"]["seed"] == 12            # flag beats file
    assert manifest["config"]["sampler"]["count"] == 6
    spectrum = (out / "spectrum.csv").read_text().splitlines()
    assert spectrum[0] == "delta_ghz,mean,stderr,n"
    assert len(spectrum) == 4
    trajs = (out / "trajectories.csv").read_text().splitlines()
    assert len(trajs) == 7


def test_cli_ensemble_rerun_bit_identical(tmp_path):
    out1 = tmp_path / "e1"
    rc = run_cli(["ensemble", "--count", "5", "--sampler", "liad",
                  "--detunings", "3", "--tobs-ns", "4.0", "--no-cp",
                  "--output-dir", str(out1), "--workers", "1"])
    assert rc == 0
    out2 = tmp_path / "e2"
    rc = run_cli(["rerun", str(out1 / "manifest.json"), "--output-dir", str(out2)])
    assert rc == 0
    assert (out1 / "spectrum.csv").read_bytes() == (out2 / "spectrum.csv").read_bytes()
    assert (out1 / "trajectories.csv").read_bytes() == (out2 / "trajectories.csv").read_bytes()


def test_cli_cp_field(tmp_path):
    out = tmp_path / "cp"
    rc = run_cli(["cp-field", "--output-dir", str(out)])
    assert rc == 0
    rays = (out / "cp_rays.csv").read_text().splitlines()
    assert rays[0] == "ray,coord_nm,shift_mhz"
    shifts = np.array([float(r.split(",")[2]) for r in rays[1:]])
    assert np.all(shifts <= 0.0)
    # cached field file re-imports
    from atomcavity.fieldio import load_cp_field
    field = load_cp_field(out / "cp_field.txt")
    assert np.all(field.values <= 0.0)
