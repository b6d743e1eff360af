import json
import math
import subprocess
import sys

import pytest

from tunneldelay.cli import (
    EXIT_CONFIG,
    EXIT_NUMERICAL,
    EXIT_OK,
    ConfigError,
    NumericalInvariantError,
    list_presets,
    main,
    preset_config,
    resolve_config,
    run_scenario,
)

FIG_PANELS = {
    "fig1a": (1.4, 2.85),
    "fig1b": (1.4, 2.85),
    "fig1c": (1.4, 2.85),
    "fig1d": (1.4, 2.85),
    "fig1e": (7.0, 0.57),
}


def small(name, **extra):
    cfg = preset_config(name)
    cfg.pop("description")
    cfg.update({"n_x": 4096, "n_tau": 4096})
    cfg.update(extra)
    return cfg


# --------------------------------------------------------------------- catalogue


def test_preset_catalogue_is_fixed():
    names = [name for name, _ in list_presets()]
    assert names == ["fig1a", "fig1b", "fig1c", "fig1d", "fig1e", "causality", "poles", "regime_scan"]
    assert list_presets() == list_presets()


def test_preset_descriptions():
    desc = dict(list_presets())
    assert "strong-measurement" in desc["fig1e"]
    assert "front-truncated causality test" in desc["fig1c"]


@pytest.mark.parametrize("name", sorted(FIG_PANELS))
def test_preset_fidelity(name):
    cfg = preset_config(name)
    k0_over_pi, dx = FIG_PANELS[name]
    assert cfg["omega_b"] == 100
    assert cfg["k0_b_over_pi"] == k0_over_pi and cfg["dx_over_b"] == dx
    assert cfg["model"] == "double_delta"
    sc = resolve_config({k: v for k, v in cfg.items() if k != "description"})
    assert sc.k0 == pytest.approx(k0_over_pi * math.pi, rel=1e-15)


def test_unknown_preset():
    with pytest.raises(ConfigError) as err:
        preset_config("fig2")
    assert err.value.field == "preset"


# --------------------------------------------------------------------- validation


@pytest.mark.parametrize("patch,field", [
    ({"pipelines": []}, "pipelines"),
    ({"pipelines": ["fft"]}, "pipelines"),
    ({"omega_b": "strong"}, "omega_b"),
    ({"dx_over_b": -1.0}, "dx_over_b"),
    ({"n_x": 1000}, "n_x"),
    ({"task": "plot"}, "task"),
    ({"model": "square_well"}, "model"),
    ({"truncation": "middle"}, "truncation"),
    ({"xi_over_b": 3.0}, "xi_over_b"),
    ({"tau_min": 5.0, "tau_max": 1.0}, "tau_max"),
    ({"colour": "red"}, "colour"),
    ({"model": "tabulated"}, "table"),
    ({"dispersion": "quadratic", "mass": 1.0}, "pipelines"),
])
def test_config_errors_name_the_field(patch, field):
    cfg = small("fig1b")
    cfg.update(patch)
    with pytest.raises(ConfigError) as err:
        resolve_config(cfg)
    assert err.value.field == field


def test_negative_momentum_is_a_config_error(tmp_path):
    with pytest.raises(ConfigError) as err:
        run_scenario(small("fig1b", k0_b_over_pi=0.05), tmp_path)
    assert err.value.field == "k0_b"


def test_pipelines_string_is_accepted_and_ordered():
    sc = resolve_config(small("fig1b", pipelines="modes, direct"))
    assert sc.pipelines == ("direct", "modes")


def test_bad_config_file(tmp_path):
    path = tmp_path / "c.json"
    path.write_text("{not json")
    assert main(["experiment", "--config", str(path), "--out", str(tmp_path / "o")]) == EXIT_CONFIG
    path.write_text("[1, 2]")
    assert main(["experiment", "--config", str(path), "--out", str(tmp_path / "o")]) == EXIT_CONFIG
    assert main(["experiment", "--config", str(tmp_path / "missing.json")]) == EXIT_CONFIG


# --------------------------------------------------------------------- runs


def test_experiment_manifest_lists_every_file(tmp_path):
    manifest = run_scenario(small("fig1b"), tmp_path)
    written = {p.name for p in tmp_path.iterdir()} - {"manifest.json"}
    assert set(manifest.files) == written
    on_disk = json.loads((tmp_path / "manifest.json").read_text())
    assert on_disk["files"] == manifest.files
    assert on_disk["config"]["omega_b"] == 100
    assert manifest.reports["checks"]["pipeline_equivalence"]["passed"]
    assert manifest.diagnostics["regime"] == "weak"
    assert manifest.diagnostics["negative_k_fraction"] < 1e-8


def test_field_csv_columns(tmp_path):
    run_scenario(small("fig1b", pipelines=["convolution"]), tmp_path)
    header = (tmp_path / "field_convolution.csv").read_text().splitlines()
    first = [line for line in header if not line.startswith("#")][0]
    assert first.split(",") == ["x", "tau", "re_psi", "im_psi", "abs2"]


def test_runs_are_bit_identical(tmp_path):
    a = run_scenario(small("fig1c"), tmp_path / "a")
    b = run_scenario(small("fig1c"), tmp_path / "b")
    assert a.files == b.files
    for name in a.files:
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_numerical_failure_still_writes_manifest(tmp_path):
    with pytest.raises(NumericalInvariantError) as err:
        run_scenario(small("fig1c", tol=1e-300), tmp_path)
    assert err.value.failures[0]["check"] == "causal_boundary"
    report = json.loads((tmp_path / "manifest.json").read_text())
    assert report["reports"]["checks"]["causal_boundary"]["passed"] is False


@pytest.mark.parametrize("name,expected", [
    ("fig1a", "eta.csv"),
    ("causality", "eta_single_delta_attractive.csv"),
    ("poles", "poles.csv"),
    ("regime_scan", "regime_scan.csv"),
])
def test_diagnostic_presets_emit_their_tables(tmp_path, name, expected):
    cfg = small(name)
    if name == "regime_scan":
        cfg["scan_dx_over_b"] = [0.57, 2.85]
    manifest = run_scenario(cfg, tmp_path)
    assert expected in manifest.files


def test_regime_scan_classification(tmp_path):
    manifest = run_scenario(small("regime_scan", scan_dx_over_b=[0.5, 1.0, 2.0]), tmp_path)
    assert [r["regime"] for r in manifest.reports["regime_scan"]] == ["strong", "strong", "weak"]


def test_transmission_task(tmp_path):
    manifest = run_scenario({"task": "transmission", "n_k": 50, "m_max": 3}, tmp_path)
    assert "transmission.csv" in manifest.files
    assert manifest.diagnostics["series_tail_bound"] > 0


# --------------------------------------------------------------------- command line


def cli(*args, cwd=None):
    return subprocess.run([sys.executable, "-m", "tunneldelay", *args], capture_output=True, text=True,
                          cwd=cwd, timeout=300)


def test_cli_list_presets():
    proc = cli("list-presets")
    assert proc.returncode == EXIT_OK
    assert [line.split("\t")[0] for line in proc.stdout.splitlines()][:5] == list(sorted(FIG_PANELS))


def test_cli_exit_codes(tmp_path):
    ok = cli("preset", "poles", "--out", str(tmp_path / "ok"))
    assert ok.returncode == EXIT_OK, ok.stderr
    assert (tmp_path / "ok" / "manifest.json").exists()

    bad = cli("experiment", "--pipelines", "", "--out", str(tmp_path / "bad"))
    assert bad.returncode == EXIT_CONFIG
    assert "pipelines" in bad.stderr

    assert cli("preset", "nope").returncode == EXIT_CONFIG
    assert cli("frobnicate").returncode == EXIT_CONFIG


def test_cli_numerical_failure_exit_code(tmp_path):
    cfg = small("fig1c")
    path = tmp_path / "c.json"
    path.write_text(json.dumps(cfg))
    proc = cli("experiment", "--config", str(path), "--tol", "1e-300", "--out", str(tmp_path / "o"))
    assert proc.returncode == EXIT_NUMERICAL
    assert "causal_boundary" in proc.stderr


def test_cli_flags_override_config(tmp_path):
    assert main(["eta", "--preset", "fig1a", "--omega-b", "20", "--out", str(tmp_path)]) == EXIT_OK
    echo = json.loads((tmp_path / "manifest.json").read_text())["config"]
    assert echo["omega_b"] == 20 and echo["task"] == "eta"
