"""Config parsing, scenario execution, artifacts, and exit codes."""
import json

import numpy as np
import pytest

from blochsim.cli import ConfigError, main, parse_config, run_scenario

MINIMAL = "[run]\nscenario = single-trotter\n"


def _run_main(tmp_path, text, *extra):
    cfg = tmp_path / "run.ini"
    cfg.write_text(text)
    out = tmp_path / "out"
    return main(["run", str(cfg), "--out", str(out), *extra]), out


class TestParsing:
    def test_minimal_config_gets_demo_defaults(self):
        config = parse_config(MINIMAL)
        assert config.scenario == "single-trotter"
        assert config.model.delta_a == 5.0
        assert config.model.delta_b == 1.0
        assert config.model.f_dc == 1.5
        assert config.model.n_sites == 4
        assert config.plan.dt == 0.02
        assert config.plan.stepper == "trotter1"
        assert config.initial == {"kind": "spike", "site": 2}

    def test_explicit_values_override_defaults(self):
        config = parse_config(
            "[run]\nscenario = single-exact\n"
            "[model]\ndelta_a = 2\ndelta_b = 2\nf_dc = 0.2\nn_sites = 128\n"
            "[plan]\ndt = 0.05\nn_steps = 10\n"
            "[initial]\nkind = gaussian\n"
        )
        assert config.model.n_sites == 128
        assert config.plan.dt == 0.05
        assert config.initial == {"kind": "gaussian"}

    def test_missing_scenario(self):
        with pytest.raises(ConfigError, match=r"run\.scenario"):
            parse_config("[run]\nlabel = x\n")

    def test_unknown_scenario(self):
        with pytest.raises(ConfigError, match=r"run\.scenario: unknown scenario"):
            parse_config("[run]\nscenario = warp\n")

    def test_unknown_section(self):
        with pytest.raises(ConfigError, match=r"unknown section \[extra\]"):
            parse_config(MINIMAL + "[extra]\nx = 1\n")

    def test_unknown_key_names_section_and_key(self):
        with pytest.raises(ConfigError, match=r"model\.hopping: unknown key"):
            parse_config(MINIMAL + "[model]\nhopping = 3\n")

    def test_non_numeric_value(self):
        with pytest.raises(ConfigError, match=r"model\.delta_a: not a number"):
            parse_config(MINIMAL + "[model]\ndelta_a = strong\n")

    def test_circuit_scenario_requires_power_of_two(self):
        with pytest.raises(ConfigError, match=r"model\.n_sites: must be a power of two"):
            parse_config(MINIMAL + "[model]\nn_sites = 6\n")

    def test_dense_scenario_accepts_any_even_chain(self):
        config = parse_config(
            "[run]\nscenario = single-exact\n[model]\nn_sites = 6\n"
        )
        assert config.model.n_sites == 6

    def test_odd_chain_rejected(self):
        with pytest.raises(ConfigError, match=r"model: n_sites must be even"):
            parse_config("[run]\nscenario = single-exact\n[model]\nn_sites = 5\n")

    def test_nonpositive_dt(self):
        with pytest.raises(ConfigError, match=r"plan\.dt: must be > 0"):
            parse_config(MINIMAL + "[plan]\ndt = 0\n")

    def test_stepper_scenario_conflict(self):
        with pytest.raises(ConfigError, match=r"plan\.stepper: scenario single-exact"):
            parse_config("[run]\nscenario = single-exact\n[plan]\nstepper = trotter1\n")

    def test_plan_rejected_for_static_scenario(self):
        with pytest.raises(ConfigError, match=r"plan\..*takes no evolution plan"):
            parse_config("[run]\nscenario = spectrum\n[plan]\ndt = 0.1\n")

    def test_initial_rejected_for_static_scenario(self):
        with pytest.raises(ConfigError, match=r"initial\..*takes no initial state"):
            parse_config("[run]\nscenario = ladder\n[initial]\nkind = spike\n")

    def test_two_particle_initial_kind(self):
        with pytest.raises(ConfigError, match=r"initial\.kind: two-particle takes spike2"):
            parse_config("[run]\nscenario = two-particle\n[initial]\nkind = spike\n")

    def test_scenario_extras_validated(self):
        with pytest.raises(ConfigError, match=r"scenario\.k_points"):
            parse_config("[run]\nscenario = dispersion\n[scenario]\nk_points = 1\n")
        with pytest.raises(ConfigError, match=r"scenario\.bands"):
            parse_config("[run]\nscenario = ladder\n[scenario]\nbands = up\n")

    def test_model_y_only_for_dim2(self):
        with pytest.raises(ConfigError, match=r"model_y"):
            parse_config(MINIMAL + "[model_y]\ndelta_a = 1\n")


class TestScenarioArtifacts:
    def test_single_run_writes_trajectory_series_manifest(self, tmp_path):
        config = parse_config(MINIMAL + "[plan]\nn_steps = 5\n")
        artifacts = run_scenario(config, tmp_path)
        assert artifacts == ["trajectory.csv", "series.csv", "manifest.json"]
        lines = (tmp_path / "trajectory.csv").read_text().splitlines()
        assert lines[0] == "t,site,re,im,prob"
        assert len(lines) == 1 + 6 * 4
        manifest = json.loads((tmp_path / "manifest.json").read_text())
        assert manifest["model"]["delta_a"] == 5.0
        assert manifest["plan"]["n_steps"] == 5
        assert manifest["initial"] == {"kind": "spike", "site": 2}
        assert manifest["outputs"] == ["trajectory.csv", "series.csv"]

    def test_reruns_are_byte_identical(self, tmp_path):
        config = parse_config(MINIMAL + "[plan]\nn_steps = 8\n")
        a, b = tmp_path / "a", tmp_path / "b"
        run_scenario(config, a)
        run_scenario(config, b)
        for name in ("trajectory.csv", "series.csv", "manifest.json"):
            assert (a / name).read_bytes() == (b / name).read_bytes()

    def test_two_particle_trajectory(self, tmp_path):
        config = parse_config(
            "[run]\nscenario = two-particle\n[model]\nv = 10\n[plan]\nn_steps = 3\n"
        )
        run_scenario(config, tmp_path)
        lines = (tmp_path / "trajectory.csv").read_text().splitlines()
        assert lines[0] == "t,site1,site2,prob"
        assert len(lines) == 1 + 4 * 16

    def test_spectrum_csv(self, tmp_path):
        config = parse_config(
            "[run]\nscenario = spectrum\n[model]\nn_sites = 20\n"
            "[scenario]\nf_values = 0, 1\n"
        )
        run_scenario(config, tmp_path)
        data = np.loadtxt(tmp_path / "spectrum.csv", delimiter=",", skiprows=1)
        assert data.shape == (40, 3)
        assert set(np.unique(data[:, 0])) == {0.0, 1.0}

    def test_dispersion_csv(self, tmp_path):
        config = parse_config(
            "[run]\nscenario = dispersion\n[scenario]\nk_points = 11\n"
        )
        run_scenario(config, tmp_path)
        data = np.loadtxt(tmp_path / "spectrum.csv", delimiter=",", skiprows=1)
        assert data.shape == (11, 3)
        np.testing.assert_allclose(data[:, 1], -data[:, 2], atol=1e-14)

    def test_ladder_csv_and_offsets(self, tmp_path):
        config = parse_config(
            "[run]\nscenario = ladder\n[model]\nn_sites = 20\n"
            "[scenario]\nf_const = 1\nalpha_min = -3\nalpha_max = 3\n"
        )
        run_scenario(config, tmp_path)
        manifest = json.loads((tmp_path / "manifest.json").read_text())
        assert "offset_minus" in manifest["notes"] and "offset_plus" in manifest["notes"]
        lines = (tmp_path / "spectrum.csv").read_text().splitlines()
        assert lines[0] == "band,alpha,energy"
        assert len(lines) == 1 + 2 * 7

    def test_transpile_report(self, tmp_path):
        config = parse_config("[run]\nscenario = transpile-report\n[model]\nn_sites = 8\n")
        run_scenario(config, tmp_path)
        report = json.loads((tmp_path / "counts.json").read_text())
        assert report["qubits"] == 3
        assert report["counts"] == {"depth": 42, "u1": 15, "u3": 28, "cx": 18}
        assert report["reference_counts_3q"] == {"depth": 25, "u1": 4, "u3": 13, "cx": 14}
        qasm = (tmp_path / "circuit.qasm").read_text()
        assert qasm.startswith("OPENQASM 2.0;")

    def test_bessel_check(self, tmp_path):
        config = parse_config("[run]\nscenario = bessel-check\n")
        run_scenario(config, tmp_path)
        manifest = json.loads((tmp_path / "manifest.json").read_text())
        assert manifest["notes"]["sum_rule_residual"] < 1e-12

    def test_dim2(self, tmp_path):
        config = parse_config(
            "[run]\nscenario = dim2\n[model]\nn_sites = 8\n"
            "[model_y]\ndelta_a = 2\ndelta_b = 0.5\nf_dc = 0.3\nn_sites = 8\n"
        )
        run_scenario(config, tmp_path)
        manifest = json.loads((tmp_path / "manifest.json").read_text())
        assert manifest["notes"]["kronecker_sum_residual"] < 1e-10
        assert manifest["model_y"]["delta_a"] == 2.0
        data = np.loadtxt(tmp_path / "spectrum.csv", delimiter=",", skiprows=1)
        assert data.shape == (64, 2)


class TestMain:
    def test_success_exit_zero(self, tmp_path, capsys):
        code, out = _run_main(tmp_path, MINIMAL + "[plan]\nn_steps = 2\n")
        assert code == 0
        assert (out / "manifest.json").exists()
        assert "single-trotter" in capsys.readouterr().out

    def test_config_error_exit_two(self, tmp_path, capsys):
        code, _ = _run_main(tmp_path, MINIMAL + "[model]\nn_sites = 6\n")
        assert code == 2
        assert "config error: model.n_sites" in capsys.readouterr().err

    def test_missing_file_exit_one(self, tmp_path, capsys):
        code = main(["run", str(tmp_path / "absent.ini")])
        assert code == 1
        assert "cannot read config" in capsys.readouterr().err

    def test_override_changes_values(self, tmp_path):
        code, out = _run_main(
            tmp_path, MINIMAL + "[plan]\nn_steps = 2\n",
            "--override", "model.delta_a=3.5", "--override", "plan.n_steps=4",
        )
        assert code == 0
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["model"]["delta_a"] == 3.5
        assert manifest["plan"]["n_steps"] == 4

    def test_override_is_validated_like_config(self, tmp_path, capsys):
        code, _ = _run_main(
            tmp_path, MINIMAL, "--override", "model.wrong_key=1"
        )
        assert code == 2
        assert "model.wrong_key" in capsys.readouterr().err

    def test_malformed_override(self, tmp_path, capsys):
        code, _ = _run_main(tmp_path, MINIMAL, "--override", "delta_a=3")
        assert code == 2
        assert "section.key=value" in capsys.readouterr().err
