import json

import numpy as np
import pytest

from fieldcqed import cli
from fieldcqed.checks import CheckResult
from fieldcqed.errors import ConfigError

MINIMAL_TRANSMON = {
    "mode": "transmon",
    "transmon": {"E_C": 0.3, "E_J": 15, "n_g": 0, "n_cutoff": 20},
    "sweep": {"start": 0.0, "stop": 1.0, "n_points": 5},
}


def write_config(tmp_path, payload, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(payload), encoding="utf-8")
    return str(path)


class TestParseConfig:
    def test_minimal_transmon_block(self):
        cfg = cli.parse_config(json.dumps(MINIMAL_TRANSMON))
        assert cfg.mode == "transmon"
        assert cfg.transmon["E_C"] == 0.3
        assert cfg.units == "natural"

    def test_negative_ec_names_the_field(self):
        bad = {"mode": "transmon", "transmon": {"E_C": -0.3, "E_J": 15}}
        with pytest.raises(ConfigError) as exc:
            cli.parse_config(json.dumps(bad))
        assert any("E_C" in p for p in exc.value.problems)

    def test_unknown_key_is_listed(self):
        bad = {"mode": "transmon", "transmon": {"E_C": 0.3, "E_J": 15, "EJ_max": 30}}
        with pytest.raises(ConfigError) as exc:
            cli.parse_config(json.dumps(bad))
        assert any("EJ_max" in p for p in exc.value.problems)

    def test_every_violation_reported_at_once(self):
        bad = {"mode": "transmon",
               "transmon": {"E_C": -0.3, "E_J": -1, "EJ_max": 30}}
        with pytest.raises(ConfigError) as exc:
            cli.parse_config(json.dumps(bad))
        text = "\n".join(exc.value.problems)
        assert "E_C" in text and "E_J" in text and "EJ_max" in text
        assert len(exc.value.problems) == 3

    def test_syntax_error_reports_position(self):
        with pytest.raises(ConfigError) as exc:
            cli.parse_config('{"mode": "transmon",\n')
        assert "line 2" in exc.value.problems[0]

    def test_missing_block_for_mode(self):
        bad = {"mode": "couple",
               "transmon": {"E_C": 0.3, "E_J": 15},
               "line": {"L_pul": 4e-7, "C_pul": 1.6e-10, "length": 0.0125}}
        with pytest.raises(ConfigError) as exc:
            cli.parse_config(json.dumps(bad))
        assert any("coupling" in p for p in exc.value.problems)

    def test_fock_cutoff_count_must_match_modes(self):
        bad = {"mode": "couple",
               "transmon": {"E_C": 0.3, "E_J": 15},
               "line": {"L_pul": 4e-7, "C_pul": 1.6e-10, "length": 0.0125,
                        "n_modes": 2},
               "coupling": {"beta": 0.2, "fock_cutoffs": [3]}}
        with pytest.raises(ConfigError) as exc:
            cli.parse_config(json.dumps(bad))
        assert any("fock_cutoffs" in p for p in exc.value.problems)

    def test_bath_lengths_cross_checked(self):
        bad = {"mode": "bath",
               "bath": {"cavity_length": 2.0, "wave_speed": 1.0,
                        "total_length": 1.0}}
        with pytest.raises(ConfigError) as exc:
            cli.parse_config(json.dumps(bad))
        assert any("total_length" in p for p in exc.value.problems)

    def test_initial_level_outside_basis(self):
        bad = {"mode": "evolve", "transmon": {"E_C": 0.3, "E_J": 15, "n_cutoff": 2},
               "time_grid": {"t_max": 1.0}, "initial_levels": [0, 9]}
        with pytest.raises(ConfigError) as exc:
            cli.parse_config(json.dumps(bad))
        assert any("initial_levels" in p for p in exc.value.problems)

    def test_mode_injected_from_subcommand(self):
        cfg = cli.parse_config("{}", default_mode="check")
        assert cfg.mode == "check"


class TestMainExitCodes:
    def test_happy_path_returns_zero(self, tmp_path):
        cfg = write_config(tmp_path, MINIMAL_TRANSMON)
        assert cli.main(["transmon", "--config", cfg, "--out", str(tmp_path)]) == 0
        assert (tmp_path / "transmon_levels.csv").exists()
        assert (tmp_path / "summary.json").exists()

    def test_config_error_returns_two(self, tmp_path, capsys):
        cfg = write_config(tmp_path, {"mode": "transmon",
                                      "transmon": {"E_C": -1, "E_J": 15}})
        assert cli.main(["transmon", "--config", cfg]) == 2
        assert "E_C" in capsys.readouterr().err

    def test_missing_config_file_returns_two(self, tmp_path, capsys):
        missing = str(tmp_path / "nope.json")
        assert cli.main(["transmon", "--config", missing]) == 2
        assert "not found" in capsys.readouterr().err

    def test_subcommand_config_mode_mismatch(self, tmp_path, capsys):
        cfg = write_config(tmp_path, MINIMAL_TRANSMON)
        assert cli.main(["modes", "--config", cfg]) == 2
        assert "subcommand" in capsys.readouterr().err

    def test_model_error_returns_three(self, tmp_path, capsys):
        payload = {"mode": "bath",
                   "bath": {"cavity_length": 1.0, "wave_speed": 1.0,
                            "total_length": 10.0, "n_cavity_modes": 20,
                            "n_bins": 200, "boundary_completion": False}}
        cfg = write_config(tmp_path, payload)
        assert cli.main(["bath", "--config", cfg, "--out", str(tmp_path)]) == 3
        assert "error" in capsys.readouterr().err

    def test_check_failure_returns_four(self, tmp_path, monkeypatch, capsys):
        def fake_run_all(progress=None):
            return ({"stub": [CheckResult("always fails", False, 2.0, 1.0)]},
                    {"stub_scalar": 2.0})
        monkeypatch.setattr(cli.checks, "run_all", fake_run_all)
        assert cli.main(["check", "--out", str(tmp_path)]) == 4
        out = capsys.readouterr().out
        assert "FAIL" in out
        report = json.loads((tmp_path / "checks.json").read_text())
        assert report["all_passed"] is False

    def test_check_pass_prints_and_returns_zero(self, tmp_path, monkeypatch, capsys):
        def fake_run_all(progress=None):
            return ({"stub": [CheckResult("always passes", True, 0.5, 1.0)]},
                    {"stub_scalar": 0.5})
        monkeypatch.setattr(cli.checks, "run_all", fake_run_all)
        assert cli.main(["check", "--out", str(tmp_path)]) == 0
        assert "PASS stub: always passes" in capsys.readouterr().out
        report = json.loads((tmp_path / "checks.json").read_text())
        assert report["all_passed"] is True


class TestOutputs:
    def test_identical_configs_identical_bytes(self, tmp_path):
        cfg = write_config(tmp_path, MINIMAL_TRANSMON)
        out1, out2 = tmp_path / "a", tmp_path / "b"
        assert cli.main(["transmon", "--config", cfg, "--out", str(out1)]) == 0
        assert cli.main(["transmon", "--config", cfg, "--out", str(out2)]) == 0
        for name in ("transmon_levels.csv", "summary.json"):
            assert (out1 / name).read_bytes() == (out2 / name).read_bytes()

    def test_csv_round_trips(self, tmp_path):
        cfg = write_config(tmp_path, MINIMAL_TRANSMON)
        cli.main(["transmon", "--config", cfg, "--out", str(tmp_path)])
        data = np.genfromtxt(tmp_path / "transmon_levels.csv", delimiter=",",
                             names=True)
        assert data.dtype.names == ("n_g", "level", "omega")
        assert data.size == 5 * 4
        # full double precision survives the trip
        assert data["omega"][0] == pytest.approx(-12.077033863970037, rel=1e-15)

    def test_csv_uses_lf_endings(self, tmp_path):
        cfg = write_config(tmp_path, MINIMAL_TRANSMON)
        cli.main(["transmon", "--config", cfg, "--out", str(tmp_path)])
        raw = (tmp_path / "transmon_levels.csv").read_bytes()
        assert b"\r" not in raw

    def test_units_flag_recorded(self, tmp_path):
        cfg = write_config(tmp_path, MINIMAL_TRANSMON)
        cli.main(["transmon", "--config", cfg, "--out", str(tmp_path),
                  "--units", "si"])
        summary = json.loads((tmp_path / "summary.json").read_text())
        assert summary["units"] == "si"

    def test_out_dir_from_config(self, tmp_path):
        payload = dict(MINIMAL_TRANSMON, out_dir=str(tmp_path / "fromcfg"))
        cfg = write_config(tmp_path, payload)
        assert cli.main(["transmon", "--config", cfg]) == 0
        assert (tmp_path / "fromcfg" / "transmon_levels.csv").exists()

    def test_modes_table(self, tmp_path):
        payload = {"mode": "modes",
                   "line": {"L_pul": 4e-7, "C_pul": 1.6e-10, "length": 0.0125,
                            "n_modes": 3, "convention": "full-length"}}
        cfg = write_config(tmp_path, payload)
        assert cli.main(["modes", "--config", cfg, "--out", str(tmp_path)]) == 0
        data = np.genfromtxt(tmp_path / "line_modes.csv", delimiter=",", names=True)
        assert data.dtype.names == ("mode", "omega", "n_v", "n_i")
        assert data["omega"][0] == pytest.approx(2 * np.pi * 5e9, rel=1e-12)
        assert data["n_v"][0] == pytest.approx(9.1010e-7, rel=2e-4)

    def test_evolve_series(self, tmp_path):
        payload = {"mode": "evolve", "transmon": {"E_C": 0.3, "E_J": 15},
                   "time_grid": {"t_max": 1.0, "n_points": 2001}}
        cfg = write_config(tmp_path, payload)
        assert cli.main(["evolve", "--config", cfg, "--out", str(tmp_path)]) == 0
        data = np.genfromtxt(tmp_path / "evolution.csv", delimiter=",", names=True)
        assert data.dtype.names == ("time", "norm", "energy", "n_expect",
                                    "sin_phi_expect")
        assert np.allclose(data["norm"], 1.0, atol=1e-12)
        assert np.ptp(data["n_expect"]) > 0.1

    def test_bath_spectrum_against_encoded_universe(self, tmp_path):
        payload = {"mode": "bath",
                   "bath": {"cavity_length": 1.0, "wave_speed": 1.0,
                            "total_length": 10.0, "n_cavity_modes": 20,
                            "n_bins": 200}}
        cfg = write_config(tmp_path, payload)
        assert cli.main(["bath", "--config", cfg, "--out", str(tmp_path)]) == 0
        data = np.genfromtxt(tmp_path / "bath_spectrum.csv", delimiter=",",
                             names=True)
        assert np.all(data["rel_err"][:5] < 5e-3)
        summary = json.loads((tmp_path / "summary.json").read_text())
        assert summary["scalars"]["spectrum_rel_err_low5"] < 5e-3
