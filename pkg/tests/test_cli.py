import os
import sys
from unittest.mock import patch

import polars as pl
import pytest
import yaml

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))
import run_correlations
from lib.classes.validators import ValidationResult
from lib.sweep import read_result_csv


def write_config(tmp_path, **sections):
    raw = {
        "units": "gamma",
        "model": {"delta_over_2omega": -0.263},
        "sweep": {"parameter": "delta1", "start": 49.0, "stop": 51.0, "steps": 3},
        "nbar": [0.5],
        "oracle": {"mode": "off"},
        "check": {"draws": 3, "seed": 1},
    }
    raw.update(sections)
    path = tmp_path / "config.yaml"
    path.write_text(yaml.safe_dump(raw))
    return str(path)


def small_table(status="ok"):
    return pl.DataFrame(
        {
            "delta1": [49.0, 50.0],
            "nbar": [0.5, 0.5],
            "mean_a": [0.1, 0.2],
            "mean_b": [2.0, 2.5],
            "csi": [1.1, 0.9],
            "status": ["ok", status],
        }
    )


class TestCommands:
    def test_sweep_writes_csv(self, tmp_path):
        out = tmp_path / "results" / "scan.csv"
        code = run_correlations.main(["sweep", "--config", write_config(tmp_path), "--out", str(out)])
        assert code == run_correlations.EXIT_OK
        table = read_result_csv(str(out))
        assert table.height == 3
        assert table["status"].to_list() == ["ok", "ok", "ok"]

    def test_steady_prints_results(self, tmp_path, capsys):
        code = run_correlations.main(["steady", "--config", write_config(tmp_path, nbar=[0.5, 2.0])])
        assert code == run_correlations.EXIT_OK
        printed = capsys.readouterr().out
        assert printed.count("--- nbar") == 2
        assert "csi = " in printed
        assert "status: ok" in printed

    def test_steady_undriven_point_fails(self, tmp_path, capsys):
        config = write_config(tmp_path, model={"omega_rabi": 0.0})
        assert run_correlations.main(["steady", "--config", config]) == run_correlations.EXIT_NUMERICAL
        assert "status: error" in capsys.readouterr().out

    def test_check_passes(self, tmp_path, capsys):
        code = run_correlations.main(["check", "--config", write_config(tmp_path)])
        assert code == run_correlations.EXIT_OK
        assert "summary" in capsys.readouterr().out

    def test_oracle_compare_enables_reduced_oracle(self, tmp_path):
        seen = {}

        def fake_sweep(config):
            seen["mode"] = config.oracle.mode
            return small_table()

        with patch("run_correlations.run_sweep", side_effect=fake_sweep):
            code = run_correlations.main(
                ["oracle-compare", "--config", write_config(tmp_path), "--out", str(tmp_path / "cmp.csv")]
            )
        assert code == run_correlations.EXIT_OK
        assert seen["mode"] == "reduced"


class TestExitCodes:
    def test_missing_config(self, tmp_path):
        code = run_correlations.main(["sweep", "--config", str(tmp_path / "absent.yaml")])
        assert code == run_correlations.EXIT_CONFIG

    def test_invalid_config(self, tmp_path):
        config = write_config(tmp_path, units="hertz")
        assert run_correlations.main(["sweep", "--config", config]) == run_correlations.EXIT_CONFIG

    def test_invalid_override(self, tmp_path):
        config = write_config(tmp_path)
        assert run_correlations.main(["sweep", "--config", config, "--order", "2"]) == run_correlations.EXIT_CONFIG

    def test_invalid_jobs_environment(self, tmp_path):
        with patch.dict(os.environ, {"PPC_JOBS": "many"}):
            code = run_correlations.main(["sweep", "--config", write_config(tmp_path)])
        assert code == run_correlations.EXIT_CONFIG

    def test_fatal_rows(self, tmp_path):
        with patch("run_correlations.run_sweep", return_value=small_table("singular")):
            code = run_correlations.main(
                ["sweep", "--config", write_config(tmp_path), "--out", str(tmp_path / "scan.csv")]
            )
        assert code == run_correlations.EXIT_NUMERICAL
        assert (tmp_path / "scan.csv").exists()

    def test_invariant_failure(self, tmp_path):
        failed = ValidationResult()
        failed.add_error("normalization row is not zero")
        with patch("run_correlations.run_invariant_suite", return_value=failed):
            code = run_correlations.main(["check", "--config", write_config(tmp_path)])
        assert code == run_correlations.EXIT_INVARIANT

    def test_bad_cutoff_argument(self, tmp_path):
        with pytest.raises(SystemExit) as info:
            run_correlations.main(["sweep", "--config", write_config(tmp_path), "--cutoff", "8x24"])
        assert info.value.code == 2

    def test_parse_cutoff(self):
        assert run_correlations.parse_cutoff("8,24") == (8, 24)
