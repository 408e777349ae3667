import json
import math

import pytest

from tempcorr import cli

TWO_ROOT_TWO = 2.0 * math.sqrt(2.0)


def read_rows(path):
    lines = path.read_text().splitlines()
    header = lines[0].split(",")
    rows = [dict(zip(header, map(float, line.split(",")))) for line in lines[1:]]
    return header, rows


class TestFig2Command:
    def test_writes_expected_table(self, tmp_path):
        out = tmp_path / "fig2.csv"
        assert cli.main(["fig2", "--points", "40", "-o", str(out)]) == 0
        header, rows = read_rows(out)
        assert header == ["x", "S_analytic", "Sprime_analytic",
                          "S_simulated", "Sprime_simulated", "max_violation_margin"]
        assert len(rows) == 40
        for row in rows:
            assert 0.0 < row["x"] < math.pi
            assert row["max_violation_margin"] > 0.0

    def test_row_near_quarter_pi(self, tmp_path):
        out = tmp_path / "fig2.csv"
        cli.main(["fig2", "--points", "99", "-o", str(out)])  # odd count hits pi/4 region densely
        _, rows = read_rows(out)
        nearest = min(rows, key=lambda r: abs(r["x"] - math.pi / 4))
        assert nearest["S_analytic"] == pytest.approx(2.828427, abs=1e-3)

    def test_too_few_points_is_config_error(self, tmp_path, capsys):
        code = cli.main(["fig2", "--points", "1", "-o", str(tmp_path / "x.csv")])
        assert code == cli.EXIT_CONFIG
        assert "grid_points must be ≥ 2" in capsys.readouterr().err

    def test_byte_identical_reruns(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        cli.main(["fig2", "--points", "25", "-o", str(a)])
        cli.main(["fig2", "--points", "25", "-o", str(b)])
        assert a.read_bytes() == b.read_bytes()

    def test_json_format(self, tmp_path):
        out = tmp_path / "fig2.json"
        cli.main(["fig2", "--points", "5", "--format", "json", "-o", str(out)])
        payload = json.loads(out.read_text())
        assert len(payload) == 5
        assert set(payload[0]) == {"x", "S_analytic", "Sprime_analytic",
                                   "S_simulated", "Sprime_simulated", "max_violation_margin"}

    def test_write_failure_is_io_error(self, tmp_path):
        target = tmp_path / "missing_dir" / "fig2.csv"
        assert cli.main(["fig2", "--points", "5", "-o", str(target)]) == cli.EXIT_IO


class TestFig3Command:
    def test_table_and_sidecar(self, tmp_path):
        out = tmp_path / "fig3.csv"
        assert cli.main(["fig3", "--points", "12", "--gamma-max", "5", "-o", str(out)]) == 0
        header, rows = read_rows(out)
        assert header == ["gamma_dt", "K4_minus_2_paper", "S2_minus_1_paper",
                          "K4_minus_2_simulated", "S2_minus_1_simulated"]
        first, last = rows[0], rows[-1]
        assert first["gamma_dt"] == 0.0
        assert first["K4_minus_2_paper"] == pytest.approx(TWO_ROOT_TWO - 2.0, abs=1e-12)
        assert first["S2_minus_1_paper"] == pytest.approx(0.0, abs=1e-12)
        assert last["K4_minus_2_paper"] < 0.0 and last["S2_minus_1_paper"] < 0.0
        sidecar = json.loads((tmp_path / "fig3.csv.json").read_text())
        assert sidecar["K4_crossing_paper_formula"] == pytest.approx(0.2448, abs=1e-3)
        assert sidecar["K4_crossing_simulated"] == pytest.approx(0.4896, abs=1e-3)
        assert sidecar["bisection_tolerance"] == 1e-8


class TestThresholdsCommand:
    def test_reports_and_exit_zero(self, tmp_path):
        out = tmp_path / "th.json"
        assert cli.main(["thresholds", "-o", str(out)]) == 0
        payload = json.loads(out.read_text())
        by_name = {entry["name"]: entry for entry in payload}
        assert by_name["steering_triple"]["formula_value"] == pytest.approx(0.5773503, abs=1e-7)
        assert by_name["lgi_n5"]["formula_value"] == pytest.approx(0.861186, abs=1e-6)
        assert by_name["lgi_n6"]["formula_value"] == pytest.approx(0.877383, abs=1e-6)
        assert all(entry["passed"] for entry in payload)
        assert all(entry["abs_diff"] <= 1e-4 for entry in payload)

    def test_corrupted_tolerance_trips_gate(self, tmp_path, monkeypatch):
        monkeypatch.setenv("TEMPCORR_TOL_SCALE", "0")
        out = tmp_path / "th.json"
        assert cli.main(["thresholds", "-o", str(out)]) == cli.EXIT_THRESHOLD


class TestHierarchyCommand:
    def test_window_column(self, tmp_path):
        out = tmp_path / "h.csv"
        assert cli.main(["hierarchy", "--points", "20", "-o", str(out)]) == 0
        _, rows = read_rows(out)
        by_eta = {round(r["eta"], 2): r for r in rows}
        # inside the steering-without-LG window
        assert by_eta[0.70]["steering_without_lgi"] == 1.0
        assert by_eta[0.70]["S3_violated"] == 1.0 and by_eta[0.70]["K5_violated"] == 0.0
        # below the steering threshold nothing violates
        assert by_eta[0.30]["steering_without_lgi"] == 0.0
        # sharp measurements violate the LG sums as well
        assert by_eta[1.0]["K5_violated"] == 1.0
        assert by_eta[1.0]["steering_without_lgi"] == 0.0


class TestVerifyCommand:
    def test_rk4_suite_passes(self, capsys):
        assert cli.main(["verify", "--suite", "rk4"]) == 0
        assert "rk4: PASS" in capsys.readouterr().out

    def test_corrupted_tolerance_exits_five_with_report(self, monkeypatch, capsys):
        monkeypatch.setenv("TEMPCORR_TOL_SCALE", "0")
        assert cli.main(["verify", "--suite", "rk4"]) == cli.EXIT_VERIFY
        err = capsys.readouterr().err
        report = json.loads(err.strip().splitlines()[-1])
        assert {"quantity", "analytic", "oracle", "abs_diff", "tolerance"} <= set(report)

    def test_theorem2_suite_emits_table(self, capsys):
        assert cli.main(["verify", "--suite", "theorem2", "--points", "50"]) == 0
        out = capsys.readouterr().out
        assert "x,lgi_value,lgi_ordering,lgi_violated,S,Sprime,steering_violated" in out
        assert out.count("\n") >= 51
        assert "theorem2: PASS" in out


class TestConfigValidation:
    @pytest.mark.parametrize("argv", [
        ["fig2", "--eta", "0"],
        ["fig2", "--eta", "1.5"],
        ["fig3", "--gamma-min", "2", "--gamma-max", "1"],
        ["fig3", "--gamma-min", "-1"],
    ])
    def test_bad_values_exit_two(self, argv, tmp_path):
        assert cli.main(argv + ["-o", str(tmp_path / "x.csv")]) == cli.EXIT_CONFIG

    def test_unknown_command_exits_two(self):
        assert cli.main(["frobnicate"]) == 2

    def test_threads_env_respected(self, tmp_path, monkeypatch):
        monkeypatch.setenv("TEMPCORR_THREADS", "1")
        out = tmp_path / "single.csv"
        assert cli.main(["fig2", "--points", "10", "-o", str(out)]) == 0
        monkeypatch.setenv("TEMPCORR_THREADS", "4")
        out4 = tmp_path / "multi.csv"
        assert cli.main(["fig2", "--points", "10", "-o", str(out4)]) == 0
        assert out.read_bytes() == out4.read_bytes()
