"""コマンドライン入口（終了コード・設定の優先順位・出力）"""

import csv
import json
from pathlib import Path

import pytest

from bergman_lab.cli import build_parser, main, resolve_config
from bergman_lab.config import Settings
from bergman_lab.constants import VERDICT_BOUNDED, VERDICT_COMPACT, VERDICT_NOT_COMPACT, VERDICT_UNBOUNDED
from bergman_lab.services.report import parse_report
from bergman_lab.services.toeplitz import kernel_truncation_deficit

GOLDEN_GEOMETRY = Path(__file__).parent / "golden" / "verify_geometry.json"
SMALL_RULE = ["--quad-radial", "16", "--quad-angular", "64"]


def _env(**overrides) -> Settings:
    return Settings(_env_file=None, **overrides)


class TestResolveConfig:
    def test_flag_beats_file_beats_env(self, tmp_path):
        path = tmp_path / "lab.conf"
        path.write_text("N=4\nsymbol=abs2\nangles=3\n")
        args = build_parser().parse_args(["matrix", "--config", str(path), "--N", "2"])
        config, level = resolve_config(args, _env(angles=7, log_level="warning"))
        assert config.n == 2
        assert config.symbol == "abs2"
        assert config.angles == 3
        assert level == "WARNING"

    def test_env_defaults(self):
        args = build_parser().parse_args(["bound-check", "--symbol", "abs2"])
        config, _ = resolve_config(args, _env(default_order=5, radii="0.9,0.3"))
        assert config.n == 5
        assert config.radii == [0.3, 0.9]
        assert config.q == 2.0

    @pytest.mark.parametrize("argv, expected", [
        (["compact-check", "--symbol", "abs2"], 256),
        (["berezin", "--symbol", "abs2", "--radii", "0,0.96"], 256),
        (["berezin", "--symbol", "abs2", "--radii", "0,0.95"], 64),
        (["compact-check", "--symbol", "abs2", "--N", "32"], 32),
        (["matrix", "--symbol", "abs2"], 64),
    ])
    def test_order_default_follows_outer_radius(self, argv, expected):
        config, _ = resolve_config(build_parser().parse_args(argv), _env())
        assert config.n == expected

    def test_luecking_q_default(self):
        args = build_parser().parse_args(["luecking", "--atoms", "0,0,1"])
        config, _ = resolve_config(args, _env())
        assert config.q == 1.0


class TestExitCodes:
    def test_verify_geometry(self, tmp_path):
        out = tmp_path / "verify.json"
        assert main(["verify", "--suite", "geometry", "--output", str(out)]) == 0
        report = parse_report(out.read_bytes())
        assert report.kind == "identity-suite"
        assert report.summary["passed"] is True

    def test_unknown_suite(self):
        assert main(["verify", "--suite", "nope"]) == 2

    def test_missing_symbol(self):
        assert main(["berezin"]) == 2

    def test_syntax_error(self):
        assert main(["matrix", "--symbol", "w+", "--N", "2"]) == 2

    def test_radius_out_of_range(self):
        assert main(["bound-check", "--symbol", "abs2", "--radii", "0.5,0.999"]) == 2

    def test_missing_config_file(self, tmp_path):
        assert main(["matrix", "--symbol", "abs2", "--config", str(tmp_path / "none.conf")]) == 2

    def test_unknown_log_level(self):
        assert main(["matrix", "--symbol", "abs2", "--log-level", "loud"]) == 2

    def test_non_integrable_symbol(self):
        assert main(["matrix", "--symbol", "(1-abs(w)^2)^(-1)", "--N", "2"]) == 3

    def test_unknown_command(self):
        with pytest.raises(SystemExit):
            main(["nope"])


class TestOutput:
    def test_matrix_csv(self, tmp_path):
        out = tmp_path / "m.csv"
        assert main(["matrix", "--symbol", "abs2", "--N", "3", "--format", "csv", "--output", str(out), *SMALL_RULE]) == 0
        rows = list(csv.reader(out.read_text().splitlines()))
        assert rows[0] == ["re_0", "im_0", "re_1", "im_1", "re_2", "im_2"]
        diagonal = [float(rows[k + 1][2 * k]) for k in range(3)]
        assert diagonal == pytest.approx([1 / 2, 2 / 3, 3 / 4], rel=1e-12)

    def test_matrix_json_to_stdout(self, capsysbinary):
        assert main(["matrix", "--symbol", "const:1", "--N", "2", *SMALL_RULE]) == 0
        report = parse_report(capsysbinary.readouterr().out)
        assert report.kind == "matrix"
        assert report.summary["operator_norm"] == pytest.approx(1.0)
        assert report.versions

    @pytest.mark.parametrize("symbol, verdict", [
        ("disk:0.5", VERDICT_COMPACT),
        ("const:1", VERDICT_NOT_COMPACT),
    ])
    def test_verdict_does_not_change_exit_code(self, tmp_path, symbol, verdict):
        out = tmp_path / "c.json"
        argv = ["compact-check", "--symbol", symbol, "--N", "32", "--radii", "0,0.6,0.8,0.9,0.95,0.99",
                "--angles", "2", "--output", str(out), *SMALL_RULE, "--graded-panels", "8"]
        assert main(argv) == 0
        assert parse_report(out.read_bytes()).summary["verdict"] == verdict

    def test_berezin_of_one_near_boundary(self, tmp_path):
        out = tmp_path / "b.json"
        argv = ["berezin", "--symbol", "const:1", "--radii", "0.9,0.99", "--angles", "2", "--output", str(out), *SMALL_RULE]
        assert main(argv) == 0
        report = parse_report(out.read_bytes())
        assert report.parameters["N"] == 256
        assert [rule["radius"] for rule in report.parameters["rules"]] == [0.9, 0.99]
        for row in report.values:
            assert row["direct_re"] == pytest.approx(1.0, abs=1e-8)
            deficit = kernel_truncation_deficit(row["radius"], 256)
            assert row["kernel_deficit"] == pytest.approx(deficit)
            assert row["matrix_re"] == pytest.approx(1.0 - deficit, abs=1e-10)

    def test_schur_reports_truncation_constants(self, tmp_path):
        out = tmp_path / "s.json"
        argv = ["schur", "--symbol", "const:1", "--N", "16", "--radii", "0,0.5", "--angles", "2",
                "--r-schedule", "0.6,0.3", "--output", str(out), *SMALL_RULE]
        assert main(argv) == 0
        report = parse_report(out.read_bytes())
        assert report.kind == "schur"
        assert report.parameters["convention"] == "weight-squared"
        assert report.values[0]["c1"] == pytest.approx(4.0 / 3.0, rel=1e-9)
        truncation = report.summary["truncation"]
        assert [entry["r"] for entry in truncation] == [0.3, 0.6]
        assert truncation[1]["c2"] < truncation[0]["c2"] < report.summary["sup_c2"]
        assert "weight_plain" not in report.summary

    def test_bound_check_boundary_singular_symbol(self, tmp_path):
        out = tmp_path / "bc.json"
        argv = ["bound-check", "--symbol", "(1-abs(w)^2)^(-0.75)", "--N", "256", "--radii", "0,0.5,0.9",
                "--angles", "2", "--output", str(out)]
        assert main(argv) == 0
        report = parse_report(out.read_bytes())
        assert report.summary["verdict"] in (VERDICT_BOUNDED, VERDICT_UNBOUNDED)
        assert report.parameters["flags"]["boundarySingular"] is True


class TestGoldenReport:
    def test_verify_geometry_matches_golden(self, tmp_path):
        out = tmp_path / "verify.json"
        argv = ["verify", "--suite", "geometry", "--seed", "20240101", "--quad-radial", "64", "--quad-angular", "256",
                "--output", str(out)]
        assert main(argv) == 0
        report = parse_report(out.read_bytes())
        stable = {
            "kind": report.kind,
            "parameters": report.parameters,
            "records": [{k: r[k] for k in ("name", "passed", "suite", "tolerance")} for r in report.values],
            "summary": {k: report.summary[k] for k in ("checks", "failed", "passed")},
        }
        assert stable == json.loads(GOLDEN_GEOMETRY.read_text())
