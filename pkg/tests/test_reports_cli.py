import json

import pytest

from carleman_lab.cli import StudyConfig, main, run_experiment
from carleman_lab.errors import ConfigError, InvalidArgumentError, ReportIOError
from carleman_lab.reports import emit_csv_rows, emit_json, emit_report
from carleman_lab.verifier import check_flawed_inequality

CONFIG = """\
[study]
manifold = {manifold}
n = 3
j_max = 120
band_limit = 6
tau_values = 8 9
sigma_list = 0.5 0.25
T = 5.0
h = 0.02
trials = 2
seed = 7
output_dir = out
"""


def write_config(tmp_path, manifold="sphere"):
    path = tmp_path / "study.ini"
    path.write_text(CONFIG.format(manifold=manifold))
    return path


class TestEmitReport:
    def test_single_row_csv(self, tmp_path):
        rep = check_flawed_inequality(10.0, 0.0, 3)
        path = tmp_path / "r.csv"
        emit_report([rep], "csv", path)
        lines = path.read_text().splitlines()
        assert lines[0].startswith("name,")
        assert len(lines) == 2
        assert path.read_text().endswith("\n")

    def test_byte_identical_reruns(self, tmp_path):
        reports = [check_flawed_inequality(10.0, t, 3) for t in (0.0, 0.5, 1.0)]
        p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
        emit_report(reports, "csv", p1)
        emit_report(reports, "csv", p2)
        assert p1.read_bytes() == p2.read_bytes()

    def test_json_round_trips(self, tmp_path):
        reports = [check_flawed_inequality(10.0, 1.0, 3)]
        path = tmp_path / "r.json"
        emit_report(reports, "json", path)
        parsed = json.loads(path.read_text())
        assert parsed[0]["name"] == "sum_vs_integral"
        assert isinstance(parsed[0]["lhs"], float)

    def test_empty_and_bad_format_rejected(self, tmp_path):
        with pytest.raises(InvalidArgumentError):
            emit_report([], "csv", tmp_path / "x.csv")
        rep = check_flawed_inequality(10.0, 0.0, 3)
        with pytest.raises(InvalidArgumentError):
            emit_report([rep], "xml", tmp_path / "x.xml")

    def test_seventeen_digit_floats(self, tmp_path):
        path = tmp_path / "f.csv"
        emit_csv_rows([{"name": "x", "v": 1.0 / 3.0}], path)
        assert "0.33333333333333331" in path.read_text()

    def test_json_helper_sorts_keys(self, tmp_path):
        path = tmp_path / "s.json"
        emit_json({"b": 1, "a": {"d": 2.0, "c": [1, 2]}}, path)
        text = path.read_text()
        assert text.index('"a"') < text.index('"b"')
        json.loads(text)

    def test_io_failure_is_typed_with_path(self, tmp_path):
        missing_dir = tmp_path / "not" / "there" / "r.csv"
        with pytest.raises(ReportIOError) as err:
            emit_csv_rows([{"name": "x"}], missing_dir)
        assert str(missing_dir) == err.value.path


class TestStudyConfig:
    def test_parse_and_defaults(self, tmp_path):
        cfg = StudyConfig.from_file(write_config(tmp_path))
        assert cfg.manifold == "sphere"
        assert cfg.tau_values == [8.0, 9.0]
        assert cfg.sigma_list == [0.5, 0.25]
        assert cfg.seed == 7

    def test_invalid_manifold_lists_field(self, tmp_path):
        path = write_config(tmp_path, manifold="torus")
        with pytest.raises(ConfigError) as err:
            StudyConfig.from_file(path)
        assert "manifold" in err.value.fields

    def test_missing_file_and_section(self, tmp_path):
        with pytest.raises(ConfigError):
            StudyConfig.from_file(tmp_path / "nope.ini")
        bad = tmp_path / "bad.ini"
        bad.write_text("[other]\nx = 1\n")
        with pytest.raises(ConfigError):
            StudyConfig.from_file(bad)

    def test_file_manifold_spectrum(self, tmp_path):
        spec_path = tmp_path / "spec.txt"
        spec_path.write_text("0 1\n1.0 2\n2.5 2\n")
        path = write_config(tmp_path, manifold=f"file:{spec_path}")
        cfg = StudyConfig.from_file(path)
        assert cfg.spectrum().distinct_values == (0.0, 1.0, 2.5)


class TestCli:
    def test_gap_run_writes_artifacts(self, tmp_path):
        cfg_path = write_config(tmp_path)
        rc = main(["gap", "--config", str(cfg_path), "--out", str(tmp_path / "out")])
        assert rc == 0
        for name in ("gap.csv", "summary.json", "manifest.txt"):
            assert (tmp_path / "out" / name).exists()
        summary = json.loads((tmp_path / "out" / "summary.json").read_text())
        assert summary["ok"] is True
        manifest = (tmp_path / "out" / "manifest.txt").read_text()
        assert "command = gap" in manifest and "study.seed = 7" in manifest

    def test_invalid_manifold_exits_one(self, tmp_path):
        cfg_path = write_config(tmp_path, manifold="torus")
        rc = main(["gap", "--config", str(cfg_path), "--out", str(tmp_path / "out")])
        assert rc == 1

    def test_unknown_command_usage_error(self, tmp_path):
        cfg_path = write_config(tmp_path)
        with pytest.raises(SystemExit) as err:
            main(["frobnicate", "--config", str(cfg_path)])
        assert err.value.code == 2

    def test_flaw_demo_finds_counterexample(self, tmp_path):
        cfg_path = write_config(tmp_path)
        out = tmp_path / "out"
        rc = main(["flaw-demo", "--config", str(cfg_path), "--out", str(out)])
        assert rc == 0
        summary = json.loads((out / "summary.json").read_text())
        assert summary["counterexample"] is not None
        assert summary["violations"] >= 1

    def test_carleman_sweep_requires_sphere_n3(self, tmp_path):
        cfg_path = write_config(tmp_path, manifold="circle")
        rc = main(["carleman-sweep", "--config", str(cfg_path), "--out", str(tmp_path / "o")])
        assert rc == 1

    def test_seed_override_changes_manifest(self, tmp_path):
        cfg_path = write_config(tmp_path)
        out = tmp_path / "out"
        main(["gap", "--config", str(cfg_path), "--out", str(out), "--seed", "99"])
        assert "study.seed = 99" in (out / "manifest.txt").read_text()

    def test_run_experiment_unknown_command(self, tmp_path):
        cfg = StudyConfig.from_file(write_config(tmp_path))
        with pytest.raises(ConfigError):
            run_experiment(cfg, "nope", tmp_path / "x")

    def test_failed_assertion_exits_two(self, tmp_path, monkeypatch):
        # exit status 2 iff a command's acceptance assertion fails
        from carleman_lab import cli

        def failing(cfg):
            return [{"name": "stub", "holds": 0}], {"ok": False}, False

        monkeypatch.setitem(cli._HANDLERS, "gap", failing)
        cfg = StudyConfig.from_file(write_config(tmp_path))
        assert run_experiment(cfg, "gap", tmp_path / "x") == 2
