import json

import pytest

from coneflats.cli import main as cli_main
from coneflats.config import validate_config
from coneflats.pipeline import make_grid_box, run_build, run_export, run_verify
from coneflats.report import EXIT_CONFIG, EXIT_DEGENERACY, EXIT_VERIFY, Record, Report

SMALL = {
    "steps": 9,
    "verify": {"random_checks": 20, "convergence_check": False},
}


@pytest.fixture(scope="module")
def small_report():
    return run_verify(validate_config(SMALL))


class TestVerify:
    def test_all_records_pass(self, small_report):
        assert small_report.exit_code == 0
        assert not small_report.failed

    def test_record_fields_complete(self, small_report):
        for rec in small_report.records:
            assert rec.name
            assert rec.identity
            assert isinstance(rec.passed, bool)

    def test_report_values_match_direct_library_calls(self, small_report):
        # the report is a thin shell: spot-check records against the library
        from coneflats.dressing import dress_frame, dressed_solution
        from coneflats.frames import ExtendedFrame
        from coneflats.pipeline import make_element
        from coneflats.cartan import make_basis
        from coneflats.uksystem import uk_residual

        cfg = validate_config(SMALL)
        basis = make_basis(cfg.n)
        frame = ExtendedFrame(basis)
        for e in cfg.dressing:
            frame = dress_frame(frame, make_element(e, cfg.n))
        res = uk_residual(dressed_solution(frame, make_grid_box(cfg)))
        rec = next(r for r in small_report.records if r.name == "dressed_uk_residual")
        assert rec.residual == pytest.approx(res.max, rel=1e-12)

    def test_corrupted_solution_fails_gate(self):
        raw = dict(SMALL)
        raw["verify"] = dict(SMALL["verify"], corrupt_xi=0.5)
        report = run_verify(validate_config(raw))
        names = {r.name for r in report.failed}
        assert "dressed_uk_residual" in names
        assert report.exit_code == EXIT_VERIFY

    def test_channel_verify_passes(self):
        report = run_verify(validate_config({"variant": "channel", **SMALL}))
        assert report.exit_code == 0
        names = {r.name for r in report.records}
        assert "channel_repeated_isotropy_closed" in names
        assert "channel_leaf_spheres" in names

    def test_json_deterministic(self):
        cfg = validate_config(SMALL)
        assert run_verify(cfg).to_json() == run_verify(cfg).to_json()


class TestReportLogic:
    def test_exit_codes(self):
        rep = Report(config={}, masked_budget=0.01)
        rep.add(Record("a", "x", 0.0, 1.0, True))
        assert rep.exit_code == 0
        rep.add(Record("b", "x", 2.0, 1.0, False))
        assert rep.exit_code == EXIT_VERIFY
        rep.add(Record("c", "x", 0.0, 1.0, True, masked_points=50, grid_points=100))
        assert rep.exit_code == EXIT_DEGENERACY

    def test_text_rendering(self):
        rep = Report(config={})
        rep.add(Record("alpha", "identity text", 1e-3, 1e-2, True))
        text = rep.to_text()
        assert "PASS" in text and "alpha" in text


class TestBuildExport:
    def test_build_then_export(self):
        cfg = validate_config({"steps": 5})
        artifacts = run_build(cfg)
        out = run_export(cfg, artifacts)
        assert cfg.outputs.csv in out
        assert cfg.outputs.obj in out
        assert out[cfg.outputs.csv] == artifacts["immersion.csv"]

    def test_export_requires_artifacts(self):
        cfg = validate_config({"steps": 5})
        from coneflats.errors import ConfigError

        with pytest.raises(ConfigError):
            run_export(cfg, {"immersion.csv": "x"})

    def test_manifest_contents(self):
        cfg = validate_config({"steps": 5})
        manifest = json.loads(run_build(cfg)["manifest.json"])
        assert manifest["grid"]["points"] == 125
        assert manifest["masked_points"] == 0
        assert manifest["config"]["variant"] == "semisimple"


class TestCli:
    def _write_config(self, tmp_path, extra=""):
        path = tmp_path / "cfg.yaml"
        path.write_text(
            "steps: 9\nverify:\n  random_checks: 10\n  convergence_check: false\n"
            + extra,
            encoding="utf-8",
        )
        return path

    def test_build_export_round_trip(self, tmp_path):
        cfg = self._write_config(tmp_path)
        out = tmp_path / "out"
        assert cli_main(["build", "--config", str(cfg), "--out", str(out)]) == 0
        assert (out / "immersion.csv").exists()
        assert (out / "manifest.json").exists()
        assert cli_main(["export", "--config", str(cfg), "--out", str(out)]) == 0
        assert (out / "export.csv").exists()
        assert (out / "slice.obj").exists()

    def test_export_without_build_is_usage_error(self, tmp_path):
        cfg = self._write_config(tmp_path)
        code = cli_main(["export", "--config", str(cfg), "--out", str(tmp_path / "empty")])
        assert code == EXIT_CONFIG

    def test_verify_writes_report_and_exits_zero(self, tmp_path, capsys):
        cfg = self._write_config(tmp_path)
        out = tmp_path / "rep"
        assert cli_main(["verify", "--config", str(cfg), "--out", str(out)]) == 0
        assert (out / "report.json").exists()
        assert (out / "report.txt").exists()
        assert "records passed" in capsys.readouterr().out

    def test_verify_nonzero_on_corruption(self, tmp_path):
        cfg = self._write_config(tmp_path, "  corrupt_xi: 0.5\n")
        code = cli_main(["verify", "--config", str(cfg), "--out", str(tmp_path / "rep")])
        assert code == EXIT_VERIFY

    def test_config_error_exit_code(self, tmp_path):
        path = tmp_path / "bad.yaml"
        path.write_text("c: [1, 1, 1]\n", encoding="utf-8")
        assert cli_main(["build", "--config", str(path), "--out", str(tmp_path)]) == EXIT_CONFIG

    def test_build_determinism_across_runs(self, tmp_path):
        cfg = self._write_config(tmp_path)
        out1, out2 = tmp_path / "a", tmp_path / "b"
        cli_main(["build", "--config", str(cfg), "--out", str(out1)])
        cli_main(["build", "--config", str(cfg), "--out", str(out2)])
        for name in ("immersion.csv", "curvature.csv", "manifest.json"):
            assert (out1 / name).read_bytes() == (out2 / name).read_bytes()

    def test_info_runs(self, capsys):
        assert cli_main(["info"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["commands"] == ["build", "verify", "export", "info"]

    def test_parallel_flag_matches_serial(self, tmp_path):
        cfg = self._write_config(tmp_path)
        out1, out2 = tmp_path / "s", tmp_path / "p"
        assert cli_main(["verify", "--config", str(cfg), "--out", str(out1)]) == 0
        assert cli_main(["verify", "--config", str(cfg), "--out", str(out2),
                         "--parallel", "4"]) == 0
        a = json.loads((out1 / "report.json").read_text())
        b = json.loads((out2 / "report.json").read_text())
        assert a["records"] == b["records"]
