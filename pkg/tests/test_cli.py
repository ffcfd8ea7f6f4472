import json
import pytest
from src.cli import _overrides, build_parser, main


def test_parser_common_flags():
    args = build_parser().parse_args(["zeros", "--family", "quintic", "--class", "4,5", "--n", "12", "--digits", "80"])
    overrides = _overrides(args)
    assert overrides["family"] == "quintic"
    assert overrides["contour_class"] == "4,5"
    assert overrides["n"] == 12
    assert overrides["digits"] == 80
    assert overrides["out"] is None


def test_cubic_needs_K_or_critical():
    parser = build_parser()
    with pytest.raises(SystemExit):
        parser.parse_args(["cubic"])
    with pytest.raises(SystemExit):
        parser.parse_args(["cubic", "--K", "0", "--critical"])
    assert _overrides(parser.parse_args(["cubic", "--critical"]))["critical"] is True


def test_critical_constants_command(tmp_path, monkeypatch, capsys):
    monkeypatch.delenv("SCURVE_CONFIG", raising=False)
    assert main(["cubic", "--critical", "--out", str(tmp_path), "--emit", "json"]) == 0
    printed = capsys.readouterr().out
    assert "K_star = 1.00054" in printed
    report = json.loads((tmp_path / "cubic_critical_report.json").read_text())
    assert report["status"] == "pass"
    assert report["config"]["emit"] == ["json"]
    assert report["data"]["critical_constants"]["v_star"] == pytest.approx(3.150037074, abs=1e-6)


def test_bad_configuration_exits_with_failure(tmp_path, monkeypatch, capsys):
    monkeypatch.delenv("SCURVE_CONFIG", raising=False)
    config = tmp_path / "run.cfg"
    config.write_text("panels = -4\n")
    assert main(["cubic", "--K", "0", "--config", str(config)]) == 1
    assert "greater than 0" in capsys.readouterr().err


def test_failing_command_still_writes_a_report(tmp_path, monkeypatch):
    monkeypatch.delenv("SCURVE_CONFIG", raising=False)
    code = main(["trace", "--family", "quintic", "--start", "y1", "--out", str(tmp_path), "--emit", "json"])
    assert code == 1
    report = json.loads((tmp_path / "trace_report.json").read_text())
    assert report["status"] == "fail"
    assert "only defined for the cubic family" in report["checks"][0]["detail"]


@pytest.mark.slow
def test_trace_from_y1_writes_csv(tmp_path, monkeypatch):
    monkeypatch.delenv("SCURVE_CONFIG", raising=False)
    code = main(["trace", "--family", "cubic", "--K", "0", "--start", "y1", "--out", str(tmp_path), "--emit", "csv,json"])
    assert code == 0
    header = (tmp_path / "trace_forward.csv").read_text().splitlines()[0]
    assert header == "index,arclength,re,im"


@pytest.mark.slow
def test_two_cut_cubic_draws_the_zeros(tmp_path, monkeypatch):
    monkeypatch.delenv("SCURVE_CONFIG", raising=False)
    assert main(["cubic", "--K", "2", "--out", str(tmp_path), "--emit", "svg,json"]) == 0
    report = json.loads((tmp_path / "cubic_K2_report.json").read_text())
    assert [a["file"] for a in report["artifacts"]] == ["cubic_K2.svg"]
    assert "<svg" in (tmp_path / "cubic_K2.svg").read_text()


@pytest.mark.slow
def test_quintic_command_passes(tmp_path, monkeypatch):
    monkeypatch.delenv("SCURVE_CONFIG", raising=False)
    assert main(["quintic", "--class", "3,1", "--out", str(tmp_path), "--emit", "json"]) == 0
    report = json.loads((tmp_path / "quintic_p1_report.json").read_text())
    assert report["status"] == "pass"
    assert report["data"]["equilibrium"]["mass"] == pytest.approx(1.0, abs=1e-6)


@pytest.mark.slow
def test_zeros_command_writes_table_cloud_and_figure(tmp_path, monkeypatch):
    monkeypatch.delenv("SCURVE_CONFIG", raising=False)
    assert main(["zeros", "--family", "cubic", "--K", "0", "--n", "8", "--out", str(tmp_path)]) == 0
    rows = (tmp_path / "zeros_cubic_n8.csv").read_text().splitlines()
    assert rows[0] == "index,re,im,dist_to_arc"
    assert len(rows) == 9
    cloud = json.loads((tmp_path / "zeros_cubic_n8_cloud.json").read_text())
    assert cloud["n"] == 8
    assert cloud["max_distance"] < 0.5
    assert (tmp_path / "zeros_cubic_n8.svg").exists()


@pytest.mark.slow
def test_verify_suite_passes_and_is_reproducible(tmp_path, monkeypatch):
    monkeypatch.delenv("SCURVE_CONFIG", raising=False)
    assert main(["verify", "--out", str(tmp_path)]) == 0
    first = (tmp_path / "verify_report.json").read_bytes()
    report = json.loads(first)
    assert report["summary"]["pass_rate"] == "100.00%"
    names = [check["name"] for check in report["checks"]]
    assert "cubic K=1.00054 : support runs z1 -> z0 -> z2" in names
    assert "quintic T3,1 n=12 : Kolmogorov distance" in names
    assert "traced arcs are identical on a second run" in names

    assert main(["verify", "--out", str(tmp_path)]) == 0
    second = (tmp_path / "verify_report.json").read_bytes()
    assert second == first
    hashes = {a["file"]: a["sha256"] for a in json.loads(second)["artifacts"]}
    assert hashes == {a["file"]: a["sha256"] for a in report["artifacts"]}


@pytest.mark.slow
def test_verify_fails_cleanly_on_unreachable_drift_tolerance(tmp_path, monkeypatch, capsys, config_file):
    monkeypatch.delenv("SCURVE_CONFIG", raising=False)
    path = config_file("drift_tol = 1e-15\n")
    assert main(["verify", "--config", str(path), "--out", str(tmp_path / "out"), "--emit", "json"]) == 1
    report = json.loads((tmp_path / "out" / "verify_report.json").read_text())
    assert report["status"] == "fail"
    failing = [check["name"] for check in report["checks"] if check["status"] == "fail"]
    assert any(name.endswith("level-set drift") for name in failing)
    assert not any(name.startswith("section ") for name in failing)
    captured = capsys.readouterr()
    assert "Traceback" not in captured.out + captured.err
