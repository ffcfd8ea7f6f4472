import json
import numpy as np
import pandas as pd
from src.core.algebra import Precision
from src.reports.figures import phase_figure
from src.reports.report import CheckResult, ReportDocument, Status
from src.reports.writers import ArtifactWriter, dumps, to_jsonable, zeros_frame


def test_check_constructors():
    assert CheckResult.below("drift", 1e-9, 1e-7).passed
    assert not CheckResult.below("drift", 1e-7, 1e-7).passed
    assert CheckResult.at_least("margin", -1e-7, -1e-6).passed
    assert CheckResult.non_increasing("distance", [0.3, 0.2, 0.2]).passed
    assert not CheckResult.non_increasing("distance", [0.3, 0.31]).passed
    failed = CheckResult.failed("command cubic", RuntimeError("cross-check failed"))
    assert not failed.passed
    assert failed.detail == "RuntimeError - cross-check failed"
    assert failed.as_dict()["status"] == "fail"


def test_report_status_and_ratio():
    report = ReportDocument("verify", {"family": "cubic"})
    assert report.status is Status.PASS
    assert report.pass_rate == "0.00%"
    report.add(CheckResult.holds("a", True), CheckResult.holds("b", True))
    assert report.exit_code == 0
    report.extend([CheckResult.below("c", 2.0, 1.0)])
    assert report.total_checks == 3
    assert report.pass_rate == "66.67%"
    assert report.status is Status.FAIL
    assert report.exit_code == 1
    assert [c.name for c in report.failures()] == ["c"]


def test_to_jsonable():
    ctx = Precision(30).context()
    hp = ctx.mpf(1) / 3
    value = {
        "z": 1 + 2j,
        "flag": np.bool_(True),
        "n": np.int64(3),
        "inf": float("inf"),
        "array": np.array([0.5, 1.5]),
        "status": Status.PASS,
        "hp": hp,
        "scalar": Precision(20).scalar("0.5"),
    }
    converted = to_jsonable(value)
    assert converted["z"] == {"re": 1.0, "im": 2.0}
    assert converted["flag"] is True
    assert converted["n"] == 3
    assert converted["inf"] == "inf"
    assert converted["array"] == [0.5, 1.5]
    assert converted["status"] == "pass"
    assert converted["hp"].startswith("0.33333333333333333333")
    assert converted["scalar"] == "0.50000000000000000000"


def test_dumps_sorts_keys():
    text = dumps({"b": 1, "a": {"d": 2, "c": 3}})
    assert text.index('"a"') < text.index('"b"')
    assert json.loads(text) == {"a": {"c": 3, "d": 2}, "b": 1}


def test_writer_respects_emit_and_records_manifest(tmp_path):
    writer = ArtifactWriter(tmp_path, ["csv", "json"])
    writer.write_csv("zeros", zeros_frame([1 + 1j, -1 + 1j], [0.01, 0.02]))
    writer.write_svg("figure", phase_figure([0.0, 1.0], [1.4, 1.7], 1.0005))
    report = ReportDocument("zeros", {})
    writer.write_report("zeros_report", report)

    assert sorted(p.name for p in tmp_path.iterdir()) == ["zeros.csv", "zeros_report.json"]
    assert [entry["file"] for entry in report.artifacts] == ["zeros.csv"]
    df = pd.read_csv(tmp_path / "zeros.csv")
    assert list(df.columns) == ["index", "re", "im", "dist_to_arc"]
    saved = json.loads((tmp_path / "zeros_report.json").read_text())
    assert saved["artifacts"][0]["sha256"] == report.artifacts[0]["sha256"]


def test_outputs_are_byte_identical(tmp_path):
    contents = []
    for name in ("first", "second"):
        writer = ArtifactWriter(tmp_path / name, ["csv", "svg"])
        writer.write_csv("zeros", zeros_frame([0.1 + 0.7j, -0.1 + 0.7j], [0.0, 0.0]))
        writer.write_svg("phase", phase_figure(np.linspace(-2, 2.5, 5), np.linspace(1.2, 2.2, 5), 1.0005))
        contents.append([entry["sha256"] for entry in writer.manifest])
    assert contents[0] == contents[1]
