import json
import logging

import pytest

from cli import main
from gelfand.utils.config import analysis_config
from gelfand.utils.logger import base_logger, set_level

S3 = {"name": "S3", "degree": 3, "generators": [[1, 0, 2], [1, 2, 0]]}


def _write(path, data):
    path.write_text(json.dumps(data), encoding="utf-8")
    return str(path)


def test_catalog(capsys):
    assert main(["catalog"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert any(line.startswith("s3/s2\tgelfand") for line in lines)
    assert any(line.startswith("s4/e\tnon-gelfand") for line in lines)


def test_gelfand_command(tmp_path, capsys):
    group = _write(tmp_path / "group.json", S3)
    subgroup = _write(tmp_path / "subgroup.json", {"generators": [1]})
    assert main(["gelfand", "--group", group, "--subgroup", subgroup]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["verdict"] is True
    assert report["classes"] == 2
    assert report["subgroupOrder"] == 2

    trivial = _write(tmp_path / "trivial.json", {"members": [0]})
    assert main(["gelfand", "--group", group, "--subgroup", trivial]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["verdict"] is False
    assert len(report["witness"]) == 3


def test_max_order_override(tmp_path, monkeypatch):
    monkeypatch.setattr(analysis_config, "max_order", analysis_config.max_order)
    group = _write(tmp_path / "group.json", S3)
    subgroup = _write(tmp_path / "subgroup.json", {"generators": [1]})
    assert main(["--max-order", "3", "gelfand", "--group", group, "--subgroup", subgroup]) == 2


def test_analyze_writes_report(tmp_path):
    out = tmp_path / "analysis.json"
    assert main(["analyze", "--pair", "s3/s2", "--s", "1", "--alpha", "2", "--out", str(out)]) == 0
    report = json.loads(out.read_text(encoding="utf-8"))
    assert report["classSizes"] == [2, 4]
    assert report["plancherel"] == pytest.approx([1, 2])
    assert report["gamma"] == pytest.approx([0, 1.5**0.5])
    assert report["p"] == pytest.approx(4 / 3)
    assert report["weightMode"] == "cayley:1"


def test_analyze_rejects_bad_params():
    assert main(["analyze", "--pair", "z4", "--s", "1", "--alpha", "0.5"]) == 2
    assert main(["analyze", "--pair", "nope"]) == 2


def test_transform_round_trip(tmp_path):
    function = _write(tmp_path / "f.json", {"pair": "s3/s2", "domain": "classes", "values": [[1, 0], [2, -1]]})
    spectrum = tmp_path / "spectrum.json"
    assert main(["transform", "--pair", "s3/s2", "--function", function, "--out", str(spectrum)]) == 0
    assert len(json.loads(spectrum.read_text(encoding="utf-8"))["basisOrder"]) == 2

    recovered = tmp_path / "recovered.json"
    args = ["transform", "--pair", "s3/s2", "--function", str(spectrum), "--inverse", "--out", str(recovered)]
    assert main(args) == 0
    values = json.loads(recovered.read_text(encoding="utf-8"))["values"]
    assert values[0] == pytest.approx([1, 0], abs=1e-12)
    assert values[1] == pytest.approx([2, -1], abs=1e-12)


def test_transform_rejects_other_pair(tmp_path):
    function = _write(tmp_path / "f.json", {"pair": "z4", "domain": "classes", "values": [[1, 0]] * 4})
    assert main(["transform", "--pair", "z8", "--function", function]) == 2


def test_verify(tmp_path):
    out = tmp_path / "report.json"
    args = ["verify", "--pair", "z4,s3/s2", "--suite", "plancherel,hy", "--trials", "5", "--p-grid", "1,2", "--out", str(out)]
    assert main(args) == 0
    report = json.loads(out.read_text(encoding="utf-8"))
    assert report["summary"]["failed"] == 0
    assert report["config"]["pGrid"] == [1, 2]
    assert {record["pair"] for record in report["records"]} == {"z4", "s3/s2"}


def test_verify_configuration_errors():
    assert main(["verify", "--pair", "a5/a4"]) == 2
    assert main(["verify", "--pair", "z4", "--suite", "nope"]) == 2
    assert main(["verify", "--pair", "z4", "--trials", "0"]) == 2


def test_family(tmp_path):
    out = tmp_path / "family.json"
    assert main(["family", "--orders", "4,8", "--out", str(out)]) == 0
    entries = json.loads(out.read_text(encoding="utf-8"))
    assert [entry["order"] for entry in entries] == [4, 8]
    assert entries[0]["modulus"] == pytest.approx(2 / 3**0.5)


def test_log_level_override():
    original = base_logger.level
    try:
        assert main(["--log-level", "WARNING", "catalog"]) == 0
        assert base_logger.level == logging.WARNING
        assert all(handler.level == logging.WARNING for handler in base_logger.handlers)
        assert main(["--log-level", "SUCCESS", "catalog"]) == 0
        assert base_logger.getEffectiveLevel() == 25
    finally:
        set_level(original)
