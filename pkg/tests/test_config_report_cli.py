from __future__ import annotations

import json
import shutil

import pytest
import yaml

from alice.cli import main
from alice.config import load_config, parse_config
from alice.errors import ConfigError, ConfigMissingKey, ConfigRangeError, ConfigTypeError
from alice.report import PhaseStats, RunReport, emit_report, table_row
from conftest import CONFIGS, FIXTURES

BASE = {
    "sources": ["toy_gcd.v"],
    "top": "gcd_top",
    "selected_outputs": ["result"],
    "max_io": 24,
    "max_efpgas": 2,
}


def with_(**changes):
    data = dict(BASE)
    data.update(changes)
    return data


def test_defaults(tmp_path):
    cfg = parse_config(BASE, tmp_path, "x")
    p = cfg.params
    assert (p.fabric_w_min, p.fabric_w_max, p.io_per_side_unit) == (2, 20, 16)
    assert (p.alpha, p.beta, p.rank_order, p.impact) == (1.0, 1.0, "max", "transitive")
    assert p.select_policy.kind == "positive_score"
    assert cfg.sources == (tmp_path / "toy_gcd.v",) and cfg.name == "x"


def test_missing_key_names_it():
    data = dict(BASE)
    del data["top"]
    with pytest.raises(ConfigMissingKey) as info:
        parse_config(data)
    assert info.value.key == "top"


@pytest.mark.parametrize(
    "data, error",
    [
        (with_(max_io="24"), ConfigTypeError),
        (with_(max_io=True), ConfigTypeError),
        (with_(max_io=0), ConfigRangeError),
        (with_(max_efpgas=-1), ConfigRangeError),
        (with_(selected_outputs=[]), ConfigRangeError),
        (with_(fabric={"w_min": 9, "w_max": 3}), ConfigRangeError),
        (with_(score={"alpha": -1}), ConfigRangeError),
        (with_(score={"rank_order": "median"}), ConfigError),
        (with_(filter={"policy": "top_k"}), ConfigError),
        (with_(filter={"impact": "sideways"}), ConfigError),
        (with_(fabric={"w_mn": 2}), ConfigError),
        (with_(maxio=3), ConfigError),
        (with_(fabric=[2, 8]), ConfigTypeError),
        ([1, 2], ConfigTypeError),
    ],
)
def test_invalid_configs(data, error):
    with pytest.raises(error):
        parse_config(data)


def test_load_config_paths(tmp_path):
    cfg = load_config(CONFIGS / "gcd_cfg1.yaml")
    assert cfg.sources == (CONFIGS / "../toy_gcd.v",) and cfg.sources[0].exists()
    assert cfg.name == "gcd_cfg1" and cfg.params.rank_order == "min"
    bad = tmp_path / "bad.yaml"
    bad.write_text("max_io: [1,\n")
    with pytest.raises(ConfigError):
        load_config(bad)
    with pytest.raises(ConfigError):
        load_config(tmp_path / "absent.yaml")


def test_table_dashes_for_absent_phases():
    report = RunReport("iir_top", "cfg1", status="no_candidates", filtering=PhaseStats(1.5, {"R": 0}))
    row = table_row(report)
    assert row[:4] == ["iir_top", "cfg1", "0.002s", "0"]
    assert row[4:] == ["-"] * 7
    assert emit_report(report, "table").splitlines()[0].startswith("Design")


def test_json_round_trip():
    report = RunReport(
        "gcd_top",
        "cfg",
        instances=11,
        filtering=PhaseStats(1.23456, {"R": 5}),
        clustering=PhaseStats(2.0, {"C": 6}),
        selection=PhaseStats(3.0, {"valid_efpgas": 6, "S": 19, "efpga_sizes": ["2x2", "2x2"], "redacted_modules": 2}),
    )
    data = json.loads(emit_report(report, "json"))
    assert data == report.to_dict()
    assert data["filtering"] == {"elapsed_ms": 1.235, "R": 5}
    assert data["selection"]["efpga_sizes"] == ["2x2", "2x2"]
    with pytest.raises(ValueError):
        emit_report(report, "xml")


# -- command line -------------------------------------------------------------


def run_cli(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_cli_success(tmp_path, capsys):
    out_dir = tmp_path / "out"
    code, out, _ = run_cli(
        capsys, "run", "--config", str(CONFIGS / "gcd_cfg1.yaml"), "--out", str(out_dir),
        "--report-format", "json", "--dump-dataflow",
    )
    assert code == 0
    report = json.loads(out)
    assert report["status"] == "success"
    assert report["selection"]["efpga_sizes"] == ["2x2", "2x2"]
    written = {p.name for p in out_dir.iterdir()}
    assert written == {
        "report.json", "report.txt", "redacted_top.v", "manifest.json", "dataflow.dot",
        "efpga_0_stub.v", "efpga_1_stub.v",
    }
    assert json.loads((out_dir / "report.json").read_text())["status"] == "success"


def test_cli_no_candidates(tmp_path, capsys):
    code, out, err = run_cli(capsys, "run", "--config", str(CONFIGS / "iir_cfg1.yaml"), "--out", str(tmp_path))
    assert code == 2
    assert "no_candidates" in err
    assert out.splitlines()[2].split()[3] == "0"
    assert not (tmp_path / "redacted_top.v").exists()


def _copy_config(tmp_path, **changes):
    shutil.copy(FIXTURES / "toy_gcd.v", tmp_path / "toy_gcd.v")
    data = yaml.safe_load((CONFIGS / "gcd_cfg1.yaml").read_text())
    data["sources"] = ["toy_gcd.v"]
    data.update(changes)
    path = tmp_path / "cfg.yaml"
    path.write_text(yaml.safe_dump(data))
    return path


def test_cli_no_solution(tmp_path, capsys):
    cfg = _copy_config(tmp_path, fabric={"w_min": 1, "w_max": 1, "io_per_side_unit": 4})
    code, out, err = run_cli(capsys, "run", "--config", str(cfg), "--out", str(tmp_path / "o"), "--report-format", "json")
    assert code == 3
    report = json.loads(out)
    assert report["status"] == "no_solution"
    assert report["selection"]["valid_efpgas"] == 0 and report["selection"]["S"] == 0


@pytest.mark.parametrize(
    "changes",
    [{"top": "nope"}, {"sources": ["missing.v"]}, {"max_io": "x"}, {"limits": {"max_clusters": 1}}],
)
def test_cli_errors(tmp_path, capsys, changes):
    cfg = _copy_config(tmp_path, **changes)
    code, out, err = run_cli(capsys, "run", "--config", str(cfg), "--out", str(tmp_path / "o"))
    assert code == 1
    assert err.startswith("alice: error:") and out == ""


def test_cli_characterizer_report(tmp_path, capsys):
    report = tmp_path / "fab.json"
    report.write_text(json.dumps({"gcd_top.u_dp.u_reg_a": {"w": 2, "io_used": 19, "clb_used": 4, "valid": False}}))
    code, out, _ = run_cli(
        capsys, "run", "--config", str(CONFIGS / "gcd_cfg1.yaml"), "--out", str(tmp_path / "o"),
        "--characterizer-report", str(report), "--report-format", "json",
    )
    assert code == 0
    data = json.loads(out)
    assert data["selection"]["valid_efpgas"] == 5
    assert all("gcd_top.u_dp.u_reg_a" not in f["members"] for f in data["solution"])
    bad = tmp_path / "bad.json"
    bad.write_text("[")
    assert run_cli(capsys, "run", "--config", str(CONFIGS / "gcd_cfg1.yaml"), "--out", str(tmp_path / "o"),
                   "--characterizer-report", str(bad))[0] == 1
