import json
from pathlib import Path

import pytest

from samadyn.cli import build_parser, main

REPO = Path(__file__).resolve().parents[1]
PARAMS = REPO / "params" / "default.json"


@pytest.fixture()
def tiny_scenario(tmp_path):
    scenario = {
        "name": "tiny",
        "duration": 1.0,
        "controller": "proposed",
        "seed": 0,
        "home": [0.0, 0.0, 0.0],
        "refs": [{"t": 0.0, "p_z_d": 0.0}],
        "timeline": [
            {"t": 0.0, "q_la": [0.0] * 5, "q_ra": [0.0] * 5, "q_h": [0.0, 0.0]},
            {"t": 0.3, "q_la": [0.0, 0.5, 0.0, 0.0, 0.0],
             "q_ra": [0.0, 0.5, 0.0, 0.0, 0.0], "q_h": [0.0, 0.0]},
        ],
    }
    path = tmp_path / "tiny.json"
    path.write_text(json.dumps(scenario))
    return path


def test_parser_run_config():
    args = build_parser().parse_args(
        ["run", "--scenario", "s.json", "--params", "p.json", "--out", "logs"])
    assert args.command == "run" and args.scenario == "s.json"
    assert args.params == "p.json" and args.out == "logs"


def test_parser_serve_config():
    args = build_parser().parse_args(["serve", "--params", "p.json", "--port", "8080"])
    assert args.command == "serve" and args.port == 8080


def test_parser_rejects_privileged_port():
    with pytest.raises(SystemExit) as exc:
        build_parser().parse_args(["serve", "--port", "80"])
    assert exc.value.code == 2


def test_parser_requires_scenario_for_run(capsys):
    with pytest.raises(SystemExit) as exc:
        build_parser().parse_args(["run"])
    assert exc.value.code == 2


def test_parser_rejects_unknown_flag():
    with pytest.raises(SystemExit) as exc:
        build_parser().parse_args(["run", "--scenario", "s.json", "--frobnicate"])
    assert exc.value.code == 2


def test_validate_default_params(capsys):
    assert main(["validate", "--params", str(PARAMS)]) == 0
    assert "no findings" in capsys.readouterr().out


def test_validate_reports_findings(tmp_path, capsys):
    d = json.loads(PARAMS.read_text())
    d["robot"]["m_fb"] = -1.0
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(d))
    assert main(["validate", "--params", str(bad)]) == 1
    out = capsys.readouterr().out
    assert "finding" in out and "m_fb" in out


def test_run_malformed_scenario_json(tmp_path, capsys):
    bad = tmp_path / "broken.json"
    bad.write_text('{"name": "x", "duration": }')
    code = main(["run", "--scenario", str(bad), "--params", str(PARAMS),
                 "--out", str(tmp_path / "out")])
    assert code == 1
    err = capsys.readouterr().err
    assert "line 1" in err and "column" in err


def test_run_missing_scenario_file(tmp_path, capsys):
    code = main(["run", "--scenario", str(tmp_path / "none.json"),
                 "--params", str(PARAMS), "--out", str(tmp_path)])
    assert code == 1


def test_run_writes_log_and_summary(tiny_scenario, tmp_path, capsys):
    out = tmp_path / "out"
    code = main(["run", "--scenario", str(tiny_scenario), "--params", str(PARAMS),
                 "--out", str(out)])
    assert code == 0
    assert (out / "tiny_proposed.csv").exists()
    summary = json.loads((out / "tiny_proposed_summary.json").read_text())
    assert set(summary["rms"]) == {"theta_deg", "phi_deg", "psi_deg",
                                   "px_m", "py_m", "pz_m"}
    assert summary["controller"] == "proposed"


def test_compare_outputs_byte_identical(tiny_scenario, tmp_path):
    out1, out2 = tmp_path / "c1", tmp_path / "c2"
    for out in (out1, out2):
        assert main(["compare", "--scenario", str(tiny_scenario),
                     "--params", str(PARAMS), "--out", str(out)]) == 0
    for name in ("tiny_report.csv", "tiny_report.txt",
                 "tiny_proposed.csv", "tiny_baseline.csv"):
        assert (out1 / name).read_bytes() == (out2 / name).read_bytes()


def test_env_var_supplies_params(tiny_scenario, tmp_path, monkeypatch):
    monkeypatch.setenv("SAMADYN_PARAMS", str(PARAMS))
    out = tmp_path / "envout"
    assert main(["run", "--scenario", str(tiny_scenario), "--out", str(out)]) == 0


def test_flag_wins_over_env_var(tiny_scenario, tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("SAMADYN_PARAMS", str(tmp_path / "missing.json"))
    out = tmp_path / "flagout"
    assert main(["run", "--scenario", str(tiny_scenario), "--params", str(PARAMS),
                 "--out", str(out)]) == 0
