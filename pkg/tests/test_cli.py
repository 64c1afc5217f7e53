import json
import subprocess
import sys
from pathlib import Path

import pytest

from triesz.cli import main

GOLDEN = Path(__file__).parent / "golden"


def test_analyze_json(capsys):
    assert main(["analyze", str(GOLDEN / "west_hand.json")]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["summary"]["exit_code"] == 0 and "timing" in doc


def test_analyze_text_and_output_file(tmp_path, capsys):
    out = tmp_path / "r.txt"
    assert main(["analyze", str(GOLDEN / "not_t_riesz.json"), "--format", "text", "-o", str(out)]) == 1
    text = out.read_text()
    assert "NotTRiesz" in text and "exit 1" in text
    assert capsys.readouterr().out == ""


def test_tolerance_overrides_are_recorded(capsys):
    args = ["analyze", str(GOLDEN / "west_hand.json"), "--tol", "residual_tol=1e-11",
            "--witness-samples", "8", "--quadrature-max-nodes", "256", "--no-timing"]
    assert main(args) == 0
    tol = json.loads(capsys.readouterr().out)["scenario"]["tolerances"]
    assert tol["residual_tol"] == 1e-11 and tol["witness_samples"] == 8
    assert tol["quadrature_max_nodes"] == 256


def test_bad_tolerance_is_a_usage_error(capsys):
    assert main(["analyze", str(GOLDEN / "west_hand.json"), "--tol", "nope=1"]) == 2
    assert "nope" in capsys.readouterr().err
    with pytest.raises(SystemExit):
        main(["analyze", str(GOLDEN / "west_hand.json"), "--tol", "residual_tol"])


def test_malformed_input_exit_2(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"schema_version": 1,\n "source": [2, 1], "target": [4],\n'
                   ' "homomorphism": {"mult": [[1, 1]]}, "elements": {}, "requests": []}')
    assert main(["analyze", str(bad)]) == 2
    assert "target block 0" in capsys.readouterr().err
    bad.write_text("{\n  oops")
    assert main(["analyze", str(bad)]) == 2
    assert "line 2" in capsys.readouterr().err
    assert main(["analyze", str(tmp_path / "missing.json")]) == 2


def test_gen_analyze_verify_pipeline(tmp_path, capsys):
    scen, rep = tmp_path / "s.json", tmp_path / "r.json"
    assert main(["gen", "poly_t_riesz", "3,2,1->3,4:1,0,0;0,2,0", "--seed", "5", "-o", str(scen)]) == 0
    assert main(["analyze", str(scen), "-o", str(rep)]) == 0
    assert main(["verify", str(rep)]) == 0
    assert "0 problem(s)" in capsys.readouterr().out
    doc = json.loads(rep.read_text())
    doc["results"][-1]["status"] = "fail"
    rep.write_text(json.dumps(doc))
    assert main(["verify", str(rep)]) == 1


def test_gen_is_byte_deterministic(capsys):
    main(["gen", "t_riesz", "4,3->4", "--seed", "7"])
    a = capsys.readouterr().out
    main(["gen", "t_riesz", "4,3->4", "--seed", "7"])
    assert capsys.readouterr().out == a
    assert a == (GOLDEN / "gen_t_riesz.json").read_text()


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "triesz", "analyze", str(GOLDEN / "poly_hand.json"),
                           "--no-timing"], capture_output=True, text=True, check=False)
    assert proc.returncode == 0, proc.stderr
    assert json.loads(proc.stdout)["summary"]["fail"] == 0
