import json
import subprocess
import sys

import numpy as np
import pytest

from contraction_order.cli import main
from contraction_order.document import emit, parse


def run(*args, stdin=None):
    proc = subprocess.run(
        [sys.executable, "-m", "contraction_order", *args],
        capture_output=True,
        text=True,
        input=stdin,
    )
    return proc.returncode, proc.stdout, proc.stderr


@pytest.fixture
def jordans(tmp_path):
    p = tmp_path / "m.json"
    S2 = np.eye(2, k=-1)
    S3 = np.eye(3, k=-1)
    p.write_text(emit({"S2": S2, "S3": S3}))
    return p


def test_order_s3_vs_s2(jordans):
    code, out, _ = run("order", f"{jordans}#S3", f"{jordans}#S2")
    assert code == 0
    doc = json.loads(out)
    v = doc["result"]["A<=B"]
    assert v["status"] == "Refuted" and v["certificate"]["kind"] == "dimension"
    assert doc["result"]["B<=A"]["status"] == "Holds"
    assert v["config"]["tol"] == {"rank_tol": 1e-9, "residual_tol": 1e-8}


def test_gen_jordan_sum(tmp_path):
    code, out, _ = run("gen", "jordan_sum", "--param", "N=2")
    assert code == 0
    doc = parse(out)
    A, B = doc["matrices"]["A"], doc["matrices"]["B"]
    assert A.shape == (3, 3) and B.shape == (5, 5) and A.dtype == np.int64
    # gen output feeds back into other commands by name
    f = tmp_path / "g.json"
    f.write_text(out)
    code, out, _ = run("order", f"{f}#A", f"{f}#B", "--starts", "4")
    assert code == 0
    assert json.loads(out)["result"]["A<=B"]["status"] == "Holds"


def test_verify_horn_deterministic(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["verify", "horn", "--seed", "1", "-o", str(a)]) == 0
    assert main(["verify", "horn", "--seed", "1", "-o", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    doc = json.loads(a.read_text())
    assert doc["result"]["passed"] and len(doc["result"]["checks"]) == 1020


def test_analyze_and_charfn(jordans, capsys):
    assert main(["analyze", f"{jordans}#S3"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["result"]["defect_dim"] == 1 and doc["result"]["is_cnu"] is True
    assert main(["charfn", f"{jordans}#S2", "--grid-radii", "0.5", "--grid-angles", "2"]) == 0
    doc = parse(capsys.readouterr().out)
    blocks = doc["result"]["sample"]["blocks"]
    assert len(blocks) == 2 and abs(blocks[0][0, 0] - 0.25) < 1e-12


def test_equiv_and_dilate(jordans, tmp_path, capsys):
    assert main(["equiv", f"{jordans}#S2", f"{jordans}#S3"]) == 0
    assert json.loads(capsys.readouterr().out)["result"]["status"] == "Refuted"
    w = tmp_path / "w.json"
    W = np.zeros((3, 2))
    W[1, 0] = W[2, 1] = 1
    w.write_text(emit(W))
    code = main(["dilate", f"{jordans}#S2", "--depth", "4", "--into", f"{jordans}#S3", "--witness", str(w)])
    doc = json.loads(capsys.readouterr().out)
    assert code == 0 and doc["passed"]


def test_config_echo_reproduces(jordans, tmp_path, capsys):
    assert main(["order", f"{jordans}#S2", f"{jordans}#S3", "--seed", "5", "--starts", "3"]) == 0
    first = capsys.readouterr().out
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps(json.loads(first)["config"]))
    assert main(["order", f"{jordans}#S2", f"{jordans}#S3", "--config", str(cfg)]) == 0
    assert capsys.readouterr().out == first


def test_parse_error_exit_code(tmp_path):
    bad = tmp_path / "bad.json"
    text = '{"bad": {"rows": 2, "cols": 2, "data": [1, 2, 3]}}'
    bad.write_text(text)
    code, out, err = run("analyze", f"{bad}#bad")
    assert code == 2
    e = json.loads(out)["error"]
    assert e["kind"] == "parse" and e["path"] == "$.bad.data"
    assert e["offset"] == text.index("[1, 2, 3]")
    assert "error:" in err


def test_not_contractive_is_input_error(tmp_path):
    f = tmp_path / "m.json"
    f.write_text("[[2, 0], [0, 1]]")
    code, out, _ = run("analyze", str(f))
    assert code == 2 and json.loads(out)["error"]["type"] == "NotContractive"


def test_stdin_input():
    code, out, _ = run("analyze", "-", stdin="[[0, 1], [0, 0]]")
    assert code == 0 and json.loads(out)["result"]["defect_dim"] == 1


def test_unknown_is_exit_one(jordans, capsys):
    # a zero budget cannot find the witness, so the verdict is Unknown
    code = main(["order", f"{jordans}#S2", f"{jordans}#S3", "--starts", "0"])
    doc = json.loads(capsys.readouterr().out)
    statuses = {k: v["status"] for k, v in doc["result"].items()}
    assert "Unknown" in statuses.values() and code == 1
