import io
import json
import subprocess
import sys

import numpy as np
import pytest

from colordecoder.cli import CSV_HEADER, main, parse_grid
from colordecoder.lattice import get_level


def run(*argv):
    buf = io.StringIO()
    code = main(list(argv), out=buf)
    return code, buf.getvalue()


def test_info():
    code, out = run("info", "--m", "1")
    info = json.loads(out)
    assert code == 0
    assert (info["n"], info["k"], info["d"]) == (72, 4, 8)
    assert [lv["level"] for lv in info["levels"]] == [1, 0]


def test_decode_zero_error():
    code, out = run("decode", "--m", "1", "--p", "0.05", "--error", "0" * 72)
    rec = json.loads(out)
    assert code == 0 and rec["success"] is True
    assert rec["estimate"] == "0" * 72 and rec["syndrome"] == "0" * 36


def test_decode_single_error_and_syndrome():
    lv = get_level(1)
    e = np.zeros(72, dtype=np.uint8)
    e[17] = 1
    bits = "".join(map(str, e))
    _, out = run("decode", "--m", "1", "--p", "0.05", "--error", bits)
    rec = json.loads(out)
    assert rec["success"] is True
    synd = "".join(map(str, lv.syndrome_of(e)))
    _, out2 = run("decode", "--m", "1", "--p", "0.05", "--syndrome", synd)
    rec2 = json.loads(out2)
    assert rec2["estimate"] == rec["estimate"] and "success" not in rec2


def test_decode_random_is_seeded():
    a = run("decode", "--m", "1", "--p", "0.05", "--seed", "5")[1]
    b = run("decode", "--m", "1", "--p", "0.05", "--seed", "5")[1]
    assert a == b


@pytest.mark.parametrize(
    "argv",
    [
        ["decode", "--m", "1", "--p", "0.05", "--error", "01"],
        ["decode", "--m", "1", "--p", "0.05", "--error", "2" * 72],
        ["decode", "--m", "1", "--p", "0.7"],
        ["decode", "--m", "1", "--p", "0.05", "--error", "0" * 72, "--syndrome", "0" * 36],
        ["sweep", "--m", "1", "--p-grid", "0.1:0.05:0.01", "--trials", "5", "--out", "x.csv"],
        ["sweep", "--m", "a", "--p-grid", "0.1:0.2:0.1", "--trials", "5", "--out", "x.csv"],
        ["threshold", "--in", "/nonexistent.csv"],
    ],
)
def test_errors_exit_one(argv, capsys, tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    code, out = run(*argv)
    err = capsys.readouterr().err
    assert code == 1 and out == ""
    assert err.count("\n") == 1 and "error" in err


def test_impossible_base_syndrome(capsys):
    code, _ = run("decode", "--m", "0", "--p", "0.1", "--syndrome", "100000000")
    assert code == 1
    assert "syndrome" in capsys.readouterr().err


def test_parse_grid():
    assert parse_grid("0.06:0.095:0.005") == [round(0.06 + 0.005 * i, 10) for i in range(8)]
    assert parse_grid("0:0:0.1") == [0.0]


def test_sweep_and_threshold(tmp_path):
    path = tmp_path / "s.csv"
    code, _ = run("sweep", "--m", "1,2", "--p-grid", "0.04:0.12:0.04", "--trials", "400", "--seed", "1", "--out", str(path))
    assert code == 0
    lines = path.read_text().splitlines()
    assert lines[0] == "m,L,n,p,trials,failures,rate,ci_lo,ci_hi,mode,bp_iters,split_rounds,seed"
    assert lines[0].split(",") == CSV_HEADER
    assert len(lines) == 7
    assert lines[1].split(",")[:5] == ["1", "6", "72", "0.04", "400"]
    assert lines[1].split(",")[-4:] == ["soft", "2", "3", "1"]
    code, out = run("threshold", "--in", str(path))
    res = json.loads(out)
    assert code == 0 and 0.04 < res["p_th"] < 0.12


def test_threshold_rejects_bad_header(tmp_path, capsys):
    path = tmp_path / "bad.csv"
    path.write_text("a,b\n1,2\n")
    assert run("threshold", "--in", str(path))[0] == 1


def test_threshold_no_crossing(tmp_path, capsys):
    path = tmp_path / "flat.csv"
    rows = [",".join(CSV_HEADER)]
    for m, rate in ((1, "0.2"), (2, "0.1")):
        for p in ("0.06", "0.07"):
            rows.append(f"{m},6,72,{p},10,2,{rate},0,1,soft,2,3,0")
    path.write_text("\n".join(rows) + "\n")
    assert run("threshold", "--in", str(path))[0] == 1
    assert "no crossing" in capsys.readouterr().err


def test_sweep_bytes_identical_across_workers(tmp_path):
    outs = []
    for w in ("1", "2"):
        path = tmp_path / f"w{w}.csv"
        run("sweep", "--m", "1", "--p-grid", "0.07:0.08:0.01", "--trials", "300", "--seed", "9", "--workers", w, "--out", str(path))
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "colordecoder", "info", "--m", "0"], capture_output=True, text=True)
    assert res.returncode == 0
    assert json.loads(res.stdout)["n"] == 18
