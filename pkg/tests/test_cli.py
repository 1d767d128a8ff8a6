import json

import pytest

from svmfim.cli import main
from svmfim.txdb import load_fimi

DB5_TEXT = "0 1 2\n0 1\n0 2\n1 2\n0 1 2\n"


@pytest.fixture
def db5_file(tmp_path):
    p = tmp_path / "db5.dat"
    p.write_text(DB5_TEXT)
    return p


@pytest.fixture
def synth_file(tmp_path):
    p = tmp_path / "synth.dat"
    assert main(["synth", "--output", str(p), "--n-transactions", "300", "--n-items", "10",
                 "--injection-prob", "0.6", "--seed", "1"]) == 0
    return p


def test_mine_exact(db5_file, tmp_path, capsys):
    out = tmp_path / "fi.txt"
    assert main(["mine", "--input", str(db5_file), "--minsup", "0.6", "--algo", "apriori",
                 "--output", str(out)]) == 0
    assert out.read_text().splitlines() == [
        "0 #SUP: 4", "0 1 #SUP: 3", "0 2 #SUP: 3", "1 #SUP: 4", "1 2 #SUP: 3", "2 #SUP: 4"]


def test_mine_stdout(db5_file, capsys):
    assert main(["mine", "--input", str(db5_file), "--minsup", "0.7"]) == 0
    assert capsys.readouterr().out == "0 #SUP: 4\n1 #SUP: 4\n2 #SUP: 4\n"


def test_mine_svm_json_report(synth_file, tmp_path, capsys):
    out = tmp_path / "fi.txt"
    assert main(["mine", "--input", str(synth_file), "--minsup", "0.4", "--algo", "svm",
                 "--output", str(out), "--json"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["n_verified"] == report["n_candidates_scored"] - report["n_pruned"]


@pytest.mark.parametrize("argv,code", [
    (["mine", "--minsup", "0"], 3),
    (["mine", "--minsup", "1.5"], 3),
    (["mine", "--minsup", "0.5", "--bogus"], 3),
    (["noise", "--minsup", "0.5", "--levels", "0,0.2,0.1"], 3),
    (["mine", "--minsup", "0.5", "--input", "/nonexistent/file"], 2),
])
def test_exit_codes(db5_file, argv, code):
    if "--input" not in argv:
        argv = argv + ["--input", str(db5_file)]
    assert main(argv) == code


def test_parse_error_exit(tmp_path):
    p = tmp_path / "bad.dat"
    p.write_text("1 2\nx\n")
    assert main(["mine", "--input", str(p), "--minsup", "0.5"]) == 2


def test_bench_shape(db5_file, capsys):
    assert main(["bench", "--input", str(db5_file), "--minsup", "0.6"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "model,support,confidence,lift,wall_time_ms"
    assert [l.split(",")[0] for l in lines[1:]] == ["apriori", "fpgrowth", "dt", "rf", "svm"]
    assert lines[1].split(",")[1:] == lines[2].split(",")[1:] == ["0.6", "0.75", "0.9375", ""]


def test_curve_groups(synth_file, capsys):
    assert main(["curve", "--input", str(synth_file), "--minsup", "0.4", "--n-trees", "5",
                 "--max-depth", "4"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "model,iteration,confidence"
    assert {l.split(",")[0] for l in lines[1:]} == {"apriori", "fpgrowth", "dt", "rf", "svm"}
    assert sum(l.startswith("dt,") for l in lines) == 4
    assert sum(l.startswith("rf,") for l in lines) == 5


def test_convert(tmp_path):
    src = tmp_path / "m.csv"
    src.write_text("e,x,s\np,x,y\n")
    out = tmp_path / "m.dat"
    assert main(["convert", "--input", str(src), "--output", str(out)]) == 0
    assert out.read_text() == "0 1 2\n1 3 4\n"
    idmap = (tmp_path / "m.dat.idmap").read_text().splitlines()
    assert idmap[0] == "0\tcol0=e"
    assert len(idmap) == 5
    assert load_fimi(out.read_text()).transactions == ((0, 1, 2), (1, 3, 4))


@pytest.mark.parametrize("text", ["a,b\nc\n", ""])
def test_convert_bad_input(tmp_path, text):
    src = tmp_path / "m.csv"
    src.write_text(text)
    assert main(["convert", "--input", str(src), "--output", str(tmp_path / "o.dat")]) == 2


def test_noise_summary(synth_file, capsys):
    assert main(["noise", "--input", str(synth_file), "--minsup", "0.4", "--n-seeds", "1",
                 "--levels", "0,0.1"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "level,support,confidence,lift,f1"
    assert [l.split(",")[0] for l in lines[1:]] == ["0", "0.1"]


def test_synth_deterministic(tmp_path):
    a, b = tmp_path / "a.dat", tmp_path / "b.dat"
    for p in (a, b):
        assert main(["synth", "--output", str(p), "--seed", "3", "--n-transactions", "100"]) == 0
    assert a.read_bytes() == b.read_bytes()
