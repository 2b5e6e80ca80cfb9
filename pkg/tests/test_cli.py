import json

import pytest

from recdiv.cli import main, parse_int, replay_argv


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_parse_int_forms():
    assert parse_int("1e5") == parse_int("10**5") == parse_int("100_000") == 100000


def test_count_quotients_json(capsys):
    code, out, _ = run(capsys, "count-quotients", "--fib", "--g", "x", "--x", "30")
    assert code == 0
    doc = json.loads(out)
    assert doc["result"]["members"] == [1, 5, 12, 24, 25]
    assert doc["meta"]["argv"][0] == "count-quotients"


def test_csv_values_match_json(capsys):
    args = ["sieve-count", "--gtilde", "x^2+1", "--y", "10", "--x", "1000,10000"]
    _, js, _ = run(capsys, *args)
    _, cs, _ = run(capsys, *args, "--format", "csv")
    lines = cs.splitlines()
    assert lines[0].startswith("# ")
    header = lines[1].split(",")
    rows = json.loads(js)["result"]["rows"]
    for line, row in zip(lines[2:], rows):
        for k, v in zip(header, line.split(",")):
            assert json.loads(v) == row[k]


def test_threads_byte_identical(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    base = ["count-quotients", "--fib", "--g", "x", "--x", "3000", "--mode", "modular"]
    assert main(base + ["--out", str(a), "--threads", "1"]) == 0
    assert main(base + ["--out", str(b), "--threads", "2"]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_replay(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["hl", "--tuple", "0,2", "--x", "1000", "--truncation", "1000", "--format", "csv", "--out", str(a)]) == 0
    assert main(["replay", str(a), "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_replay_argv_drops_out_and_threads():
    assert replay_argv(["hl", "--out", "f", "--threads=3", "--tuple", "0"]) == ["hl", "--tuple", "0"]


def test_domain_error_exit_1(capsys):
    code, _, err = run(capsys, "count-quotients", "--fib", "--g", "x", "--x", "10000000")
    assert code == 1
    assert json.loads(err)["error"] == "DomainError"


def test_parse_error_exit_2(tmp_path, capsys):
    bad = tmp_path / "p.json"
    bad.write_text('{"F": {"companion": \n  oops}')
    code, _, err = run(capsys, "count-quotients", "--problem", str(bad), "--x", "10")
    assert code == 2
    assert "line 2" in json.loads(err)["message"]
    code, _, _ = run(capsys, "count-quotients", "--fib", "--g", "x^", "--x", "10")
    assert code == 2


def test_problem_file(tmp_path, capsys):
    p = tmp_path / "p.json"
    p.write_text(json.dumps({"F": {"companion": {"coeffs": ["1", "1"], "init": ["0", "1"]}}, "G": ["0", "1"]}))
    code, out, _ = run(capsys, "count-quotients", "--problem", str(p), "--x", "30")
    assert code == 0 and json.loads(out)["result"]["count"] == 5


@pytest.mark.parametrize(
    "argv",
    [
        ["kronecker", "--poly", "x^2+1", "--x", "10000", "--points", "100,1000,10000"],
        ["wirsing", "--x", "1000,10000", "--truncation", "1000"],
        ["ffzeros", "--stress", "--trials", "20", "--q-max", "128"],
        ["split", "--hl-family", "0,2", "--x", "2000", "--y", "5", "--z", "40"],
    ],
)
def test_other_commands_run(capsys, argv):
    code, out, _ = run(capsys, *argv)
    assert code == 0
    assert "result" in json.loads(out)


def test_ffzeros_instance_file(tmp_path, capsys):
    p = tmp_path / "i.json"
    p.write_text(json.dumps({"p": 7, "c": [1, 6], "a": [2, 4]}))
    code, out, _ = run(capsys, "ffzeros", "--instance", str(p))
    assert code == 0 and json.loads(out)["result"]["count"] == 2
