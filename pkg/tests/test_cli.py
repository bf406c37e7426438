import csv
import io
import json

import numpy as np
import pytest

from kirillov.algebra import u_n
from kirillov.cli import InputError, main, parse_algebra, parse_algebra_text

HEIS = """\
# Heisenberg algebra over F_3
name: heis
p: 3
dim: 3
1 2 -> [(3, 1)]
"""


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_parse_file_matches_builtin():
    alg = parse_algebra_text(HEIS)
    ref = u_n(3, 3)
    assert alg.name == "heis" and alg.n == 3
    assert np.array_equal(alg.table, ref.table)


def test_parse_extension_field_literals():
    text = "p: 2\ne: 2\ndim: 2\n1 1 -> (2, x)\n"
    alg = parse_algebra_text(text)
    assert alg.q == 4
    assert alg.table[0, 0, 1] == alg.gf.parse("x") != 1


@pytest.mark.parametrize("text,needle", [
    ("p: 2\ndim: 1\n1 1 -> [(1, 1)]\n", "nilpotent"),
    ("p: 2\ndim: 2\n1 3 -> [(2, 1)]\n", "<input>:3: index 3 outside 1..2"),
    ("p: 3\ndim: 2\n1 1 -> [(2, y)]\n", "<input>:3"),
    ("p: 2\ndim: 2\n1 1 -> [(2, 1)]\n1 1 -> [(2, 1)]\n", "already given on line 3"),
    ("p: 2\ndim: 2\n1 1 => 2\n", "<input>:3: cannot parse"),
    ("p: two\ndim: 2\n", "<input>:1: p must be an integer"),
    ("dim: 2\n", "missing field 'p'"),
    ("p: 4\ndim: 2\n", "invalid field spec"),
    ("p: 2\np: 2\ndim: 2\n", "<input>:2: duplicate"),
])
def test_parse_errors_have_context(text, needle):
    with pytest.raises(InputError) as exc:
        parse_algebra_text(text)
    assert needle in str(exc.value)


def test_builtin_specs():
    assert parse_algebra("u:3:2").n == 3
    assert parse_algebra("trunc:3:4").n == 3
    assert parse_algebra("pattern:2:1-2,1-3").n == 2
    for bad in ("u:3", "u:x:2", "pattern:2:1-2,2-3", "nope"):
        with pytest.raises(InputError):
            parse_algebra(bad)


def test_table_text(capsys):
    code, out, _ = run(capsys, "table", "u:3:2", "--quiet-timing")
    assert code == 0
    assert "-2" in out and "timing" not in out


def test_table_csv_and_json_agree(capsys):
    _, out_csv, err = run(capsys, "table", "u:3:3", "--csv")
    assert "timing" in err and "timing" not in out_csv
    rows = list(csv.reader(io.StringIO(out_csv)))
    _, out_json, _ = run(capsys, "table", "u:3:3", "--json", "--quiet-timing")
    d = json.loads(out_json)
    assert d["schema_version"] == 1 and d["algebra"]["order"] == 27
    assert len(d["table"]) == len(d["classes"]) == 11
    assert [r[2:] for r in rows[1:]] == d["table"]


def test_orbits_json(capsys):
    code, out, _ = run(capsys, "orbits", "u:3:2", "--json", "--quiet-timing")
    d = json.loads(out)
    assert code == 0 and [o["size"] for o in d["orbits"]] == [1, 1, 1, 1, 4]


def test_polarize(capsys):
    code, out, _ = run(capsys, "polarize", "u:3:2", "--f", "0,0,1", "--quiet-timing")
    assert code == 0
    assert "U = <1,0,0; 0,0,1>" in out and "FAIL" not in out
    code, _, err = run(capsys, "polarize", "u:3:2", "--f", "0,1", "--quiet-timing")
    assert code == 2 and "3 comma-separated" in err


def test_verify_and_witness_roundtrip(capsys, tmp_path):
    report = tmp_path / "u42.json"
    code, out, _ = run(capsys, "verify", "u:4:2", "--json", "-o", str(report), "--quiet-timing")
    assert code == 0 and out == ""
    d = json.loads(report.read_text())
    assert d["ok"] and len(d["witnesses"]) == 16
    code, out, _ = run(capsys, "verify", "u:4:2", "--witness", str(report), "--quiet-timing")
    assert code == 0 and "16/16 witnesses re-verified" in out
    # tamper with one lambda table
    w = d["witnesses"][-1]
    w["lambda_exponents"][1] = (w["lambda_exponents"][1] + 1) % 2
    report.write_text(json.dumps(d))
    code, out, _ = run(capsys, "verify", "u:4:2", "--witness", str(report), "--quiet-timing")
    assert code == 1 and "15/16" in out and "lambda table" in out


def test_verify_reports_failures_honestly(capsys):
    # the truncated polynomial group of exponent 4 is not certified
    code, out, _ = run(capsys, "verify", "trunc:2:3", "--quiet-timing")
    assert code == 1 and "NOT certified" in out


def test_branch(capsys):
    code, out, _ = run(capsys, "branch", "u:3:2", "--quiet-timing")
    assert code == 0 and "branching checks passed" in out
    code, out, _ = run(capsys, "branch", "u:4:2", "--sample", "1", "--json", "--quiet-timing")
    recs = json.loads(out)["records"]
    assert code == 0 and len({tuple(map(tuple, r["u_basis"])) for r in recs}) == 1


def test_exit_codes(capsys, tmp_path):
    code, _, err = run(capsys, "table", "u:5:2", "--max-group-order", "100")
    assert code == 2 and "1024" in err
    bad = tmp_path / "bad.alg"
    bad.write_text("p: 2\ndim: 1\n1 1 -> [(1, 1)]\n")
    code, _, err = run(capsys, "table", str(bad))
    assert code == 2 and "nilpotent" in err
    code, _, err = run(capsys, "verify", "u:3:2", "--witness", str(tmp_path / "missing.json"))
    assert code == 2


def test_quiet_timing_is_byte_identical(capsys):
    outs = {run(capsys, "verify", "u:3:3", "--json", "--quiet-timing", "--threads", t)[1] for t in ("1", "3")}
    outs |= {run(capsys, "verify", "u:3:3", "--json", "--quiet-timing")[1]}
    assert len(outs) == 1
