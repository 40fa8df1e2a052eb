import json
import shutil
import subprocess
import sys

import pytest

from bicover import fixtures as fx
from bicover.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def fixdir(tmp_path):
    d = tmp_path / "data"
    shutil.copytree(fx.default_dir(), d)
    return d


def _edit(path, fn):
    obj = json.loads(path.read_text())
    fn(obj)
    path.write_text(json.dumps(obj, ensure_ascii=False))


def _total(capsys, *argv):
    code, out, _ = run(capsys, "verify", "--format", "json", *argv)
    return code, json.loads(out)["diffs"]


def test_classify_p2_json(capsys):
    code, out, _ = run(capsys, "classify", "--base", "p2", "--format", "json")
    recs = json.loads(out)
    assert code == 0
    assert sorted(r["case"] for r in recs) == list("abcde")


def test_classify_empty_base(capsys):
    code, out, _ = run(capsys, "classify", "--base", "fn:7", "--format", "json")
    assert code == 0 and json.loads(out) == []


@pytest.mark.parametrize("argv", [
    ["classify", "--base", "zz"],
    ["classify"],
    ["classify", "--base", "p2", "--cap", "3"],
    ["lattice", "--expr", "U ⊕ ⊕"],
    ["iterated"],
])
def test_usage_errors(capsys, argv):
    assert run(capsys, *argv)[0] == 2


def test_cap_env(capsys, monkeypatch):
    monkeypatch.setenv("BICOVER_CAP", "4")
    assert run(capsys, "classify", "--base", "p2")[0] == 2


def test_schema_error_exit_2(capsys, tmp_path):
    p = tmp_path / "bad.json"
    p.write_text(json.dumps({"base": "P2", "divisors": [{"total": [1, 2]}] * 3}))
    code, _, err = run(capsys, "invariants", "--input", str(p))
    assert code == 2 and "divisors[0].total" in err


def test_parity_violation_exit_3(capsys, tmp_path):
    p = tmp_path / "odd.json"
    p.write_text(json.dumps({"base": "P2", "divisors": [{"total": [3]}, {"total": [2]}, {"total": [1]}]}))
    code, _, err = run(capsys, "invariants", "--input", str(p))
    assert code == 3 and "parity" in err
    assert run(capsys, "check", "--input", str(p))[0] == 3


def test_invariants_deterministic(capsys, tmp_path):
    p = tmp_path / "b.json"
    p.write_text(json.dumps({"base": "P2", "divisors": [{"total": [3]}] * 3}))
    first = run(capsys, "invariants", "--input", str(p), "--format", "json")
    second = run(capsys, "invariants", "--input", str(p), "--format", "json")
    assert first == second
    inv = json.loads(first[1])["invariants"]
    assert (inv["chi"], inv["k2"], inv["p_g"], inv["q"]) == (4, 9, 3, 0)


def test_check_and_lattice(capsys, tmp_path):
    p = tmp_path / "d.json"
    p.write_text(json.dumps({"base": "P2", "divisors": [{"total": [4]}, {"total": [2]}, {"total": [2]}]}))
    code, out, _ = run(capsys, "check", "--input", str(p), "--format", "json")
    assert code == 0 and json.loads(out)["ITP"]["status"] == "Pass"
    code, out, _ = run(capsys, "lattice", "--expr", "U^{⊕2}⊕E8(-2)", "--format", "json")
    info = json.loads(out)
    assert (info["rank"], info["det"], info["signature"]) == (12, 256, [2, 10])


def test_iterated_by_case(capsys):
    code, out, _ = run(capsys, "iterated", "--base", "p2", "--case", "d", "--construction", "1", "--format", "json")
    j = json.loads(out)
    assert code == 0 and [s["deltas"] for s in j["solutions"]] == [["2A", "0", "2A+ΣE"]]


def test_verify_only(capsys):
    code, out, _ = run(capsys, "verify", "--only", "table1,table2")
    assert code == 0 and "table1: ok" in out and "total diffs: 0" in out
    assert run(capsys, "verify", "--only", "nope")[0] == 1


def test_perturbed_fixture_adds_one_diff(capsys, fixdir):
    _, clean = _total(capsys, "--fixtures-dir", str(fixdir))

    def bump(obj):
        row = next(r for r in obj["rows"] if r["case"] == "b")
        row["k2"] += 1

    _edit(fixdir / "table1.json", bump)
    code, total = _total(capsys, "--fixtures-dir", str(fixdir))
    assert code == 1 and total == clean + 1


def test_missing_fixture_fails_completeness(capsys, fixdir):
    (fixdir / "tableF4.json").unlink()
    code, out, _ = run(capsys, "verify", "--fixtures-dir", str(fixdir), "--format", "json")
    diffs = json.loads(out)["tables"]["completeness"]
    assert code == 1 and [d["table"] for d in diffs] == ["tableF4"]


def test_unknown_kind_fails_completeness(fixdir):
    _edit(fixdir / "tableF3.json", lambda o: o.update(kind="mystery"))
    rep = fx.verify(fixdir)
    assert any(d.column == "kind" for d in rep["completeness"])


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "bicover", "lattice", "--expr", "U"],
                       capture_output=True, text=True)
    assert r.returncode == 0 and "U" in r.stdout
