from __future__ import annotations

import csv
import io
import json

import pytest

from oracle_algebra.cli import main


def encode(tmp_path, *extra, name="dump.json"):
    out = tmp_path / name
    rc = main(["encode", "--coding", "field", "--d-set", "0,2", "--pairs", "4", "--seed", "42", "--stage", "2000", "--out", str(out), *extra])
    return rc, out


def test_encode_is_deterministic(tmp_path, capsys):
    rc1, a = encode(tmp_path, name="a.json")
    rc2, b = encode(tmp_path, name="b.json")
    lines = capsys.readouterr().out.split()
    assert rc1 == rc2 == 0
    assert a.read_bytes() == b.read_bytes()
    assert lines[0] == lines[1] and len(lines[0]) == 64
    assert "D" not in json.loads(a.read_text())["coding"]


def test_encode_ring_and_group(tmp_path):
    assert main(["encode", "--coding", "ring", "--field", "q", "--variant", "one-factor", "--pairs", "3", "--d-set", "1", "--out", str(tmp_path / "r.json")]) == 0
    assert main(["encode", "--coding", "group", "--k", "2", "--pairs", "3", "--out", str(tmp_path / "g.json")]) == 0


def test_encode_rejects_support_outside_pairs(tmp_path, capsys):
    assert main(["encode", "--coding", "field", "--d-set", "4", "--pairs", "4", "--out", str(tmp_path / "x.json")]) == 2
    assert "invalid configuration" in capsys.readouterr().err


def test_encode_io_failure(tmp_path):
    assert main(["encode", "--coding", "field", "--pairs", "2", "--out", str(tmp_path / "missing" / "x.json")]) == 3


def test_decode_roundtrip(tmp_path, capsys):
    _, dump = encode(tmp_path)
    capsys.readouterr()
    assert main(["decode", str(dump), "--format", "json"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["recovered"] == [0, 2]


def test_decode_tiny_budget(tmp_path, capsys):
    _, dump = encode(tmp_path)
    capsys.readouterr()
    assert main(["decode", str(dump), "--budget", "1", "--format", "json"]) == 5
    assert json.loads(capsys.readouterr().out)["undetermined"] == [0, 1, 2, 3]


def test_decode_truncated_and_missing(tmp_path):
    _, dump = encode(tmp_path)
    dump.write_text(dump.read_text()[: -100])
    assert main(["decode", str(dump)]) == 4
    assert main(["decode", str(tmp_path / "nope.json")]) == 3


def test_decode_csv(tmp_path):
    _, dump = encode(tmp_path)
    out = tmp_path / "r.csv"
    assert main(["decode", str(dump), "--format", "csv", "--out", str(out)]) == 0
    rows = list(csv.DictReader(io.StringIO(out.read_text())))
    assert len(rows) == 4


def test_roundtrip_sweep(capsys):
    assert main(["roundtrip", "--codings", "field,ring-q,group", "--pairs", "3", "--seeds", "2", "--format", "csv"]) == 0
    rows = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))
    assert len(rows) == 3 * 8 * 2
    assert set(rows[0]) == {"coding", "D", "seed", "ok", "steps", "queries", "stage_needed"}
    assert all(r["ok"] == "True" for r in rows)


def test_roundtrip_empty_and_failures(capsys):
    assert main(["roundtrip", "--pairs", "0"]) == 0
    capsys.readouterr()
    assert main(["roundtrip", "--pairs", "2", "--budget", "2", "--format", "csv"]) == 5
    rows = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))
    assert rows and all(r["ok"] == "False" for r in rows)


def test_roundtrip_bad_tokens():
    assert main(["roundtrip", "--codings", "ring-zz"]) == 2
    assert main(["roundtrip", "--variants", "bogus"]) == 2


def test_roundtrip_parallel_matches_serial(capsys):
    args = ["roundtrip", "--codings", "ring-qi,group-k2", "--variants", "one-factor,all-factors", "--pairs", "2", "--format", "json"]
    assert main(args) == 0
    serial = capsys.readouterr().out
    assert main(args + ["--jobs", "2"]) == 0
    assert capsys.readouterr().out == serial


@pytest.mark.parametrize("suite", ["fieldtower", "sring", "tfagroup"])
def test_invariants(suite, capsys):
    assert main(["invariants", "--select", suite, "--scale", "0.05"]) == 0
    out = capsys.readouterr().out
    assert out and all(line.startswith("PASS") for line in out.splitlines())


def test_invariants_unknown_suite():
    assert main(["invariants", "--select", "nope"]) == 2


def test_enum_demo(tmp_path, capsys):
    assert main(["enum-demo", "--coding", "field", "--x", "0", "-n", "50"]) == 0
    assert len(capsys.readouterr().out.splitlines()) == 50
    assert main(["enum-demo", "--coding", "group", "--k", "2", "--x", "0", "-n", "0"]) == 0
    assert capsys.readouterr().out == ""
    out = tmp_path / "ring.ndjson"
    assert main(["enum-demo", "--coding", "ring", "--field", "qi", "--x", "2", "-n", "40", "--out", str(out)]) == 0
    items = [json.loads(line) for line in out.read_text().splitlines()]
    assert len(items) == 40 and all(it["d"] == -1 for it in items)
    assert main(["enum-demo", "--coding", "field", "-n", "3", "--out", str(tmp_path / "no" / "x")]) == 3


def test_seed_env_overrides(tmp_path, monkeypatch, capsys):
    base = ["encode", "--coding", "group", "--pairs", "2", "--d-set", "0"]
    assert main(base + ["--seed", "9", "--out", str(tmp_path / "a.json")]) == 0
    monkeypatch.setenv("ORACLE_ALGEBRA_SEED", "9")
    assert main(base + ["--seed", "1", "--out", str(tmp_path / "b.json")]) == 0
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()
    monkeypatch.setenv("ORACLE_ALGEBRA_SEED", "x")
    assert main(base + ["--out", str(tmp_path / "c.json")]) == 2


def test_usage_errors_exit_2():
    with pytest.raises(SystemExit) as exc:
        main(["decode"])
    assert exc.value.code == 2
