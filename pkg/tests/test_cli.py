import json
import os
import subprocess
import sys

import pytest

from loopcount import cli, counting
from loopcount.cocycles import CocycleVector
from loopcount.report import CountReport


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_count_formula(capsys):
    code, out, _ = run(capsys, "count", "--q", "23")
    assert code == 0
    rep = CountReport.from_dict(json.loads(out))
    assert rep.up_to_isotopy == counting.count_via_formula(23).up_to_isotopy
    assert rep.method == "formula"


def test_count_oracle(capsys):
    code, out, _ = run(capsys, "count", "--q", "3", "--method", "oracle")
    data = json.loads(out)
    assert code == 0 and data["up_to_isotopy"] == "2" and data["up_to_isomorphism"] == "3"


def test_count_burnside_writes_out(capsys, tmp_path):
    target = tmp_path / "r.json"
    code, out, _ = run(capsys, "count", "--q", "5", "--method", "burnside", "--out", str(target))
    assert code == 0 and target.read_text() == out
    assert json.loads(out)["up_to_isotopy"] == "63"


def test_orbits_deterministic_and_cached(capsys):
    cache = cli.cache_dir()
    code, cold, _ = run(capsys, "count", "--q", "5", "--method", "orbits")
    assert code == 0
    files = list(cache.iterdir())
    assert len(files) == 1
    code, warm, _ = run(capsys, "count", "--q", "5", "--method", "orbits")
    assert warm == cold
    # tamper with the stored key: must recompute and still agree
    entry = json.loads(files[0].read_text())
    entry["key"] = "0" * 64
    entry["payload"]["up_to_isotopy"] = "999"
    files[0].write_text(json.dumps(entry))
    code, again, err = run(capsys, "count", "--q", "5", "--method", "orbits")
    assert again == cold and "mismatch" in err


def test_fresh_processes_agree(tmp_path):
    outs = []
    for i in range(2):
        env = dict(os.environ, LOOPCOUNT_CACHE=str(tmp_path / f"c{i}"))
        proc = subprocess.run([sys.executable, "-m", "loopcount", "count", "--q", "3", "--method", "orbits"],
                              capture_output=True, env=env, check=True)
        outs.append(proc.stdout)
    assert outs[0] == outs[1]


def test_verify_range(capsys):
    code, out, err = run(capsys, "verify", "--q", "3..5")
    data = json.loads(out)
    assert code == 0 and data["passed"]
    assert [c["q"] for c in data["certificates"]] == [3, 5]
    assert "q=5: PASS" in err


def test_verify_q7_skips_oracle(capsys):
    code, out, err = run(capsys, "verify", "--q", "7")
    assert code == 0 and json.loads(out)["passed"]
    assert "oracle skipped" in err


def test_verify_catches_wrong_formula(capsys, monkeypatch):
    real = counting.count_via_formula

    def off_by_one(q):
        rep = real(q)
        return CountReport(q, rep.up_to_isotopy + 1, rep.up_to_isomorphism + 1, "formula")

    monkeypatch.setattr(counting, "count_via_formula", off_by_one)
    code, out, _ = run(capsys, "verify", "--q", "3")
    assert code == 1
    bad = [r for c in json.loads(out)["certificates"] for r in c["comparisons"] if not r["ok"]]
    assert {r["method"] for r in bad} == {"formula"}


def test_export_orbits(capsys, tmp_path):
    target = tmp_path / "orbits.jsonl"
    assert run(capsys, "export", "orbits", "--q", "3", "--out", str(target))[0] == 0
    rows = [json.loads(line) for line in target.read_text().splitlines()]
    assert sum(r["size"] for r in rows) == 16 and len(rows) == 2
    first = target.read_bytes()
    assert run(capsys, "export", "orbits", "--q", "3", "--out", str(target))[0] == 0
    assert target.read_bytes() == first


def test_export_decomposition(capsys, tmp_path):
    target = tmp_path / "dec.json"
    assert run(capsys, "export", "decomposition", "--q", "7", "--out", str(target))[0] == 0
    data = json.loads(target.read_text())
    assert sorted(c["degree"] for c in data["components"]) == [1, 3, 3]


def test_export_classes(capsys, tmp_path):
    target = tmp_path / "classes.jsonl"
    assert run(capsys, "export", "classes", "--q", "3", "--out", str(target))[0] == 0
    assert len(target.read_text().splitlines()) == 2


def test_cayley(capsys):
    hexv = CocycleVector(3, 0b1000).hex()
    code, out, _ = run(capsys, "cayley", "--q", "3", "--cocycle", hexv)
    data = json.loads(out)
    assert code == 0 and data["n"] == 6 and data["table"][0] == list(range(6))
    code, out, _ = run(capsys, "cayley", "--q", "3", "--cocycle", hexv, "--format", "text")
    assert code == 0 and len(out.strip().splitlines()) >= 6


@pytest.mark.parametrize("argv", [
    ["count", "--q", "4"],
    ["count", "--q", "x"],
    ["verify", "--q", "8..10"],
    ["cayley", "--q", "3", "--cocycle", "fffff"],
    ["count", "--q", "3", "--generators", "/nonexistent.json"],
])
def test_usage_errors(capsys, argv):
    assert run(capsys, *argv)[0] == 2


def test_malformed_generator_config(capsys, tmp_path):
    bad = tmp_path / "gens.json"
    bad.write_text('[{"kind": "automorphism", "u": 5}]')
    assert run(capsys, "count", "--q", "5", "--method", "burnside", "--generators", str(bad))[0] == 2
    bad.write_text('[{"kind": "teleport"}]')
    assert run(capsys, "export", "orbits", "--q", "3", "--generators", str(bad), "--out", str(tmp_path / "o"))[0] == 2


def test_argparse_errors(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["count"])
    assert exc.value.code == 2


def test_resource_cap(capsys):
    code, _, err = run(capsys, "count", "--q", "7", "--method", "orbits")
    assert code == 3 and "error" in err
