import json
import subprocess
import sys

import pytest

from homstab import cli
from homstab.cli import ExperimentResult


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv, "--format", "json")
    return code, json.loads(out)


def values(doc, **where):
    return [r["value"] for r in doc["results"] if all(r.get(k) == v for k, v in where.items())]


def test_injwords(capsys):
    code, doc = run_json(capsys, "injwords", "5")
    assert code == 0 and doc["status"] == "pass"
    assert values(doc, n=5) == [0, 0, 0, 0, 44]
    code, doc = run_json(capsys, "injwords", "2")
    assert values(doc, n=2) == [0, 1]
    code, doc = run_json(capsys, "injwords", "0")
    assert code == 0 and doc["results"] == []


def test_injwords_out_of_range(capsys):
    code, out, err = run(capsys, "injwords", "8")
    assert code != 0 and "0..7" in err and out == ""
    code, *_ = run(capsys, "injwords", "-1")
    assert code != 0


def test_braid_table(capsys):
    code, doc = run_json(capsys, "braid-table", "--n-max", "6", "--deg-max", "2")
    assert code == 0
    assert [r["value"] for r in doc["results"] if r.get("i") == 1 and "n" in r] == [0, 1, 1, 1, 1, 1]
    assert all("fail" not in str(v) for v in values(doc))
    code, doc = run_json(capsys, "braid-table", "--n-max", "1", "--deg-max", "2")
    assert code == 0 and {r["n"] for r in doc["results"] if "n" in r} == {1}
    code, *_ = run(capsys, "braid-table", "--n-max", "13")
    assert code != 0


def test_braid_table_jobs_do_not_change_output(capsys):
    _, a = run_json(capsys, "braid-table", "--n-max", "9", "--deg-max", "4", "--no-cache")
    _, b = run_json(capsys, "braid-table", "--n-max", "9", "--deg-max", "4", "--no-cache", "--jobs", "3")
    assert a["results"] == b["results"]


def test_sphere_h1(capsys):
    code, doc = run_json(capsys, "sphere-h1", "12")
    assert code == 0 and values(doc) == ["Z/22"]
    assert values(run_json(capsys, "sphere-h1", "5", "--char", "2")[1]) == [1]
    assert values(run_json(capsys, "sphere-h1", "5", "--char", "3")[1]) == [0]
    assert run(capsys, "sphere-h1", "1")[0] != 0
    assert run(capsys, "sphere-h1", "5", "--char", "9")[0] != 0


def test_tau(capsys):
    code, doc = run_json(capsys, "tau", "6")
    assert code == 0 and "index 2" in values(doc)
    code, doc = run_json(capsys, "tau", "5")
    assert code == 0 and "zero" in values(doc)
    assert run(capsys, "tau", "1")[0] != 0


def test_dold(capsys):
    code, doc = run_json(capsys, "dold", "--seed", "7", "--N", "5", "--dims", "1,2,0,3")
    assert code == 0
    assert "iso=true ti_invertible=true" in values(doc)
    assert [r["value"] for r in doc["results"] if isinstance(r["value"], int)] == [1, 2, 0, 3, 0, 0]
    assert run(capsys, "dold", "--N", "2", "--dims", "1,1,1,1")[0] != 0
    assert run(capsys, "dold", "--N", "-1")[0] != 0
    assert run(capsys, "dold", "--N", "3", "--dims", "1,-1")[0] != 0


def test_halfsmash(capsys):
    code, doc = run_json(capsys, "halfsmash", "3")
    assert code == 0 and values(doc)[:3] == ["0", "0", "0"]
    assert run(capsys, "halfsmash", "0")[0] != 0


def test_verify_all_small(capsys):
    code, doc = run_json(capsys, "verify-all", "--scale", "small")
    assert code == 0 and len(doc["results"]) == 7


def test_csv_and_table(capsys):
    code, out, _ = run(capsys, "injwords", "3", "--format", "csv")
    lines = out.splitlines()
    assert lines[0] == "i,n,value" and lines[-1] == "2,3,2"
    code, out, _ = run(capsys, "injwords", "3")
    assert "status: pass" in out


def test_json_schema_and_round_trip(capsys):
    _, doc = run_json(capsys, "braid-table", "--n-max", "4", "--deg-max", "1")
    assert set(doc) == {"experiment", "params", "results", "status", "wall_ms"}
    assert isinstance(doc["wall_ms"], int) and doc["status"] in ("pass", "fail")
    for r in doc["results"]:
        assert set(r) <= {"i", "n", "value"} and isinstance(r["value"], (int, str))
    res = ExperimentResult.from_json(json.dumps(doc))
    assert json.loads(res.to_json()) == doc


def test_cache_is_written_and_reused(capsys, tmp_path, monkeypatch):
    env_dir, flag_dir = tmp_path / "env", tmp_path / "flag"
    monkeypatch.setenv("HOMSTAB_CACHE_DIR", str(env_dir))
    run(capsys, "tau", "4")
    assert len(list(env_dir.glob("*.json"))) == 1
    run(capsys, "tau", "4", "--cache-dir", str(flag_dir))
    assert len(list(flag_dir.glob("*.json"))) == 1 and len(list(env_dir.glob("*.json"))) == 1
    # a planted entry is served as is, so the cache really is consulted
    key = cli.cache_key("tau", {"d": 4})
    planted = ExperimentResult("tau", {"d": 4}, [{"value": "planted"}], "pass", 0)
    (env_dir / f"{key}.json").write_text(planted.to_json())
    _, doc = run_json(capsys, "tau", "4")
    assert values(doc) == ["planted"]
    _, doc = run_json(capsys, "tau", "4", "--no-cache")
    assert values(doc) != ["planted"]


def test_cache_key_is_canonical():
    assert cli.cache_key("x", {"a": 1, "b": 2}) == cli.cache_key("x", {"b": 2, "a": 1})
    assert cli.cache_key("x", {"a": 1}) != cli.cache_key("y", {"a": 1})


def test_deterministic_output(capsys):
    _, a = run_json(capsys, "dold", "--seed", "3", "--N", "4", "--no-cache")
    _, b = run_json(capsys, "dold", "--seed", "3", "--N", "4", "--no-cache")
    a.pop("wall_ms"), b.pop("wall_ms")
    assert a == b


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "homstab", "sphere-h1", "3", "--no-cache"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "Z/4" in proc.stdout


def test_unknown_subcommand_exits_nonzero():
    with pytest.raises(SystemExit) as exc:
        cli.main(["nope"])
    assert exc.value.code != 0
