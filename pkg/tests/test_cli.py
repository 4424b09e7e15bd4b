import json

import pytest
from click.testing import CliRunner

from cei_ground import operad_fixture as of
from cei_ground.cli import main


@pytest.fixture
def run(monkeypatch):
    monkeypatch.delenv("CEI_GROUND_CACHE_DIR", raising=False)
    runner = CliRunner()
    return lambda *args: runner.invoke(main, list(args))


@pytest.mark.parametrize("args,out", [
    (["psi", "-g", "1", "-k", "1"], "1/24"),
    (["psi", "-g", "0", "-k", "0,0,0"], "1"),
    (["psi", "-g", "1", "-k", "0"], "0"),
    (["psi", "-g", "2", "-k", "4", "--method", "string_dilaton"], "1/1152"),
    (["cei", "-g", "0", "-k", "0,0,0", "--vertex-coefficient"], "1/6"),
    (["cei", "-g", "2", "-k", "0,0"], "0  (off dimension)"),
])
def test_values(run, args, out):
    r = run(*args)
    assert r.exit_code == 0, r.output
    assert r.output.strip() == out


def test_json_output_and_determinism(run):
    a = run("psi", "-g", "2", "-k", "2,3", "--format", "json")
    b = run("psi", "-g", "2", "-k", "2,3", "--format", "json")
    assert a.output == b.output
    assert json.loads(a.output) == [{"g": 2, "ks": [2, 3], "value": "29/5760"}]


def test_graphs(run):
    r = run("graphs", "-g", "1", "-n", "1")
    assert r.output.splitlines()[-1] == "total 2"
    r = run("graphs", "-g", "0", "-n", "4", "--chains", "1")
    assert r.output.splitlines()[-1] == "total 3"


def test_table_csv(run):
    r = run("table", "--max-genus", "1", "--max-n", "2", "--format", "csv")
    assert r.exit_code == 0
    assert r.output.splitlines()[0] == "g,n,ks,value"


@pytest.mark.parametrize("args", [["psi", "-g", "1", "-k", "a"], ["psi", "-g", "0", "-k", "0"],
                                  ["psi", "-g", "1", "-k", "-1"]])
def test_usage_errors(run, args):
    assert run(*args).exit_code == 2


def test_cache_dir(tmp_path, monkeypatch):
    monkeypatch.setenv("CEI_GROUND_CACHE_DIR", str(tmp_path))
    r = CliRunner().invoke(main, ["psi", "-g", "2", "-k", "1,3"])
    assert r.exit_code == 0
    assert (tmp_path / "psi-memo.json").exists()


def test_verify_passes(run):
    r = run("verify", "trivialization", "--quick")
    assert r.exit_code == 0, r.output
    assert r.output.splitlines()[-1] == "PASS suite trivialization"


def test_verify_corrupted_fixture_fails_with_witness(run, tmp_path):
    bad = of.negate_entry(of.torus_fixture(), (0, 3, 0, 0, 3, 0), (0, 0))
    path = tmp_path / "bad.fixture"
    path.write_text(bad.to_text())
    r = run("verify", "operad", "--quick", "--fixture", str(path))
    assert r.exit_code == 1
    assert "witness:" in r.output and r.output.splitlines()[-1] == "FAIL suite operad"


def test_verify_bad_files(run, tmp_path):
    junk = tmp_path / "junk.fixture"
    junk.write_text("garbage\n")
    assert run("verify", "operad", "--fixture", str(junk)).exit_code == 2
    assert run("verify", "operad", "--fixture", str(tmp_path / "missing")).exit_code == 2


def test_manifest_goes_to_stderr():
    runner = CliRunner()
    r = runner.invoke(main, ["psi", "-g", "1", "-k", "1", "--manifest"])
    assert r.stdout.strip() == "1/24"
    assert json.loads(r.stderr)["command"] == "psi"
