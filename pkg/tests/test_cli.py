import io
import json
import shutil
import subprocess
import sys
from pathlib import Path

import pytest

from steinberg_lab.cli import run
from steinberg_lab.functors import constant_functor
from steinberg_lab.lattice import PosetView

DATA = Path(__file__).parent / "data"


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def call_json(*argv):
    code, out, err = call(*argv)
    return code, json.loads(out) if out else None, err


def test_steinberg_verb():
    code, obj, _ = call_json("steinberg", "--n", "2")
    assert code == 0 and obj["st_dim"] == 2 and obj["ok"]


def test_lusztig_check():
    code, obj, _ = call_json("lusztig-check", "--n", "3", "--variant", "2")
    assert code == 0
    assert obj["lusztig"]["homology"] == [0, 0, 0, 0]


def test_limk_on_constant():
    code, obj, _ = call_json("limk", "--functor", str(DATA / "const_W0_n2.json"), "--k", "1")
    assert code == 0 and obj["dim"] == 0
    code, obj, _ = call_json("limk", "--functor", str(DATA / "const_W0_n2.json"))
    assert obj["lim"] == [1, 0]


def test_ext_resolve_bicomplex():
    path = str(DATA / "simple0_W_n2.json")
    code, obj, _ = call_json("ext", "--functor", path)
    assert code == 0 and obj["ext"] == [1, 0, 0]
    code, obj, _ = call_json("resolve", "--functor", path)
    assert code == 0 and obj["exact"]
    code, obj, _ = call_json("resolve", "--n", "2")
    assert code == 0 and len(obj["simples"]) == 5
    code, obj, _ = call_json("bicomplex-check", "--functor", path)
    assert code == 0 and obj["klim"]["ok"] and obj["e1"]["ok"]


def test_mvh_and_verify_mv():
    code, obj, _ = call_json("mvh", "--n", "2", "--h", "2", "--maxdeg", "5")
    assert code == 0 and obj["dims"] == [2, 4, 3, 2, 1, 0]
    code, obj, _ = call_json("verify-mv", "--n", "2", "--maxdeg", "6")
    assert code == 0
    assert obj["checks"]["intertwiner"]["hom_dim"] == 1


def test_verify_and_radical():
    code, obj, _ = call_json("verify", "--n", "2")
    assert code == 0 and all(c["ok"] for c in obj["checks"].values())
    code, obj, _ = call_json("radical-check", "--n", "2", "--maxdeg", "3")
    assert code == 0 and len(obj["results"]) == 1 + 3 + 3 + 1
    code, obj, _ = call_json("radical-check", "--n", "2", "--forms", "[1, 3]")
    assert code == 0 and obj["results"][0]["forms"] == [1, 3]


def test_csv_and_out(tmp_path):
    code, out, _ = call("mvh", "--n", "1", "--h", "2", "--maxdeg", "3", "--format", "csv")
    assert code == 0
    assert out == "degree,dim\n0,1\n1,1\n2,0\n3,0\n"
    target = tmp_path / "m.json"
    code, out, _ = call("mvh", "--n", "2", "--maxdeg", "2", "--out", str(target))
    assert code == 0 and out == ""
    assert json.loads(target.read_text())["dims"] == [2, 1, 0]
    code, _, err = call("steinberg", "--n", "2", "--format", "csv")
    assert code == 2 and "csv" in err


def test_determinism():
    for argv in (["verify", "--n", "2"], ["mvh", "--n", "3", "--maxdeg", "3"],
                 ["bicomplex-check", "--functor", str(DATA / "simple0_W_n2.json")]):
        assert call(*argv)[1] == call(*argv)[1]


@pytest.mark.parametrize("argv,needle", [
    (["frobnicate"], "frobnicate"),
    (["steinberg"], "--n"),
    (["steinberg", "--n", "4"], "cap"),
    (["mvh", "--n", "2"], "--maxdeg"),
    (["mvh", "--n", "2", "--maxdeg", "13"], "cap"),
    (["mvh", "--n", "2", "--maxdeg", "2", "--h", "0"], "--h"),
    (["lusztig-check", "--n", "2", "--variant", "3"], "variant"),
    (["radical-check", "--n", "2", "--forms", "[4]"], "--forms"),
    (["radical-check", "--n", "2", "--forms", "[1, 1]"], "distinct"),
    (["limk", "--functor", "/nonexistent.json"], "cannot read"),
])
def test_usage_errors_exit_2(argv, needle):
    code, out, err = call(*argv)
    assert code == 2 and out == ""
    assert needle in err


def test_unsafe_caps_lifts_n():
    code, obj, _ = call_json("steinberg", "--n", "4", "--unsafe-caps")
    assert code == 0 and obj["st_dim"] == 64


def _write(tmp_path, obj, raw=None):
    p = tmp_path / "f.json"
    p.write_text(raw if raw is not None else json.dumps(obj))
    return str(p)


def test_malformed_functor_json(tmp_path):
    good = json.loads((DATA / "const_W0_n2.json").read_text())
    code, _, err = call("limk", "--functor", _write(tmp_path, None, "{ not json"))
    assert code == 2 and "malformed JSON" in err
    bad = dict(good)
    del bad["dims"]
    code, _, err = call("limk", "--functor", _write(tmp_path, bad))
    assert code == 2 and "dims" in err
    bad = json.loads(json.dumps(good))
    bad["poset"] = "Q"
    code, _, err = call("limk", "--functor", _write(tmp_path, bad))
    assert code == 2 and "poset" in err


def test_fault_fixtures_are_rejected(tmp_path):
    # constant functor on W(2) with one line -> V map zeroed: two paths 0 -> V disagree
    obj = constant_functor(PosetView.W(2)).to_json()
    key = next(k for k in obj["maps"] if k.endswith('<{"n":2,"rows":[1,2]}'))
    obj["maps"][key] = [[0]]
    path = _write(tmp_path, obj)
    for verb in ("ext", "resolve", "bicomplex-check", "limk"):
        code, _, _ = call(verb, "--functor", path)
        assert code != 0, verb


@pytest.mark.parametrize("seed", range(10))
def test_mutation_flag_fails(seed):
    code, obj, _ = call_json("lusztig-check", "--n", "2", "--mutate", str(seed))
    assert code == 1 and not obj["ok"] and "mutation" in obj["lusztig"]
    code, obj, _ = call_json("verify", "--n", "2", "--mutate", str(seed))
    assert code == 1


def test_entry_points():
    exe = shutil.which("steinberg-lab")
    cmds = [[sys.executable, "-m", "steinberg_lab", "steinberg", "--n", "3"]]
    if exe:
        cmds.append([exe, "steinberg", "--n", "3"])
    for cmd in cmds:
        proc = subprocess.run(cmd, capture_output=True, text=True, check=False)
        assert proc.returncode == 0, proc.stderr
        assert json.loads(proc.stdout)["st_dim"] == 8
    proc = subprocess.run([sys.executable, "-m", "steinberg_lab", "nope"], capture_output=True, text=True)
    assert proc.returncode == 2
