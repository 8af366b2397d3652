from __future__ import annotations

import io
import json
import re
import subprocess
import sys

import pytest

from principal_unipotent.catalog import save_catalog
from principal_unipotent.cli import EXIT_INVARIANT, EXIT_OK, EXIT_USAGE, format_table, run

from conftest import GROUPS


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    status = run(list(argv), out, err)
    return status, out.getvalue(), err.getvalue()


def test_classify_sl2r_table():
    status, out, _ = call("classify", "sl2r")
    assert status == EXIT_OK
    assert "BB*=3" in out and "Z*=3" in out
    assert re.search(r"^z_map_bijective +PASS$", out, re.M)


def test_classify_sl2r_json():
    status, out, _ = call("classify", "--group", "sl2r", "--format", "json")
    assert status == EXIT_OK
    doc = json.loads(out)
    assert doc["counts"]["bb_star"] == 3 and doc["counts"]["z_star"] == 3
    assert doc["checks"]["z_map_bijective"]


def test_langlands_sl2r():
    status, out, _ = call("langlands", "sl2r", "--format", "json")
    assert status == EXIT_OK
    doc = json.loads(out)
    assert sorted(len(p["params"]) for p in doc["packets"]) == [1, 2]
    assert doc["order2_oracle"] == 2
    assert all(r["order2"] for r in doc["lpairs"])
    status, out, _ = call("langlands", "sl2r")
    assert "2 packets; order-2 oracle: 2" in out


def test_verify_su2():
    status, out, _ = call("verify", "su2")
    assert status == EXIT_OK
    assert out.rstrip().endswith("su2: PASS")
    status, out, _ = call("classify", "su2", "--format", "json")
    doc = json.loads(out)
    assert doc["counts"]["bb_star"] == 0 and doc["quasisplit"] is False


@pytest.mark.parametrize("name", ["sl2r", "sl3r", "su21"])
def test_verify_passes(name):
    status, out, _ = call("verify", name)
    assert status == EXIT_OK, out
    assert "FAIL" not in out


def test_kgb_and_catalog():
    status, out, _ = call("kgb", "sl2r", "--format", "json")
    assert status == EXIT_OK
    assert len(json.loads(out)["vertices"]) == 4
    status, out, _ = call("catalog", "--format", "json")
    assert sorted(g["name"] for g in json.loads(out)["groups"]) == sorted(GROUPS)


def test_ktypes_command():
    status, out, _ = call("classify", "sl2r", "--format", "json")
    zid = next(z["id"] for z in json.loads(out)["z_star"] if z["levi_roots"])
    status, out, _ = call("ktypes", "sl2r", "--param", str(zid), "--cutoff", "6", "--format", "json")
    assert status == EXIT_OK
    doc = json.loads(out)
    cert = {tuple(r["highest_weight"]): r["multiplicity"] for r in doc["ktypes"] if r["certified"]}
    assert cert[("0",)] == 1 and cert[("2",)] == 1


@pytest.mark.parametrize("argv", [
    ("classify", "nosuchgroup"),
    ("classify",),
    ("ktypes", "sl2r", "--param", "0"),
    ("ktypes", "sl2r", "--param", "0", "--cutoff", "0"),
    ("ktypes", "sl2r", "--param", "99", "--cutoff", "4"),
    ("bogus", "sl2r"),
    ("classify", "sl2r", "--group", "sl3r"),
    ("classify", "sl2r", "--max-graph-size", "0"),
    ("classify", "sl2r", "--catalog", "/nonexistent/catalog.json"),
])
def test_usage_errors(argv):
    status, _, err = call(*argv)
    assert status == EXIT_USAGE


def test_graph_size_bound_is_an_invariant_failure():
    status, _, err = call("classify", "sp4r", "--max-graph-size", "3")
    assert status == EXIT_INVARIANT
    assert err


def test_user_catalog(tmp_path):
    from test_catalog import A1XA1

    path = str(tmp_path / "c.json")
    save_catalog([A1XA1], path)
    status, out, _ = call("verify", "a1xa1_explicit", "--catalog", path)
    assert status == EXIT_OK, out


@pytest.mark.parametrize("name", GROUPS)
def test_json_byte_identical(name):
    a = call("classify", name, "--format", "json")[1]
    b = call("classify", name, "--format", "json")[1]
    assert a == b


def test_format_table():
    text = format_table(["a", "bb"], [(1, 2), (333, 4)])
    assert text.splitlines() == ["a    bb", "---  --", "1    2", "333  4"]


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "principal_unipotent", "classify", "sl2r", "--format", "json"],
                         capture_output=True, text=True, check=False)
    assert res.returncode == 0
    assert json.loads(res.stdout)["counts"]["bb_star"] == 3
