import json
import subprocess
import sys

import pytest

from stuffedmaps.cells import cellset
from stuffedmaps.cli import main
from stuffedmaps.enumerate import enumerate_pointed_bms
from stuffedmaps.maps import canonical_form


@pytest.fixture
def specs(tmp_path):
    out = {}
    for name, cells in {"empty": [], "quad": [[4]], "qb": [[4], [2, 2]], "bad": [[3]]}.items():
        p = tmp_path / f"{name}.json"
        p.write_text(json.dumps({"cells": [{"boundaries": b} for b in cells]}))
        out[name] = str(p)
    return out


def run(argv, capsys):
    code = main(argv)
    return code, capsys.readouterr().out


def test_enumerate_catalan_row(specs, capsys):
    code, out = run(["enumerate", "--cells", specs["empty"], "--boundary", "8", "--max-vertices", "5",
                     "--format", "csv"], capsys)
    assert code == 0
    assert out.splitlines() == ["boundary,vertices,count", "8,5,14"]


def test_enumerate_odd_boundary_empty(specs, capsys):
    code, out = run(["enumerate", "--cells", specs["quad"], "--boundary", "3"], capsys)
    assert code == 0 and json.loads(out)["entries"] == []


def test_enumerate_bad_spec(specs, capsys):
    assert run(["enumerate", "--cells", specs["bad"]], capsys)[0] == 2


def test_enumerate_budget(specs, capsys, monkeypatch):
    monkeypatch.setenv("STUFFEDMAP_BUDGET_MS", "1")
    assert run(["enumerate", "--cells", specs["qb"], "--bms", "--max-vertices", "8"], capsys)[0] == 3


def test_enumerate_is_byte_deterministic(specs, tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for p in (a, b):
        main(["enumerate", "--cells", specs["qb"], "--bms", "--pointed", "--max-vertices", "5", "--out", str(p)])
    assert a.read_bytes() == b.read_bytes()


def test_series_tree_table(specs, capsys):
    code, out = run(["series", "--which", "tree", "--cells", specs["quad"], "--order", "6", "--format", "csv"], capsys)
    assert code == 0
    rows = [r.split(",") for r in out.splitlines()[1:]]
    assert [int(r[-1]) for r in rows] == [1, 3, 18, 135, 1134, 10206]


def test_series_tutte_catalan_diagonal(capsys):
    code, out = run(["series", "--which", "tutte", "--order", "10"], capsys)
    data = json.loads(out)
    assert code == 0
    diag = [data["moments"][str(2 * m)]["coeffs"][m + 1][0]["num"] for m in range(9)]
    assert diag == [1, 1, 2, 5, 14, 42, 132, 429, 1430]


def test_series_order_zero(capsys):
    code, out = run(["series", "--order", "0", "--boundary", "4"], capsys)
    data = json.loads(out)
    assert code == 0 and all(len(s["coeffs"]) == 1 for s in data["moments"].values())


@pytest.mark.parametrize("which", ["functional", "stuffed-tutte", "pointed"])
def test_series_stuffed_routes(specs, capsys, which):
    code, out = run(["series", "--which", which, "--cells", specs["qb"], "--order", "4", "--boundary", "2"], capsys)
    assert code == 0 and json.loads(out)


def test_bijection_check(specs, capsys):
    code, out = run(["bijection", "check", "--cells", specs["qb"], "--max-vertices", "4"], capsys)
    report = json.loads(out)
    assert code == 0 and report["failures"] == []
    assert report["counts_left"] == report["counts_right"]


def test_bijection_apply_then_inverse(tmp_path, capsys):
    m = canonical_form(enumerate_pointed_bms(cellset([4], [2, 2]), 5)[1][-1])
    src, mid, back, again = (tmp_path / n for n in ("m.json", "h.json", "m2.json", "m3.json"))
    src.write_text(m.dumps())
    assert main(["bijection", "apply", "--input", str(src), "--out", str(mid)]) == 0
    assert main(["bijection", "apply", "--inverse", "--input", str(mid), "--out", str(back)]) == 0
    assert json.loads(back.read_text()) == json.loads(src.read_text())
    assert main(["bijection", "apply", "--input", str(back), "--out", str(again)]) == 0
    assert again.read_bytes() == mid.read_bytes()


def test_bijection_invalid_input(tmp_path, capsys):
    p = tmp_path / "h.json"
    p.write_text('{"format": "hypermobile/v1", "mobiles": []}')
    assert run(["bijection", "apply", "--inverse", "--input", str(p)], capsys)[0] == 2
    p.write_text("not json")
    assert run(["bijection", "apply", "--input", str(p)], capsys)[0] == 2


def test_demo_series_only(capsys):
    code, out = run(["demo", "--order", "1", "--max-vertices", "0"], capsys)
    report = json.loads(out)
    assert code == 0
    assert not any(r["check"] == "enumeration_matches_T2" for r in report["rows"])
    assert all(e["verdict"] != "unresolved" for e in report["ledger"])


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "stuffedmaps", "series", "--order", "2", "--boundary", "2"],
                       capture_output=True, text=True, check=False)
    assert r.returncode == 0 and json.loads(r.stdout)["order"] == 2
