import json

import pytest

from nearpoly import cli


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_construct_hamming(tmp_path, capsys):
    path = tmp_path / "h33.json"
    code, out, _ = run(capsys, "construct", "hamming", "--d", "3", "--n", "3", "--out", str(path))
    assert code == 0
    assert "27 vertices, 81 edges" in out
    assert "{6,4,2;1,2,3}" in out
    assert json.loads(path.read_text())["num_vertices"] == 27


def test_construct_dual_polar_json(tmp_path, capsys):
    path = tmp_path / "c32.txt"
    code, out, _ = run(capsys, "construct", "dual-polar", "--family", "C", "--d", "3", "--p", "2",
                       "--m", "1", "--out", str(path), "--format", "json")
    info = json.loads(out)
    assert code == 0 and info["num_vertices"] == 135 and info["num_edges"] == 945
    assert info["predicted_array"] == "{14,12,8;1,3,7}"


@pytest.mark.parametrize("argv", [
    ("construct", "hamming", "--d", "0", "--n", "3"),
    ("construct", "dual-polar", "--family", "C", "--d", "6", "--p", "3"),
    ("analyze", "--array", "6,4;2,2"),
    ("analyze", "--catalog", "no-such-entry"),
])
def test_errors_exit_2(tmp_path, capsys, monkeypatch, argv):
    monkeypatch.chdir(tmp_path)
    code, _, err = run(capsys, *argv)
    assert code == 2 and err.startswith("error:")


def test_argparse_usage_errors(capsys):
    with pytest.raises(SystemExit) as info:
        cli.main(["construct", "dual-polar", "--family", "E", "--d", "3", "--p", "2"])
    assert info.value.code == 2
    with pytest.raises(SystemExit) as info:
        cli.main(["analyze", "--array", "6,4,2;1,2,3", "--catalog", "H(3,3)"])
    assert info.value.code == 2


def test_analyze_m24(capsys):
    code, out, _ = run(capsys, "analyze", "--catalog", "M24-near-hexagon", "--format", "json")
    rep = json.loads(out)
    assert code == 0
    assert rep["classification"]["bound"]["relation"] == "strict"
    assert rep["classification"]["family"] == "neither"


def test_analyze_hamming_array_text(capsys):
    code, out, _ = run(capsys, "analyze", "--array", "6,4,2;1,2,3")
    assert code == 0
    assert "θ₁ = 3" in out and "→ equal" in out and "family: hamming" in out
    assert "c_i" in out and "σ" in out


def test_analyze_pentagon_graph(tmp_path, capsys):
    path = tmp_path / "pentagon.txt"
    path.write_text("0 1\n1 2\n2 3\n3 4\n4 0\n")
    code, out, _ = run(capsys, "analyze", "--graph", str(path), "--format", "json")
    rep = json.loads(out)
    assert code == 0
    h = rep["classification"]["hypotheses"]
    assert h["diameter_ge_3"] is False and h["all_met"] is False
    assert rep["intersection_array"]["string"] == "{2,1;1,1}"


def test_analyze_catalog_with_graph(capsys):
    code, out, _ = run(capsys, "analyze", "--catalog", "C_3(2)", "--with-graph", "--format", "json")
    rep = json.loads(out)
    assert code == 0 and rep["graph"]["num_vertices"] == 135
    assert rep["near_polygon"]["via_cliques"] and rep["near_polygon"]["via_forbidden_subgraph"]


def test_round_trip_construct_then_analyze(tmp_path, capsys):
    path = tmp_path / "b32.json"
    run(capsys, "construct", "dual-polar", "--family", "B", "--d", "3", "--p", "2", "--out", str(path))
    code, out, _ = run(capsys, "analyze", "--graph", str(path), "--format", "json")
    rep = json.loads(out)
    assert code == 0
    assert rep["intersection_array"]["string"] == "{14,12,8;1,3,7}"
    assert rep["spectrum"]["eigenvalues"] == ["14", "5", "-1", "-7"]
    assert rep["classification"]["classical"] == {"d": 3, "q": "2", "alpha": "0", "beta": "2"}


def test_json_deterministic(capsys):
    a = run(capsys, "analyze", "--catalog", "2A_5(2)", "--format", "json")[1]
    b = run(capsys, "analyze", "--catalog", "2A_5(2)", "--format", "json")[1]
    assert a == b


def test_verify_passes(tmp_path, capsys):
    path = tmp_path / "c32.json"
    run(capsys, "construct", "dual-polar", "--family", "C", "--d", "3", "--p", "2", "--out", str(path))
    code, out, _ = run(capsys, "verify", str(path), "--format", "json")
    rep = json.loads(out)
    assert code == 0
    assert {r["status"] for r in rep["audits"]} == {"pass"}
    assert len(rep["audits"]) == 7


def test_verify_corrupted_graph(tmp_path, capsys):
    path = tmp_path / "h33.json"
    run(capsys, "construct", "hamming", "--d", "3", "--n", "3", "--out", str(path))
    data = json.loads(path.read_text())
    data["edges"] = data["edges"][1:]
    path.write_text(json.dumps(data))
    code, out, _ = run(capsys, "verify", str(path))
    assert code == 1
    assert "distance-regular" in out and "FAIL" in out and "pair=" in out
    code, out, _ = run(capsys, "analyze", "--graph", str(path))
    assert code == 1 and "NOT distance-regular" in out


def test_verify_empty_file(tmp_path, capsys):
    path = tmp_path / "empty.txt"
    path.write_text("")
    code, _, err = run(capsys, "verify", str(path))
    assert code == 2 and "empty" in err


def test_catalog_listing(capsys):
    code, out, _ = run(capsys, "catalog", "--format", "json")
    names = {e["name"] for e in json.loads(out)}
    assert code == 0
    assert {"H(3,3)", "H(4,3)", "C_3(2)", "B_3(2)", "2D_4(2)", "2A_5(2)", "M24-near-hexagon"} <= names


def test_custom_catalog_file(tmp_path, capsys):
    path = tmp_path / "cat.json"
    path.write_text(json.dumps([{"name": "x", "array": "6,4,2;1,2,3", "provenance": "test"}]))
    code, out, _ = run(capsys, "analyze", "--catalog", "x", "--catalog-file", str(path))
    assert code == 0 and "hamming" in out
    path.write_text(json.dumps([{"name": "bad", "array": "6,4;2,2"}]))
    code, _, _ = run(capsys, "catalog", "--catalog-file", str(path))
    assert code == 2


def test_run_config_requires_one_source():
    with pytest.raises(cli.UsageError):
        cli.RunConfig("graph", None)
    with pytest.raises(cli.UsageError):
        cli.RunConfig("stdin", "x")
