import json

import pytest

from lcoarea.cli import main
from lcoarea.report import CSV_HEADER

CHAIN = {"points": [{"id": "a", "coords": [0, 0]}, {"id": "b", "coords": [1, 0]},
                    {"id": "c", "coords": [2, 0]}],
         "metric": "euclidean", "relations": {"mode": "from_coords_minkowski"},
         "tau": {"mode": "from_coords"}}


@pytest.fixture
def chain_file(tmp_path):
    p = tmp_path / "chain.json"
    p.write_text(json.dumps(CHAIN))
    return p


def run(argv, capsys):
    code = main([str(a) for a in argv])
    return code, capsys.readouterr()


def test_check_axioms(chain_file, capsys):
    code, out = run(["check-axioms", chain_file], capsys)
    assert code == 0 and json.loads(out.out)["passed"] is True


def test_measure_exact_and_greedy(chain_file, tmp_path, capsys):
    csv = tmp_path / "m.csv"
    code, out = run(["measure", chain_file, "--s", 1, "--delta", 3, "--method", "exact", "--csv", csv], capsys)
    assert code == 0 and json.loads(out.out)["cost"] == 2.0
    assert csv.read_text().splitlines()[0] == ",".join(CSV_HEADER)
    code, out = run(["measure", chain_file, "--s", 1, "--delta", 3, "--method", "greedy"], capsys)
    assert code == 0 and json.loads(out.out)["cost"] >= 2.0


def test_measure_with_pool(chain_file, tmp_path, capsys):
    pool = tmp_path / "pool.json"
    pool.write_text(json.dumps({"points": [{"id": "u", "coords": [-0.1, 0]}, {"id": "v", "coords": [2.1, 0]}],
                                "metric": "euclidean", "relations": {"mode": "from_coords_minkowski"},
                                "tau": {"mode": "from_coords"}}))
    code, out = run(["measure", chain_file, "--s", 1, "--delta", 3, "--pool", pool], capsys)
    assert code == 0 and json.loads(out.out)["cost"] <= 2.0


def test_measure_minkowski(tmp_path, capsys):
    out_file = tmp_path / "v.json"
    code, _ = run(["measure-minkowski", "--tau", 1, "--schedule", "0.5,0.1,0.02", "--out", out_file], capsys)
    doc = json.loads(out_file.read_text())
    assert code == 0 and doc["estimate"]["values"] == [0.5, 0.5, 0.5]


def test_integrate(chain_file, tmp_path, capsys):
    f = tmp_path / "f.json"
    f.write_text(json.dumps({"a": 1, "b": 1, "c": 1}))
    code, out = run(["integrate", chain_file, "--f", f, "--s", 1, "--delta", 3], capsys)
    assert code == 0 and json.loads(out.out)["value"] == 2.0


def test_coarea(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"X": "chain.json", "map": {"rule": "scale:2"}, "s": 1, "t": 1,
                               "delta": 3, "delta0": 3}))
    (tmp_path / "chain.json").write_text(json.dumps(CHAIN))
    out = tmp_path / "r.json"
    code, _ = run(["coarea", cfg, "--out", out], capsys)
    first = out.read_text()
    assert code == 0 and json.loads(first)["passed"] is True
    run(["coarea", cfg, "--out", out], capsys)
    assert out.read_text() == first


def test_coarea_generator(tmp_path, capsys):
    cfg = tmp_path / "g.json"
    cfg.write_text(json.dumps({"generator": {"seed": 3}}))
    code, out = run(["coarea", cfg], capsys)
    assert code == 0 and json.loads(out.out)["passed"] is True


def test_coarea_aborts(tmp_path, capsys):
    (tmp_path / "chain.json").write_text(json.dumps(CHAIN))
    cfg = tmp_path / "bad.json"
    cfg.write_text(json.dumps({"X": "chain.json", "Y": "chain.json",
                               "map": {"table": {"a": "c", "b": "b", "c": "a"}}}))
    code, out = run(["coarea", cfg], capsys)
    assert code == 2 and "aborted" in json.loads(out.out)


def test_covering_demo(capsys):
    code, out = run(["covering-demo", "--seed", 7, "--n", 50, "--ecc-max", 3], capsys)
    assert code == 0 and json.loads(out.out)["passed"] is True and "PASS" in out.err


def test_sprinkle(tmp_path, capsys):
    out = tmp_path / "s.json"
    code, _ = run(["sprinkle", "--dim", 2, "--intensity", 30, "--seed", 1, "--out", out], capsys)
    doc = json.loads(out.read_text())
    assert code == 0 and len(doc["points"]) > 0
    code, _ = run(["check-axioms", out], capsys)
    assert code == 0


def test_errors_exit_2(tmp_path, capsys):
    code, out = run(["check-axioms", tmp_path / "missing.json"], capsys)
    assert code == 2 and "error" in out.err
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    assert run(["measure", bad, "--s", 1, "--delta", 1], capsys)[0] == 2
