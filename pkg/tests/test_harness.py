import json
import math

import numpy as np
import pytest

from lcoarea import (CausalMap, CausalSet, ExperimentConfig, density_diagnostic, random_coarea_instance,
                     run_batch, run_coarea_experiment, run_minkowski_volume_experiment, sprinkle,
                     SprinkleConfig, strong_vs_causal_test)
from lcoarea.errors import ExperimentAborted, InputError
from lcoarea.harness import minkowski_volume_mc, run_coarea_instance
from lcoarea.measure import omega
from lcoarea.report import CSV_HEADER, csv_text, dumps

GRID = {
    "points": [{"id": "p0", "coords": [0, 0]}, {"id": "p1", "coords": [0, 0.5]},
               {"id": "p2", "coords": [1, 0]}, {"id": "p3", "coords": [1, 0.5]}],
    "metric": "euclidean",
    "relations": {"mode": "from_coords_minkowski"},
    "tau": {"mode": "from_coords"},
}
CHAIN2 = {"points": [{"id": "y0", "coords": [0, 0]}, {"id": "y1", "coords": [1, 0]}],
          "metric": "euclidean", "relations": {"mode": "from_coords_minkowski"},
          "tau": {"mode": "from_coords"}}
QUOTIENT = {"table": {"p0": "y0", "p1": "y0", "p2": "y1", "p3": "y1"}}


def grid_config(**kw):
    doc = {"X": GRID, "Y": CHAIN2, "map": QUOTIENT, "s": 1, "t": 1, "delta": 3, "delta0": 3}
    doc.update(kw)
    return ExperimentConfig.from_dict(doc)


def test_grid_experiment_passes_and_is_reproducible():
    rep = run_coarea_experiment(grid_config())
    assert rep.passed and rep.slack >= -1e-9
    assert rep.lhs == 2.0 and rep.constant == pytest.approx(1 / math.sqrt(0.75))
    assert dumps(rep) == dumps(run_coarea_experiment(grid_config()))
    assert json.loads(dumps(rep))["hypotheses"]


def test_identity_t0_is_consistent():
    X = CausalSet.from_coords([[0, 0], [1, 0], [2, 0]])
    rep = run_coarea_instance(X, X, CausalMap.identity(X), 1.0, 0.0, 3.0, 3.0)
    assert rep.constant == 1.0 and rep.passed
    assert rep.chain.slack_i == pytest.approx(0.0, abs=1e-9)


def test_config_validation(tmp_path):
    with pytest.raises(InputError):
        grid_config(t=2)
    with pytest.raises(InputError):
        grid_config(delta=0)
    with pytest.raises(InputError):
        ExperimentConfig.from_dict({"bogus": 1})
    (tmp_path / "x.json").write_text(json.dumps(GRID))
    cfg = ExperimentConfig.from_dict({"X": "x.json", "map": {"rule": "scale:2"}}, base=tmp_path)
    assert cfg.X == str(tmp_path / "x.json")
    assert run_coarea_experiment(cfg).passed


def test_aborts_on_bad_map():
    X = CausalSet.from_coords([[0, 0], [1, 0]])
    with pytest.raises(ExperimentAborted) as exc:
        run_coarea_instance(X, X, CausalMap.from_table(X, X, [1, 0]), 1, 1, 3, 3)
    assert exc.value.verdict.kind == "order"
    line = CausalSet.from_coords([[0, 0], [1, 1]])
    with pytest.raises(ExperimentAborted):
        U = CausalMap.from_rule("drop_time_to_line", line)
        run_coarea_instance(line, U.Y, U, 1, 1, 3, 3)


@pytest.mark.parametrize("seed", range(10))
def test_random_instances_within_limits(seed):
    inst = random_coarea_instance(seed)
    assert inst.X.n <= 10 and inst.Y.n <= 4
    assert inst.s in (0, 1, 2) and 0 <= inst.t <= inst.s and inst.delta <= inst.delta0
    assert random_coarea_instance(seed).X.ids == inst.X.ids
    rep = run_coarea_instance(inst.X, inst.Y, inst.U, inst.s, inst.t, inst.delta, inst.delta0)
    assert rep.passed


def test_run_batch_preserves_seed_order():
    out = run_batch(lambda k: k * k, [5, 3, 9, 1], threads=4)
    assert out == [25, 9, 81, 1]
    assert run_batch(lambda k: -k, range(5), threads=1) == [0, -1, -2, -3, -4]


def test_volume_experiment():
    rep = run_minkowski_volume_experiment([0.5, 0.1, 0.02])
    assert rep.estimate.values == [0.5, 0.5, 0.5] and rep.max_abs_error == 0.0
    assert run_minkowski_volume_experiment([0.5, 0.1], tau=2.0).estimate.values == [2.0, 2.0]
    null = run_minkowski_volume_experiment([0.5], p=(0.0, 0.0), q=(1.0, 1.0))
    assert null.volume == 0.0 and null.estimate.values == [0.0]
    assert csv_text(rep.csv_rows()).splitlines()[0] == ",".join(CSV_HEADER)


def test_volume_mc_small():
    assert minkowski_volume_mc(2, 100_000, seed=1) == pytest.approx(omega(2), rel=0.02)


def test_density_diagnostic():
    cs = sprinkle(SprinkleConfig(2, 12.0, 4))
    stat = density_diagnostic(cs, None, 2.0, 0.1, samples=6)
    assert 0 <= stat.fraction <= 1 and stat.checked <= 6
    assert density_diagnostic(cs, None, 2.0, math.inf, samples=6).violations == 0
    assert density_diagnostic(cs, [cs.ids[0]], 2.0, 0.1).violations == 0


def test_strong_vs_causal_examples():
    X = CausalSet.from_coords([[0, 0], [1, 0], [2, 0]])
    for eps in (1.1, 1.5, 2.0):
        r = strong_vs_causal_test(X, None, 3.0, 1.0, eps)
        assert r.lower_holds and r.upper_holds and not r.infeasible
        assert r.M_delta >= r.V_delta
    empty = strong_vs_causal_test(X, [], 3.0)
    assert empty.V_delta == empty.M_delta == 0.0
    apart = CausalSet.from_coords([[0, 0], [0, 1]])
    r = strong_vs_causal_test(apart, None, 3.0)
    assert math.isinf(r.M_delta) and r.lower_holds
    with pytest.raises(InputError):
        strong_vs_causal_test(X, None, 3.0, epsilon=1.0)
