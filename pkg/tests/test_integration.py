import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lcoarea import (CausalMap, CausalSet, FiniteMeasure, candidate_diamonds, check_coarea_chain,
                     cover_value_exact, phi_delta, rho, unit_diamond, upper_integral_finite,
                     weighted_causal_integral_delta)
from lcoarea.errors import InputError
from lcoarea.integration import coarea_constant, fiber_function

from oracles import brute_force_cover, lp_basis_enumeration


def chain():
    return CausalSet.from_coords([[0, 0], [1, 0], [2, 0]], ["a", "b", "c"])


def grid():
    X = CausalSet.from_coords([[0, 0], [0, 0.5], [1, 0], [1, 0.5]], ["p0", "p1", "p2", "p3"])
    Y = CausalSet.from_coords([[0, 0], [1, 0]], ["y0", "y1"])
    return X, Y, CausalMap.from_table(X, Y, {"p0": "y0", "p1": "y0", "p2": "y1", "p3": "y1"})


def test_upper_integral_examples():
    mu = FiniteMeasure({"a": 1.0, "b": 3.0})
    assert upper_integral_finite({"a": 0, "b": 0}, mu) == 0.0
    assert upper_integral_finite({"a": 1.0, "b": 0.0}, FiniteMeasure({"a": 2.0, "b": 1.0})) == 2.0
    assert upper_integral_finite({"a": 1.0, "b": 2.0}, mu) == 7.0
    assert upper_integral_finite({"a": math.inf}, FiniteMeasure({"a": 0.0})) == 0.0
    with pytest.raises(InputError):
        upper_integral_finite({"a": 1.0}, mu)
    with pytest.raises(InputError):
        FiniteMeasure({"a": -1})


@given(st.dictionaries(st.sampled_from("abcde"), st.floats(0, 10), min_size=5, max_size=5),
       st.dictionaries(st.sampled_from("abcde"), st.floats(0, 10), min_size=5, max_size=5))
def test_zero_integral_and_monotone_limit(f, masses):
    mu = FiniteMeasure(masses)
    if upper_integral_finite(f, mu) == 0:
        assert all(f[x] == 0 for x, m in masses.items() if m > 0)
    seq = [upper_integral_finite({k: v * (1 - 2.0 ** -n) for k, v in f.items()}, mu) for n in range(1, 60)]
    assert all(b >= a for a, b in zip(seq, seq[1:]))
    assert math.isclose(seq[-1], upper_integral_finite(f, mu), rel_tol=1e-12, abs_tol=1e-12)


def test_weighted_integral_examples():
    cs = chain()
    res = weighted_causal_integral_delta(cs, {"a": 1, "b": 1, "c": 1}, 1, 3)
    assert res.value == 2.0
    assert weighted_causal_integral_delta(cs, {"a": 0}, 1, 3).value == 0.0
    res = weighted_causal_integral_delta(cs, {"a": 2}, 1, 1)
    assert res.value == 2.0 and [w for w, _ in res.cover.items] == [2.0]
    assert weighted_causal_integral_delta(cs, {"a": 1}, 1, 0.5).value == math.inf


def test_weighted_integral_infinite_demand():
    null = CausalSet.from_coords([[0, 0], [1, 1]])
    assert weighted_causal_integral_delta(null, {0: math.inf}, 1, 3).value == 0.0
    assert weighted_causal_integral_delta(chain(), {"a": math.inf}, 1, 3).value == math.inf


def _rand_space(seed, n=5):
    rng = np.random.default_rng(seed)
    return CausalSet.from_coords(unit_diamond(1).sample(rng, n)), rng


@pytest.mark.parametrize("seed", range(30))
def test_lp_and_vertex_methods_agree_with_oracle(seed):
    cs, rng = _rand_space(seed)
    f = {i: float(rng.uniform(0, 2)) for i in range(cs.n)}
    lp = weighted_causal_integral_delta(cs, f, 1.0, 0.8)
    ex = weighted_causal_integral_delta(cs, f, 1.0, 0.8, method="exact")
    cands = [J for J in candidate_diamonds(cs, 0.8, closed=True)]
    M = [[int(x in J.members) for J in cands] for x in range(cs.n)]
    want = lp_basis_enumeration(M, [rho(1.0, J) for J in cands], [f[x] for x in range(cs.n)])
    if math.isinf(want):
        assert math.isinf(lp.value) and math.isinf(ex.value)
    else:
        assert math.isclose(lp.value, want, rel_tol=1e-9, abs_tol=1e-9)
        assert math.isclose(ex.value, lp.value, rel_tol=1e-12, abs_tol=1e-12)


@pytest.mark.parametrize("seed", range(20))
def test_weighted_integral_properties(seed):
    cs, rng = _rand_space(seed, 6)
    f = {i: float(rng.uniform(0, 1)) for i in range(cs.n)}
    g = {i: v + float(rng.uniform(0, 1)) for i, v in f.items()}
    vf = weighted_causal_integral_delta(cs, f, 2.0, 0.9).value
    vg = weighted_causal_integral_delta(cs, g, 2.0, 0.9).value
    assert vg >= vf - 1e-12 or math.isinf(vg)
    # step majorant: f <= sum a_k chi_{A_k}
    A = [set(range(3)), set(range(3, 6))]
    a = [max(f[i] for i in A[0]), max(f[i] for i in A[1])]
    cands = candidate_diamonds(cs, 0.9)
    step = sum(w * cover_value_exact(cs, sorted(Ak), cands, 2.0).cost for w, Ak in zip(a, A))
    assert vf <= step + 1e-9
    # integral covers beat any 0/1 cover at the same scale
    closed = candidate_diamonds(cs, 0.9, closed=True)
    ones = {i: 1.0 for i in range(cs.n)}
    v1 = weighted_causal_integral_delta(cs, ones, 2.0, 0.9).value
    assert v1 <= cover_value_exact(cs, None, closed, 2.0).cost + 1e-12


def test_phi_examples():
    cs = chain()
    I = CausalMap.identity(cs)
    for d in (1.5, 3.0):
        want = cover_value_exact(cs, None, candidate_diamonds(cs, d), 1.0).cost
        assert phi_delta(I, None, 0.0, 1.0, d).value == want
    U = CausalMap.from_rule("scale:2.5", cs)
    assert math.isclose(phi_delta(U, None, 1.0, 1.0, 3).value, 2 * 2.5)
    assert phi_delta(U, [], 1.0, 1.0, 3).value == 0.0


def test_grid_chain_against_enumeration():
    X, Y, U = grid()
    rep = check_coarea_chain(U, None, 1.0, 1.0, 3.0, 3.0)
    assert rep.passed and rep.tlip == pytest.approx(1 / math.sqrt(0.75))
    # brute force: V^1 and Phi^{1,0} over all subfamilies
    cands = candidate_diamonds(X, 3.0)
    sets = [set(J.members) for J in cands]
    v1 = brute_force_cover(range(4), sets, [rho(1.0, J) for J in cands])
    phi = brute_force_cover(range(4), sets, [rho(1.0, U.image_diamond(J.p, J.q)) * rho(0.0, J) for J in cands])
    assert rep.v_s == v1 and rep.phi == phi
    # each fiber is a spacelike pair that no diamond of X contains whole
    assert rep.fibers == {"y0": 2.0, "y1": 2.0}
    # weight 2 on J(y0, y1), whose rho_1 is 1
    assert rep.integral == 2.0


def test_identity_t0_first_link_is_tight():
    cs = chain()
    rep = check_coarea_chain(CausalMap.identity(cs), None, 1.0, 0.0, 3.0, 3.0)
    assert rep.constant == 1.0 and rep.slack_i == 0.0 and rep.passed


def test_chain_rejects_bad_inputs():
    X, Y, U = grid()
    with pytest.raises(InputError):
        check_coarea_chain(U, None, 1.0, 2.0, 1.0, 1.0)
    with pytest.raises(InputError):
        check_coarea_chain(U, None, 1.0, 1.0, 2.0, 1.0)
    line = CausalSet.from_coords([[0, 0], [1, 1]])
    bad = CausalMap.from_rule("drop_time_to_line", line)
    with pytest.raises(InputError, match="Lipschitz"):
        check_coarea_chain(bad, None, 1.0, 1.0, 3.0, 3.0)


def test_coarea_constant():
    assert coarea_constant(2, 2, 3.0) == 9.0
    assert coarea_constant(1, 0, 5.0) == 1.0
    assert math.isclose(coarea_constant(2, 1, 1.0), 2.0)


def test_fiber_function_values():
    X, Y, U = grid()
    g, covers = fiber_function(U, None, 1.0, 3.0)
    # each fiber is a spacelike pair; cheapest cover uses J(p0,p2)/J(p0,p3)-type diamonds
    for y, v in g.items():
        fib = U.preimage(y)
        cands = candidate_diamonds(X, 3.0)
        assert v == brute_force_cover(fib, [set(J.members) for J in cands], [rho(1.0, J) for J in cands])
