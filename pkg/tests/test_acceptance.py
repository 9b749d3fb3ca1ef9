"""Acceptance criteria 1-8; each test records one PASS/FAIL line."""

import math
import time

import numpy as np
import pytest

from lcoarea import (CausalCurve, CausalSet, candidate_diamonds, cover_value_exact, minkowski_null_tiling,
                     omega, random_coarea_instance, rho, run_batch, strong_vs_causal_test, tau_length,
                     unit_diamond, v1_of_curve, verify_certificate, vitali_select,
                     weighted_causal_integral_delta)
from lcoarea.covering import random_family, sample_points
from lcoarea.harness import minkowski_volume_mc, run_coarea_instance, run_minkowski_volume_experiment
from lcoarea.measure import chronological_candidates

from oracles import brute_force_cover, lp_basis_enumeration

pytestmark = pytest.mark.acceptance


def _chain_coords(rng, n):
    t = np.cumsum(rng.uniform(0.2, 1.0, n))
    x = np.zeros(n)
    for k in range(1, n):
        x[k] = x[k - 1] + rng.uniform(-0.95, 0.95) * (t[k] - t[k - 1])
    return np.column_stack([t, x])


def test_criterion_1_omega_table(record_criterion):
    t0 = time.perf_counter()
    mc = {N: minkowski_volume_mc(N, 1_000_000, seed=N) for N in (2, 3, 4)}
    rel = {N: abs(mc[N] - omega(N)) / omega(N) for N in mc}
    closed = abs(omega(1) - 1.0) <= 1e-12 and abs(omega(2) - 0.5) <= 1e-12
    elapsed = time.perf_counter() - t0
    ok = all(r < 0.01 for r in rel.values()) and closed and elapsed < 30
    print(f"omega MC relative errors {rel}, {elapsed:.2f}s")
    record_criterion(1, "omega table vs Monte-Carlo diamond volume", ok)
    assert ok


def test_criterion_2_null_tiling(record_criterion):
    t0 = time.perf_counter()
    sched = [0.5, 0.1, 0.02]
    est = run_minkowski_volume_experiment(sched).estimate
    vals = list(est.values)
    fine = all(J.diam < d for d, sol in zip(sched, est.solutions) for _, J in sol.items)
    direct = minkowski_null_tiling(unit_diamond(1), 60, 2.0, 0.02).cost
    ok = (all(abs(v - 0.5) <= 1e-12 for v in vals) and fine and abs(direct - 0.5) <= 1e-12
          and time.perf_counter() - t0 < 5)
    print(f"null tiling values {vals}")
    record_criterion(2, "null-tiling cover of unit diamond equals 0.5", ok)
    assert ok


def test_criterion_3_curve_measure(record_criterion):
    t0 = time.perf_counter()
    bad = []
    for n in range(5, 51):
        g = CausalCurve([[3.0 * k / (n - 1), 0.0] for k in range(n)])
        v, L = v1_of_curve(g, 1.0).cost, tau_length(g).value
        if abs(v - L) > 1e-9:
            bad.append(("straight", n, v, L))
    rng = np.random.default_rng(2024)
    for k in range(100):
        n = int(rng.integers(3, 12))
        pts = _chain_coords(rng, n)
        gap = max(float(np.linalg.norm(b - a)) for a, b in zip(pts, pts[1:]))
        delta = gap * float(rng.uniform(1.0, 3.0)) + 1e-9
        if k % 2:
            g = CausalCurve(pts)
        else:
            g = CausalCurve(list(range(n)), CausalSet.from_coords(pts))
        v, L = v1_of_curve(g, delta).cost, tau_length(g).value
        if v > L + 1e-9:
            bad.append(("random", k, v, L))
    ok = not bad and time.perf_counter() - t0 < 60
    print(f"curve failures {bad}")
    record_criterion(3, "v1 of curves vs tau-length", ok)
    assert ok


def _coarea_case(seed):
    inst = random_coarea_instance(seed, max_x=10, max_y=4, ecc_max=3.0)
    rep = run_coarea_instance(inst.X, inst.Y, inst.U, inst.s, inst.t, inst.delta, inst.delta0)
    c = rep.chain
    # cross-check V^s with subset enumeration when the family is small
    cands = candidate_diamonds(inst.X, inst.delta)
    if len(cands) <= 15:
        want = brute_force_cover(range(inst.X.n), [set(J.members) for J in cands],
                                 [rho(inst.s, J) for J in cands])
        same = c.v_s == want or math.isclose(c.v_s, want, rel_tol=1e-12)
    else:
        same = True
    return seed, c.slack_i, c.slack_ii, c.slack_total, same


def test_criterion_4_coarea_chain(record_criterion):
    t0 = time.perf_counter()
    rows = run_batch(_coarea_case, range(100))
    bad = [r for r in rows if min(r[1:4]) < -1e-9 or not r[4]]
    ok = not bad and time.perf_counter() - t0 < 600
    print(f"coarea chain: {len(rows)} instances, violations {bad}, "
          f"min slacks {min(r[1] for r in rows):.3g} {min(r[2] for r in rows):.3g} {min(r[3] for r in rows):.3g}")
    record_criterion(4, "fixed-scale coarea chain on 100 random instances", ok)
    assert ok


def test_criterion_5_vitali(record_criterion):
    t0 = time.perf_counter()
    failures = {}
    for seed in range(20):
        rng = np.random.default_rng(seed)
        E = sample_points(rng, unit_diamond(1), 25)
        fam = random_family(rng, E, 50, 3.0)
        cert = vitali_select(E, fam)
        checks = verify_certificate(cert, E, rng, 10_000)
        if any(checks.values()):
            failures[seed] = checks
    ok = not failures and time.perf_counter() - t0 < 120
    print(f"vitali failures {failures}")
    record_criterion(5, "disjoint selection certificates on 20 families", ok)
    assert ok


def test_criterion_6_strong_vs_causal(record_criterion):
    t0 = time.perf_counter()
    bad = []
    # lower bound on random finite sets
    for seed in range(40):
        rng = np.random.default_rng(seed)
        cs = CausalSet.from_coords(unit_diamond(1).sample(rng, 7))
        for s in (1.0, 2.0):
            V = cover_value_exact(cs, None, candidate_diamonds(cs, 0.8), s).cost
            M = cover_value_exact(cs, None, chronological_candidates(cs, 0.8), s).cost
            if not M >= V - 1e-12:
                bad.append(("lower", seed, s, M, V))
    # upper bound on embedded chains with ambient pushed vertices
    rng = np.random.default_rng(6)
    chains = [CausalSet.from_coords([[0, 0], [1, 0], [2, 0]])]
    chains += [CausalSet.from_coords(_chain_coords(rng, int(rng.integers(3, 6)))) for _ in range(9)]
    for k, cs in enumerate(chains):
        delta = 2.0 * max(cs.dist.max(), 1e-9)
        for s in (1.0, 2.0):
            for eps in (1.1, 1.5, 2.0):
                r = strong_vs_causal_test(cs, None, delta, s, eps)
                if not (r.lower_holds and r.upper_holds):
                    bad.append(("upper", k, s, eps, r.to_dict()))
    ok = not bad and time.perf_counter() - t0 < 60
    print(f"strong-vs-causal failures {bad}")
    record_criterion(6, "chronological vs causal cover bounds", ok)
    assert ok


def test_criterion_7_oracles(record_criterion):
    t0 = time.perf_counter()
    bad = []
    for seed in range(200):
        rng = np.random.default_rng(seed)
        cs = CausalSet.from_coords(unit_diamond(1).sample(rng, int(rng.integers(3, 9))))
        cands = candidate_diamonds(cs, float(rng.uniform(0.4, 1.2)))
        if len(cands) > 15:
            cands = [cands[i] for i in sorted(rng.choice(len(cands), 15, replace=False))]
        s = float(rng.choice([0.0, 1.0, 2.0, 3.0]))
        got = cover_value_exact(cs, None, cands, s).cost
        want = brute_force_cover(range(cs.n), [set(J.members) for J in cands], [rho(s, J) for J in cands])
        if not (got == want or math.isclose(got, want, rel_tol=1e-12)):
            bad.append(("cover", seed, got, want))
        # weighted integral on at most 5 constraints
        sub = CausalSet.from_coords(unit_diamond(1).sample(rng, int(rng.integers(2, 6))))
        f = {i: float(rng.uniform(0, 2)) for i in range(sub.n)}
        delta = float(rng.uniform(0.5, 1.5))
        res = weighted_causal_integral_delta(sub, f, 1.0, delta)
        cl = candidate_diamonds(sub, delta, closed=True)
        M = [[int(x in J.members) for J in cl] for x in range(sub.n)]
        ref = lp_basis_enumeration(M, [rho(1.0, J) for J in cl], [f[x] for x in range(sub.n)]) if cl else math.inf
        if not (res.value == ref or abs(res.value - ref) <= 1e-9):
            bad.append(("lp", seed, res.value, ref))
    ok = not bad and time.perf_counter() - t0 < 120
    print(f"oracle mismatches {bad}")
    record_criterion(7, "exact cover and LP against exhaustive oracles", ok)
    assert ok


def test_criterion_8_scaling(record_criterion):
    bad = []
    for lam in (0.5, 2.0, 10.0):
        for s in (1, 2, 3):
            for seed in range(5):
                rng = np.random.default_rng(100 * seed + s)
                pts = unit_diamond(1).sample(rng, 9)
                a, b = CausalSet.from_coords(pts), CausalSet.from_coords(lam * pts)
                va = cover_value_exact(a, None, candidate_diamonds(a, 0.7), s).cost
                vb = cover_value_exact(b, None, candidate_diamonds(b, 0.7 * lam), s).cost
                if not (math.isinf(va) and math.isinf(vb)) and not math.isclose(vb, lam ** s * va, rel_tol=1e-9):
                    bad.append((lam, s, seed, va, vb))
    ok = not bad
    print(f"scaling mismatches {bad}")
    record_criterion(8, "cover costs scale as lambda**s", ok)
    assert ok
