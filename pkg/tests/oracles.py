"""Independent reference computations used only by the tests.

Nothing here imports the solver code paths it is compared against.
"""

import itertools
import math

import numpy as np


def brute_force_cover(target, member_sets, costs):
    """Cheapest subfamily covering ``target`` by full subset enumeration."""
    target = set(target)
    if not target:
        return 0.0
    best = math.inf
    n = len(member_sets)
    for r in range(1, n + 1):
        for combo in itertools.combinations(range(n), r):
            covered = set().union(*(member_sets[i] for i in combo))
            if target <= covered:
                best = min(best, math.fsum(costs[i] for i in combo))
    return best


def lp_basis_enumeration(M, costs, demand):
    """Covering LP ``min c.a, M a >= f, a >= 0`` over all basic solutions (numpy)."""
    M = np.asarray(M, dtype=float)
    c = np.asarray(costs, dtype=float)
    f = np.asarray(demand, dtype=float)
    m, n = M.shape
    if not (f > 0).any():
        return 0.0
    best = math.inf
    for k in range(1, min(m, n) + 1):
        for B in itertools.combinations(range(n), k):
            for R in itertools.combinations(range(m), k):
                A = M[np.ix_(R, B)]
                if abs(np.linalg.det(A)) < 1e-12:
                    continue
                a_B = np.linalg.solve(A, f[list(R)])
                if (a_B < -1e-12).any():
                    continue
                a = np.zeros(n)
                a[list(B)] = a_B
                if (M @ a < f - 1e-9).any():
                    continue
                best = min(best, float(c @ a))
    return best


def minkowski_tau(p, q):
    """Direct formula, time coordinate first."""
    dt = q[0] - p[0]
    r2 = sum((b - a) ** 2 for a, b in zip(p[1:], q[1:]))
    return math.sqrt(dt * dt - r2) if dt > math.sqrt(r2) else 0.0


def sampled_diamond_diameter(p, q, rng, samples=400):
    """Largest pairwise distance among the vertices and sampled rim points."""
    p, q = np.asarray(p, float), np.asarray(q, float)
    n = p.size
    # points of J(p,q): rejection inside the bounding box
    T = q[0] - p[0]
    lo = np.concatenate([[p[0]], p[1:] - T])
    hi = np.concatenate([[q[0]], p[1:] + T])
    pts = [p, q]
    while len(pts) < samples:
        x = rng.uniform(lo, hi, size=(4 * samples, n))
        d1 = x - p
        d2 = q - x
        ok = (d1[:, 0] >= np.linalg.norm(d1[:, 1:], axis=1)) & (d2[:, 0] >= np.linalg.norm(d2[:, 1:], axis=1))
        pts.extend(x[ok][: samples - len(pts)])
    P = np.array(pts)
    D = np.sqrt(((P[:, None, :] - P[None, :, :]) ** 2).sum(-1))
    return float(D.max())
