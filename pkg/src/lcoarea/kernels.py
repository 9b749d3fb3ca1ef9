"""Hot loops over point tables.

Every kernel exists twice: a numba loop (``*_numba``) and a vectorised
numpy version (``*_numpy``). The unsuffixed name is bound to one of them
according to :data:`lcoarea._accel.USE_NUMBA`. Both versions return
identical results; the triple scan in particular reports the
lexicographically first witness in both.

Triple-check order in :func:`axiom_triple_scan`::

    0  le transitivity        x<=y, y<=z, not x<=z
    1  ll transitivity        x<<y, y<<z, not x<<z
    2  reverse triangle       x<=y<=z, tau(x,z) < tau(x,y) + tau(y,z)
    3  metric triangle        d(x,z) > d(x,y) + d(y,z)
"""

import numpy as np

from ._accel import USE_NUMBA, njit

N_TRIPLE_CHECKS = 4


# --------------------------------------------------------------------------
# Minkowski relations from coordinates (time first)
# --------------------------------------------------------------------------

@njit
def minkowski_relations_numba(coords):
    n, dim = coords.shape
    le = np.zeros((n, n), dtype=np.bool_)
    ll = np.zeros((n, n), dtype=np.bool_)
    tau = np.zeros((n, n), dtype=np.float64)
    for i in range(n):
        for j in range(n):
            dt = coords[j, 0] - coords[i, 0]
            r2 = 0.0
            for k in range(1, dim):
                d = coords[j, k] - coords[i, k]
                r2 += d * d
            r = np.sqrt(r2)
            if dt >= r:
                le[i, j] = True
                if dt > r:
                    ll[i, j] = True
                    tau[i, j] = np.sqrt((dt - r) * (dt + r))
    return le, ll, tau


def minkowski_relations_numpy(coords):
    coords = np.asarray(coords, dtype=np.float64)
    dt = coords[None, :, 0] - coords[:, None, 0]
    diff = coords[None, :, 1:] - coords[:, None, 1:]
    r2 = np.zeros_like(dt)
    for k in range(diff.shape[2]):
        r2 += diff[:, :, k] * diff[:, :, k]
    r = np.sqrt(r2)
    le = dt >= r
    ll = dt > r
    tau = np.zeros_like(dt)
    tau[ll] = np.sqrt((dt[ll] - r[ll]) * (dt[ll] + r[ll]))
    return le, ll, tau


# --------------------------------------------------------------------------
# Transitive closure (Warshall)
# --------------------------------------------------------------------------

@njit
def transitive_closure_numba(adj):
    n = adj.shape[0]
    out = adj.copy()
    for k in range(n):
        for i in range(n):
            if out[i, k]:
                for j in range(n):
                    if out[k, j]:
                        out[i, j] = True
    return out


def transitive_closure_numpy(adj):
    out = np.array(adj, dtype=bool, copy=True)
    for k in range(out.shape[0]):
        out |= np.outer(out[:, k], out[k, :])
    return out


# --------------------------------------------------------------------------
# All-sources longest paths in a DAG
# --------------------------------------------------------------------------

@njit
def longest_paths_numba(n, order, indptr, targets, weights):
    """``order`` is a topological order; edges of node u live in
    ``targets[indptr[u]:indptr[u+1]]``. Unreachable entries are -inf."""
    best = np.full((n, n), -np.inf)
    pos = np.empty(n, dtype=np.int64)
    for k in range(n):
        pos[order[k]] = k
    for s in range(n):
        best[s, s] = 0.0
        for k in range(pos[s], n):
            u = order[k]
            bu = best[s, u]
            if bu == -np.inf:
                continue
            for e in range(indptr[u], indptr[u + 1]):
                v = targets[e]
                cand = bu + weights[e]
                if cand > best[s, v]:
                    best[s, v] = cand
    return best


def longest_paths_numpy(n, order, indptr, targets, weights):
    best = np.full((n, n), -np.inf)
    np.fill_diagonal(best, 0.0)
    for u in order:
        col = best[:, u]
        live = col > -np.inf
        if not live.any():
            continue
        for e in range(indptr[u], indptr[u + 1]):
            v = targets[e]
            cand = np.where(live, col + weights[e], -np.inf)
            np.maximum(best[:, v], cand, out=best[:, v])
    return best


# --------------------------------------------------------------------------
# O(n^3) axiom scan
# --------------------------------------------------------------------------

@njit
def _rev_violated(lhs, rhs, tol):
    if rhs == np.inf:
        return lhs < np.inf
    return lhs < rhs - tol * max(1.0, rhs)


@njit
def axiom_triple_scan_numba(le, ll, tau, dist, tol):
    n = le.shape[0]
    wit = np.full((N_TRIPLE_CHECKS, 3), -1, dtype=np.int64)
    found = np.zeros(N_TRIPLE_CHECKS, dtype=np.bool_)
    for x in range(n):
        for y in range(n):
            lexy = le[x, y]
            llxy = ll[x, y]
            for z in range(n):
                if lexy and le[y, z]:
                    if not found[0] and not le[x, z]:
                        found[0] = True
                        wit[0, 0] = x; wit[0, 1] = y; wit[0, 2] = z
                    if not found[2] and _rev_violated(tau[x, z], tau[x, y] + tau[y, z], tol):
                        found[2] = True
                        wit[2, 0] = x; wit[2, 1] = y; wit[2, 2] = z
                if not found[1] and llxy and ll[y, z] and not ll[x, z]:
                    found[1] = True
                    wit[1, 0] = x; wit[1, 1] = y; wit[1, 2] = z
                if not found[3]:
                    s = dist[x, y] + dist[y, z]
                    if dist[x, z] > s + tol * max(1.0, s):
                        found[3] = True
                        wit[3, 0] = x; wit[3, 1] = y; wit[3, 2] = z
    return wit


def axiom_triple_scan_numpy(le, ll, tau, dist, tol):
    n = le.shape[0]
    wit = np.full((N_TRIPLE_CHECKS, 3), -1, dtype=np.int64)
    for x in range(n):
        chain = le[x, :, None] & le
        rhs = tau[x, :, None] + tau
        lhs = np.broadcast_to(tau[x, None, :], rhs.shape)
        finite = np.isfinite(rhs)
        slack = np.where(finite, tol * np.maximum(1.0, np.where(finite, rhs, 0.0)), 0.0)
        rev = np.where(finite, lhs < rhs - slack, lhs < np.inf)
        s = dist[x, :, None] + dist
        masks = (
            chain & ~le[x, None, :],
            ll[x, :, None] & ll & ~ll[x, None, :],
            chain & rev,
            dist[x, None, :] > s + tol * np.maximum(1.0, s),
        )
        for c, m in enumerate(masks):
            if wit[c, 0] < 0 and m.any():
                y, z = divmod(int(np.argmax(m)), n)
                wit[c] = (x, y, z)
        if (wit[:, 0] >= 0).all():
            break
    return wit


# --------------------------------------------------------------------------
# Diamond diameters over finite member sets
# --------------------------------------------------------------------------

@njit
def diamond_diameters_numba(le, dist, ps, qs):
    n = le.shape[0]
    out = np.zeros(ps.shape[0])
    buf = np.empty(n, dtype=np.int64)
    for k in range(ps.shape[0]):
        p = ps[k]
        q = qs[k]
        m = 0
        for x in range(n):
            if le[p, x] and le[x, q]:
                buf[m] = x
                m += 1
        best = 0.0
        for a in range(m):
            for b in range(a + 1, m):
                d = dist[buf[a], buf[b]]
                if d > best:
                    best = d
        out[k] = best
    return out


def diamond_diameters_numpy(le, dist, ps, qs):
    out = np.zeros(len(ps))
    for k, (p, q) in enumerate(zip(ps, qs)):
        m = np.flatnonzero(le[p] & le[:, q])
        if m.size > 1:
            out[k] = dist[np.ix_(m, m)].max()
    return out


if USE_NUMBA:
    minkowski_relations = minkowski_relations_numba
    transitive_closure = transitive_closure_numba
    longest_paths = longest_paths_numba
    axiom_triple_scan = axiom_triple_scan_numba
    diamond_diameters = diamond_diameters_numba
else:
    minkowski_relations = minkowski_relations_numpy
    transitive_closure = transitive_closure_numpy
    longest_paths = longest_paths_numpy
    axiom_triple_scan = axiom_triple_scan_numpy
    diamond_diameters = diamond_diameters_numpy
