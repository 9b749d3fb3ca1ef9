"""Weighted set cover over small universes.

Sets and the universe are Python ints used as bitsets. Costs are
nonnegative floats; ``inf``-cost sets are ignored.
"""

from __future__ import annotations

import math


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def greedy_cover(universe: int, sets, costs, keys=None):
    """Cheapest cost per newly covered element; ties by ``keys`` then index.

    Returns ``(cost, chosen)`` with ``cost = inf`` when some element cannot
    be covered.
    """
    keys = keys if keys is not None else [()] * len(sets)
    left = universe
    chosen = []
    total = 0.0
    while left:
        best = None
        for i, (s, c) in enumerate(zip(sets, costs)):
            gain = (s & left).bit_count()
            if gain == 0 or math.isinf(c):
                continue
            rank = (c / gain, keys[i], i)
            if best is None or rank < best[0]:
                best = (rank, i)
        if best is None:
            return math.inf, []
        i = best[1]
        chosen.append(i)
        total += costs[i]
        left &= ~sets[i]
    return total, chosen


def exact_cover(universe: int, sets, costs, keys=None):
    """Minimum-cost cover by depth-first branch and bound.

    Branches on the uncovered element with the fewest covering sets. The
    bound is the amortised one: each uncovered element is charged the
    smallest ``cost / (new elements covered)`` among sets containing it,
    which never exceeds the cost of completing the cover.
    """
    if universe == 0:
        return 0.0, []
    live = [i for i, (s, c) in enumerate(zip(sets, costs)) if s & universe and not math.isinf(c)]
    covering: dict[int, list[int]] = {}
    for e in _bits(universe):
        bit = 1 << e
        opts = [i for i in live if sets[i] & bit]
        if not opts:
            return math.inf, []
        covering[e] = sorted(opts, key=lambda i: (costs[i], i))

    best_cost, best_pick = greedy_cover(universe, sets, costs, keys)
    best = [best_cost, list(best_pick)]
    slack = 1e-12

    def bound(left):
        total = 0.0
        for e in _bits(left):
            total += min(costs[i] / (sets[i] & left).bit_count() for i in covering[e])
        return total

    def dfs(left, cost, picked):
        if not left:
            if cost < best[0]:
                best[0] = cost
                best[1] = list(picked)
            return
        if cost + bound(left) > best[0] * (1 + slack) + slack:
            return
        pivot = min(_bits(left), key=lambda e: (len(covering[e]), e))
        for i in covering[pivot]:
            c = cost + costs[i]
            if c > best[0] * (1 + slack) + slack:
                continue
            picked.append(i)
            dfs(left & ~sets[i], c, picked)
            picked.pop()

    dfs(universe, 0.0, [])
    return best[0], sorted(best[1])


def interval_cover(n: int, intervals, costs):
    """Cover elements ``0..n-1`` by closed integer intervals ``[lo, hi]``.

    Shortest-path dynamic program over the frontier ``f`` meaning elements
    ``< f`` are covered. Exact for interval-shaped sets.
    """
    if n == 0:
        return 0.0, []
    INF = math.inf
    dist = [INF] * (n + 1)
    back: list[tuple[int, int] | None] = [None] * (n + 1)
    dist[0] = 0.0
    by_lo: dict[int, list[int]] = {}
    for i, (lo, hi) in enumerate(intervals):
        if not math.isinf(costs[i]):
            by_lo.setdefault(lo, []).append(i)
    for f in range(n):
        if math.isinf(dist[f]):
            continue
        # any interval starting at or before the frontier and reaching it
        for lo in range(f + 1):
            for i in by_lo.get(lo, ()):
                hi = intervals[i][1]
                if hi < f:
                    continue
                nf = min(hi + 1, n)
                c = dist[f] + costs[i]
                if c < dist[nf]:
                    dist[nf] = c
                    back[nf] = (f, i)
    if math.isinf(dist[n]):
        return INF, []
    picks, f = [], n
    while f:
        prev, i = back[f]
        picks.append(i)
        f = prev
    return dist[n], sorted(picks)
