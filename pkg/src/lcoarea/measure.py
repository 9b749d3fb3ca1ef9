"""Lorentzian Hausdorff pre-measures as covering problems.

At a fixed scale ``delta`` the pre-measure of a finite target is the
cheapest cover of the target by causal diamonds of diameter ``< delta``,
each costing ``omega_s * tau**s``. Finite covers suffice for finite targets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import kernels
from ._setcover import exact_cover, greedy_cover, interval_cover
from .backends import CausalSet, MinkowskiDiamond, MinkowskiSpace
from .errors import InputError, InvariantError, SizeError, UnsupportedError
from .space import CausalDiamond

EXACT_TARGET_LIMIT = 20
EXACT_CANDIDATE_LIMIT = 200


def omega(N: float) -> float:
    """Normalising constant so that ``omega(N) * tau**N`` is the volume of a
    Minkowski diamond of time separation ``tau`` in dimension ``N``.

    ``omega(0)`` is 1 by convention.
    """
    N = float(N)
    if N < 0 or math.isnan(N):
        raise InputError(f"omega needs N >= 0, got {N}")
    if N == 0:
        return 1.0
    if N.is_integer() and N <= 100:
        n = int(N)
        m = n // 2
        if n % 2:  # Gamma(m + 1) = m!
            return math.pi ** m * float(Fraction(1, n * math.factorial(m) * 2 ** (n - 1)))
        # Gamma(m + 1/2) = (2m)! sqrt(pi) / (4^m m!), the sqrt(pi) cancels
        return math.pi ** (m - 1) * float(Fraction(4 ** m * math.factorial(m),
                                                    n * math.factorial(2 * m) * 2 ** (n - 1)))
    if N <= 100:
        return math.pi ** (0.5 * (N - 1)) / (N * math.gamma(0.5 * (N + 1)) * 2.0 ** (N - 1))
    log = (0.5 * (N - 1)) * math.log(math.pi) - math.log(N) - math.lgamma(0.5 * (N + 1)) - (N - 1) * math.log(2.0)
    return math.exp(log)


def rho_value(s: float, tau: float, empty: bool = False) -> float:
    """``omega_s * tau**s`` with ``0**0 = 1``; 0 for the empty set."""
    if empty:
        return 0.0
    if math.isinf(tau):
        return math.inf
    if s == 0:
        return 1.0
    return omega(s) * tau ** s


def rho(s: float, J) -> float:
    """Content of a diamond (finite, analytic, or ``None`` for the empty set)."""
    if J is None:
        return 0.0
    return rho_value(s, J.tau, J.empty)


# --------------------------------------------------------------------------
# Candidates
# --------------------------------------------------------------------------

def candidate_diamonds(space: CausalSet, delta: float, pool=None, require_timelike: bool = False,
                       closed: bool = False) -> list[CausalDiamond]:
    """All ``J(p,q)`` with ``p < q`` from ``pool`` and small diameter.

    ``closed=False`` keeps ``diam < delta``; ``closed=True`` keeps
    ``diam <= delta`` (the weighted-cover convention).
    """
    idx = np.asarray(space.resolve_all(pool), dtype=np.int64)
    rel = space.ll if require_timelike else space.le
    sub = rel[np.ix_(idx, idx)]
    np.fill_diagonal(sub, False)
    a, b = np.nonzero(sub)
    ps, qs = idx[a], idx[b]
    if ps.size == 0:
        return []
    diams = kernels.diamond_diameters(np.ascontiguousarray(space.le), np.ascontiguousarray(space.dist),
                                      np.ascontiguousarray(ps), np.ascontiguousarray(qs))
    keep = diams <= delta if closed else diams < delta
    out = []
    for p, q, d in zip(ps[keep], qs[keep], diams[keep]):
        p, q = int(p), int(q)
        m = space.members(p, q)
        out.append(CausalDiamond(p, q, float(space.tau[p, q]), float(d),
                                 tuple(int(i) for i in m), (space.ids[p], space.ids[q])))
    return out


def chronological_candidates(space: CausalSet, delta: float, pool=None) -> list[CausalDiamond]:
    """``I(p,q)`` with ``p << q`` from ``pool``, non-empty, closure diam ``< delta``."""
    out = []
    for J in candidate_diamonds(space, delta, pool, require_timelike=True):
        m = space.members(J.p, J.q, chronological=True)
        if m.size:
            out.append(CausalDiamond(J.p, J.q, J.tau, J.diam, tuple(int(i) for i in m),
                                     J.label, chronological=True))
    return out


# --------------------------------------------------------------------------
# Cover solutions
# --------------------------------------------------------------------------

@dataclass
class CoverSolution:
    items: list = field(default_factory=list)
    cost: float = 0.0
    delta: float = math.inf
    s: float = 0.0
    certificate: str = "exact"
    target: tuple = ()

    @property
    def diamonds(self):
        return [J for _, J in self.items]

    @property
    def finite(self) -> bool:
        return math.isfinite(self.cost)

    def to_dict(self) -> dict:
        return {
            "cost": self.cost if math.isfinite(self.cost) else "inf",
            "delta": self.delta if math.isfinite(self.delta) else "inf",
            "s": self.s,
            "certificate": self.certificate,
            "target": list(self.target),
            "items": [
                {"weight": w if math.isfinite(w) else "inf", "diamond": J.to_dict()}
                for w, J in self.items
            ],
        }


def _target_mask(target, candidates):
    pos = {x: k for k, x in enumerate(target)}
    sets = []
    for J in candidates:
        m = 0
        for x in J.members:
            k = pos.get(x)
            if k is not None:
                m |= 1 << k
        sets.append(m)
    return (1 << len(target)) - 1, sets


def _key(J):
    return (J.diam, J.label)


def solve_cover(space: CausalSet, target, candidates, costs, method: str = "exact",
                exact_limit: int = EXACT_TARGET_LIMIT, candidate_limit: int = EXACT_CANDIDATE_LIMIT):
    """Cover ``target`` by ``candidates`` with arbitrary per-candidate costs.

    Returns ``(cost, chosen candidate indices)``.
    """
    target = sorted(set(space.resolve_all(target)))
    universe, sets = _target_mask(target, candidates)
    keys = [_key(J) for J in candidates]
    if method == "greedy":
        return greedy_cover(universe, sets, costs, keys)
    if method != "exact":
        raise InputError(f"unknown cover method {method!r}")
    useful = sum(1 for s in sets if s)
    if len(target) > exact_limit or useful > candidate_limit:
        raise SizeError(
            f"exact cover limited to {exact_limit} targets / {candidate_limit} candidates "
            f"(got {len(target)} / {useful}); use method='greedy'")
    return exact_cover(universe, sets, costs, keys)


def _solution(space, target, candidates, costs, picks, cost, delta, s, certificate):
    items = [(1.0, candidates[i]) for i in picks]
    return CoverSolution(items, cost, delta, s, certificate, tuple(space.ids[x] for x in sorted(target)))


def cover_value_exact(space: CausalSet, target, candidates, s: float, delta: float = math.inf,
                      exact_limit: int = EXACT_TARGET_LIMIT,
                      candidate_limit: int = EXACT_CANDIDATE_LIMIT) -> CoverSolution:
    """Minimum of ``sum rho_s(J_i)`` over subfamilies covering ``target``."""
    target = space.resolve_all(target)
    costs = [rho(s, J) for J in candidates]
    cost, picks = solve_cover(space, target, candidates, costs, "exact", exact_limit, candidate_limit)
    return _solution(space, target, candidates, costs, picks, cost, delta, s, "exact")


def cover_value_greedy(space: CausalSet, target, candidates, s: float, delta: float = math.inf) -> CoverSolution:
    """Greedy upper bound for :func:`cover_value_exact`."""
    target = space.resolve_all(target)
    costs = [rho(s, J) for J in candidates]
    cost, picks = solve_cover(space, target, candidates, costs, "greedy")
    return _solution(space, target, candidates, costs, picks, cost, delta, s, "greedy")


def cover_value_intervals(space: CausalSet, target_order, candidates, s: float,
                          delta: float = math.inf) -> CoverSolution:
    """Exact cover when every candidate meets the ordered target in a run.

    Raises :class:`UnsupportedError` if some candidate is not a contiguous
    run of ``target_order``.
    """
    order = space.resolve_all(target_order)
    pos = {x: k for k, x in enumerate(order)}
    intervals, costs, keep = [], [], []
    for i, J in enumerate(candidates):
        hit = sorted(pos[x] for x in J.members if x in pos)
        if not hit:
            continue
        if hit[-1] - hit[0] + 1 != len(hit):
            raise UnsupportedError(f"candidate {J.label} is not an interval of the target order")
        intervals.append((hit[0], hit[-1]))
        costs.append(rho(s, J))
        keep.append(i)
    cost, picks = interval_cover(len(order), intervals, costs)
    items = [(1.0, candidates[keep[i]]) for i in picks]
    return CoverSolution(items, cost, delta, s, "exact", tuple(space.ids[x] for x in order))


# --------------------------------------------------------------------------
# Pre-measure estimates over a delta schedule
# --------------------------------------------------------------------------

@dataclass
class MeasureEstimate:
    s: float
    delta_schedule: list
    values: list
    limit_flag: str
    tolerance: float
    solutions: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "s": self.s,
            "delta_schedule": list(self.delta_schedule),
            "values": [v if math.isfinite(v) else "inf" for v in self.values],
            "limit_flag": self.limit_flag,
            "tolerance": self.tolerance,
            "solutions": [sol.to_dict() for sol in self.solutions],
        }


def _limit_flag(values, tol):
    if len(values) >= 2:
        a, b = values[-2], values[-1]
        if a == b or (math.isfinite(a) and math.isfinite(b) and abs(a - b) <= tol):
            return "converged"
    return "not_converged"


def estimate_measure(space, target, s: float, delta_schedule, method: str = "exact", pool=None,
                     tolerance: float = 1e-9) -> MeasureEstimate:
    """Cover values along a strictly decreasing ``delta`` schedule.

    ``method`` is ``exact`` or ``greedy`` on finite spaces and ``structured``
    (null tiling) for a diamond target in 1+1 Minkowski space. Values must
    be non-decreasing as ``delta`` shrinks; for greedy covers each value is
    capped by the value found at the next finer scale, which is also an
    admissible cover at the coarser one.
    """
    sched = [float(d) for d in delta_schedule]
    if not sched or any(not d > 0 for d in sched) or any(b >= a for a, b in zip(sched, sched[1:])):
        raise InputError("delta schedule must be positive and strictly decreasing")

    if isinstance(space, MinkowskiSpace) or method == "structured":
        if not isinstance(target, MinkowskiDiamond):
            raise InputError("structured estimates need a MinkowskiDiamond target")
        sols = [structured_cover(target, d, s) for d in sched]
    else:
        tgt = space.resolve_all(target)
        sols = []
        for d in sched:
            cands = candidate_diamonds(space, d, pool)
            if method == "exact":
                sols.append(cover_value_exact(space, tgt, cands, s, d))
            elif method == "greedy":
                sols.append(cover_value_greedy(space, tgt, cands, s, d))
            else:
                raise InputError(f"unknown method {method!r}")
        if method == "greedy":
            for k in range(len(sols) - 2, -1, -1):
                if sols[k + 1].cost < sols[k].cost:
                    finer = sols[k + 1]
                    sols[k] = CoverSolution(list(finer.items), finer.cost, sched[k], s, "greedy", finer.target)

    values = [sol.cost for sol in sols]
    for a, b in zip(values, values[1:]):
        if b < a - tolerance * max(1.0, abs(a)):
            raise InvariantError(f"pre-measure decreased as delta shrank: {values}")
    return MeasureEstimate(s, sched, values, _limit_flag(values, tolerance), tolerance, sols)


# --------------------------------------------------------------------------
# Structured covers in 1+1 Minkowski space
# --------------------------------------------------------------------------

def minkowski_null_tiling(J: MinkowskiDiamond, k: int, s: float = 2.0, delta: float = math.inf) -> CoverSolution:
    """Tile a 1+1 diamond into ``k*k`` sub-diamonds along null directions.

    In null coordinates the diamond is an axis-aligned rectangle; each tile
    is again a diamond with ``tau / k`` and diameter ``diam / k``.
    """
    if J.dim != 2:
        raise UnsupportedError("null tiling is defined for 1+1 dimensions only")
    if not J.timelike:
        raise UnsupportedError("null tiling needs p << q")
    k = int(k)
    if k < 1:
        raise InputError("k must be >= 1")
    u0, u1, v0, v1 = J.null_box()
    us = np.linspace(u0, u1, k + 1)
    vs = np.linspace(v0, v1, k + 1)
    items = []
    for i in range(k):
        for j in range(k):
            p = (0.5 * (us[i] + vs[j]), 0.5 * (vs[j] - us[i]))
            q = (0.5 * (us[i + 1] + vs[j + 1]), 0.5 * (vs[j + 1] - us[i + 1]))
            items.append((1.0, MinkowskiDiamond(p, q)))
    # every tile has tau = tau(J)/k; k*k*omega_s*(tau/k)**s in closed form
    cost = rho_value(s, J.tau) * float(k) ** (2 - s) if s != 0 else float(k * k)
    return CoverSolution(items, cost, delta, s, "structured", ())


def structured_cover(J: MinkowskiDiamond, delta: float, s: float = 2.0) -> CoverSolution:
    """Coarsest null tiling whose tiles have diameter ``< delta``."""
    k = int(math.floor(J.diam / delta)) + 1
    while J.diam / k >= delta:
        k += 1
    return minkowski_null_tiling(J, k, s, delta)


# --------------------------------------------------------------------------
# Strong (chronological) pre-measure
# --------------------------------------------------------------------------

def strong_measure_value(space: CausalSet, target, delta: float, pool=None, s: float = 1.0,
                         exact_limit: int = EXACT_TARGET_LIMIT,
                         candidate_limit: int = EXACT_CANDIDATE_LIMIT) -> CoverSolution:
    """Cheapest cover of ``target`` by chronological diamonds ``I(p,q)``.

    Membership uses ``<<``; the diameter of ``I(p,q)`` is that of its
    closure ``J(p,q)`` and must be ``< delta``.
    """
    target = space.resolve_all(target)
    cands = chronological_candidates(space, delta, pool)
    return cover_value_exact(space, target, cands, s, delta, exact_limit, candidate_limit)
