"""Causal curves, their tau-length and one-dimensional measure; causal maps.

A :class:`CausalCurve` is an ordered list of causally related samples,
given either as coordinates in Minkowski space (interpolated linearly
between samples) or as indices of a finite causal set. A
:class:`CausalMap` sends the points of one finite space to another, either
through a table or one of the named coordinate rules ``scale:<lam>``,
``pad_zero`` and ``drop_time_to_line``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .backends import CausalSet, minkowski_tau
from .errors import InputError, UnsupportedError
from .measure import CoverSolution, candidate_diamonds, cover_value_intervals, rho
from .space import CausalDiamond

# --------------------------------------------------------------------------
# Curves
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class CausalCurve:
    """Future-directed causal curve through ``samples``.

    With ``space`` set, ``samples`` are point indices/ids of that finite
    space; otherwise they are Minkowski coordinate rows.
    """

    samples: tuple
    space: CausalSet | None = None

    def __post_init__(self):
        if self.space is None:
            pts = np.atleast_2d(np.asarray(self.samples, dtype=float))
            if pts.shape[0] < 1:
                raise InputError("a curve needs at least one sample")
            for k in range(len(pts) - 1):
                d = pts[k + 1] - pts[k]
                if d[0] < np.linalg.norm(d[1:]):
                    raise InputError(f"samples {k} and {k + 1} are not causally related")
            object.__setattr__(self, "samples", tuple(tuple(r) for r in pts))
        else:
            idx = tuple(self.space.resolve_all(self.samples))
            if not idx:
                raise InputError("a curve needs at least one sample")
            for a, b in zip(idx, idx[1:]):
                if not self.space.le[a, b]:
                    raise InputError(f"samples {self.space.ids[a]} and {self.space.ids[b]} "
                                     "are not causally related")
            object.__setattr__(self, "samples", idx)

    def __len__(self):
        return len(self.samples)

    def tau(self, i: int, j: int) -> float:
        if self.space is None:
            return minkowski_tau(self.samples[i], self.samples[j])
        return float(self.space.tau[self.samples[i], self.samples[j]])

    def as_causal_set(self) -> tuple[CausalSet, list[int]]:
        """Finite space holding the samples, plus their indices in it."""
        if self.space is not None:
            return self.space, list(self.samples)
        cs = CausalSet.from_coords(np.asarray(self.samples), [f"g{i}" for i in range(len(self))])
        return cs, list(range(len(self)))


@dataclass(frozen=True)
class TauLength:
    value: float
    per_level: tuple[float, ...]


def _dp_min_chain(n, tau_fn):
    """Smallest sum of tau over sub-chains from sample 0 to sample n-1."""
    best = [math.inf] * n
    best[0] = 0.0
    for j in range(1, n):
        best[j] = min(best[i] + tau_fn(i, j) for i in range(j))
    return best[-1]


def tau_length(curve: CausalCurve, refinement_levels: int = 4) -> TauLength:
    """Tau-length over partitions anchored at the curve samples.

    Minkowski curves: level ``k`` splits every sample segment into ``2**k``
    equal pieces. Discrete curves: level ``k`` keeps every ``2**(K-k)``-th
    sample (plus the last), and the returned value is the exact minimum
    over all sub-chains through both endpoints.
    """
    n = len(curve)
    if n == 1:
        return TauLength(0.0, (0.0,))
    if refinement_levels < 0:
        raise InputError("refinement_levels must be >= 0")
    levels = []
    if curve.space is None:
        pts = np.asarray(curve.samples)
        for k in range(refinement_levels + 1):
            m = 2 ** k
            total = []
            for a, b in zip(pts[:-1], pts[1:]):
                grid = a + np.linspace(0.0, 1.0, m + 1)[:, None] * (b - a)
                total.extend(minkowski_tau(grid[i], grid[i + 1]) for i in range(m))
            levels.append(math.fsum(total))
        return TauLength(min(levels), tuple(levels))
    K = max(0, math.ceil(math.log2(n - 1))) if n > 2 else 0
    for k in range(K + 1):
        step = 2 ** (K - k)
        idx = list(range(0, n - 1, step)) + [n - 1]
        levels.append(math.fsum(curve.tau(i, j) for i, j in zip(idx, idx[1:])))
    value = min(min(levels), _dp_min_chain(n, curve.tau))
    return TauLength(value, tuple(levels))


def v1_of_curve(curve: CausalCurve, delta: float, vertex_pool=None) -> CoverSolution:
    """One-dimensional cover value of the curve image at scale ``delta``.

    The image is the union of the sample segments. A diamond ``J(g_i, g_j)``
    covers segment ``k`` exactly when it contains both endpoints of the
    segment (diamonds are causally convex). Candidates come from the
    curve's sample pairs unless ``vertex_pool`` is given. A single-sample
    curve is a point that no diamond ``J(p,q)`` with ``p < q`` reaches here,
    so its value is ``inf``.
    """
    space, idx = curve.as_causal_set()
    pool = idx if vertex_pool is None else vertex_pool
    cands = candidate_diamonds(space, delta, pool)
    n = len(idx)
    if n == 1:
        covering = [J for J in cands if idx[0] in J.members]
        if not covering:
            return CoverSolution([], math.inf, delta, 1.0, "exact", (space.ids[idx[0]],))
        best = min(covering, key=lambda J: (rho(1.0, J), J.label))
        return CoverSolution([(1.0, best)], rho(1.0, best), delta, 1.0, "exact", (space.ids[idx[0]],))
    # segments become the target; segment k is "inside" J when both ends are
    seg_space = _SegmentView(space, idx)
    seg_cands = []
    for J in cands:
        mem = set(J.members)
        segs = tuple(k for k in range(n - 1) if idx[k] in mem and idx[k + 1] in mem)
        seg_cands.append(CausalDiamond(J.p, J.q, J.tau, J.diam, segs, J.label))
    sol = cover_value_intervals(seg_space, list(range(n - 1)), seg_cands, 1.0, delta)
    originals = {J.label: J for J in cands}
    items = [(w, originals[J.label]) for w, J in sol.items]
    return CoverSolution(items, sol.cost, delta, 1.0, "exact", tuple(space.ids[i] for i in idx))


class _SegmentView:
    """Minimal stand-in exposing segment indices as a universe."""

    def __init__(self, space, idx):
        self.ids = tuple(f"{space.ids[a]}-{space.ids[b]}" for a, b in zip(idx, idx[1:]))

    def resolve_all(self, xs):
        return list(xs)


# --------------------------------------------------------------------------
# Causal maps
# --------------------------------------------------------------------------


def _rule_image(rule: str, coords: np.ndarray) -> np.ndarray:
    if rule.startswith("scale:"):
        try:
            lam = float(rule.split(":", 1)[1])
        except ValueError:
            raise InputError(f"bad scale rule {rule!r}") from None
        if not lam > 0:
            raise InputError("scale factor must be positive")
        return lam * coords
    if rule == "pad_zero":
        return np.hstack([coords, np.zeros((coords.shape[0], 1))])
    if rule == "drop_time_to_line":
        return coords[:, :1].copy()
    raise InputError(f"unknown map rule {rule!r}")


@dataclass
class CausalMap:
    """Map between finite spaces given by ``table[i] = index in Y``."""

    X: CausalSet
    Y: CausalSet
    table: tuple[int, ...]
    rule: str | None = None
    eta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.table = tuple(int(j) for j in self.table)
        if len(self.table) != self.X.n:
            raise InputError("map table must cover every point of X")
        if any(not 0 <= j < self.Y.n for j in self.table):
            raise InputError("map table points outside Y")

    def __call__(self, i: int) -> int:
        return self.table[i]

    @classmethod
    def from_table(cls, X: CausalSet, Y: CausalSet, mapping) -> CausalMap:
        """``mapping`` is a dict id -> id or a sequence of Y refs."""
        if isinstance(mapping, dict):
            table = [None] * X.n
            for k, v in mapping.items():
                table[X.resolve(k)] = Y.resolve(v)
            if any(t is None for t in table):
                raise InputError("map table misses points of X")
        else:
            table = [Y.resolve(v) for v in mapping]
        return cls(X, Y, tuple(table))

    @classmethod
    def from_rule(cls, rule: str, X: CausalSet) -> CausalMap:
        """Apply a coordinate rule; ``Y`` is the induced set of image points."""
        if X.coords is None:
            raise UnsupportedError("coordinate rules need a coordinate-induced X")
        img = _rule_image(rule, np.asarray(X.coords))
        uniq, inverse = np.unique(img, axis=0, return_inverse=True)
        order = np.lexsort(uniq.T[::-1])
        uniq = uniq[order]
        rank = np.empty_like(order)
        rank[order] = np.arange(len(order))
        Y = CausalSet.from_coords(uniq, [f"y{i}" for i in range(len(uniq))])
        return cls(X, Y, tuple(int(rank[k]) for k in np.ravel(inverse)), rule)

    @classmethod
    def identity(cls, X: CausalSet) -> CausalMap:
        return cls(X, X, tuple(range(X.n)), "identity")

    def compose(self, other: CausalMap) -> CausalMap:
        """``self`` after ``other``."""
        if other.Y is not self.X:
            raise InputError("maps are not composable")
        return CausalMap(other.X, self.Y, tuple(self.table[j] for j in other.table))

    def preimage(self, y: int, E=None) -> list[int]:
        pts = range(self.X.n) if E is None else E
        return [x for x in pts if self.table[x] == y]

    def image_diamond(self, a: int, b: int) -> CausalDiamond | None:
        """``J(U a, U b)`` in ``Y``, ``None`` when empty."""
        ua, ub = self.table[a], self.table[b]
        if not self.Y.le[ua, ub]:
            return None
        return self.Y.diamond(ua, ub)

    def to_dict(self) -> dict:
        if self.rule and self.rule != "identity":
            return {"rule": self.rule}
        return {"table": {self.X.ids[i]: self.Y.ids[j] for i, j in enumerate(self.table)}}


@dataclass(frozen=True)
class TLipVerdict:
    lipschitz: bool
    value: float
    witness: tuple = ()
    mode: str = "exact_enumeration"

    def to_dict(self) -> dict:
        return {
            "timelike_lipschitz": self.lipschitz,
            "tlip": self.value if math.isfinite(self.value) else "inf",
            "witness": list(self.witness),
            "mode": self.mode,
        }


_ANALYTIC = {"pad_zero": 1.0, "identity": 1.0}


def tlip_estimate(U: CausalMap, mode: str = "exact_enumeration", samples: int = 2000,
                  seed: int = 0) -> TLipVerdict:
    """Timelike Lipschitz constant ``sup tau_Y(Up,Uq) / tau_X(p,q)``.

    A causal pair with ``tau_X = 0`` but ``tau_Y > 0`` makes the map not
    timelike Lipschitz; this is returned as a verdict, not raised.
    """
    X, Y, T = U.X, U.Y, np.asarray(U.table)
    if mode == "analytic":
        rule = U.rule or ""
        if rule.startswith("scale:"):
            return TLipVerdict(True, float(rule.split(":", 1)[1]), (), mode)
        if rule in _ANALYTIC:
            return TLipVerdict(True, _ANALYTIC[rule], (), mode)
        if rule == "drop_time_to_line":
            return TLipVerdict(False, math.inf, ((0.0, 0.0), (1.0, 1.0)), mode)
        raise UnsupportedError(f"no analytic constant for rule {rule!r}")
    if mode == "exact_enumeration":
        a, b = np.nonzero(X.le & ~np.eye(X.n, dtype=bool))
    elif mode == "sampled":
        rng = np.random.default_rng(seed)
        a = rng.integers(0, X.n, samples)
        b = rng.integers(0, X.n, samples)
        keep = X.le[a, b] & (a != b)
        a, b = a[keep], b[keep]
    else:
        raise InputError(f"unknown mode {mode!r}")
    tx = X.tau[a, b]
    ty = Y.tau[T[a], T[b]]
    bad = (tx == 0) & (ty > 0)
    if bad.any():
        k = int(np.argmax(bad))
        return TLipVerdict(False, math.inf, (X.ids[a[k]], X.ids[b[k]]), mode)
    pos = tx > 0
    if not pos.any():
        return TLipVerdict(True, 0.0, (), mode)
    ratio = ty[pos] / tx[pos]
    k = int(np.argmax(ratio))
    return TLipVerdict(True, float(ratio[k]), (X.ids[a[pos][k]], X.ids[b[pos][k]]), mode)


def _pair_diams(space: CausalSet):
    """``diam J(p,q)`` for all causal pairs ``p != q``."""
    from . import kernels
    a, b = np.nonzero(space.le & ~np.eye(space.n, dtype=bool))
    d = kernels.diamond_diameters(np.ascontiguousarray(space.le), np.ascontiguousarray(space.dist),
                                  np.ascontiguousarray(a.astype(np.int64)),
                                  np.ascontiguousarray(b.astype(np.int64)))
    return a, b, d


def controlling_modulus(U: CausalMap, delta_grid) -> dict[float, float]:
    """``eta(delta) = max diam_Y J(Up,Uq)`` over ``diam_X J(p,q) < delta``."""
    a, b, dx = _pair_diams(U.X)
    T = U.table
    dy = np.array([U.Y.diameter(U.Y.members(T[i], T[j])) if U.Y.le[T[i], T[j]] else 0.0
                   for i, j in zip(a, b)])
    out = {}
    for d in sorted(float(v) for v in delta_grid):
        sel = dx < d
        out[d] = float(dy[sel].max()) if sel.any() else 0.0
    U.eta.update(out)
    return out


@dataclass(frozen=True)
class CausalityVerdict:
    passed: bool
    kind: str = ""
    witness: tuple = ()

    def to_dict(self) -> dict:
        return {"passed": self.passed, "kind": self.kind, "witness": list(self.witness)}


def check_causality_preserving(U: CausalMap) -> CausalityVerdict:
    """``p <= q`` implies ``Up <= Uq`` and ``U(J(p,q))`` lies in ``J(Up,Uq)``."""
    X, Y, T = U.X, U.Y, np.asarray(U.table)
    ty_le = Y.le[np.ix_(T, T)]
    bad = X.le & ~ty_le
    if bad.any():
        a, b = divmod(int(np.argmax(bad)), X.n)
        return CausalityVerdict(False, "order", (X.ids[a], X.ids[b]))
    for a, b in zip(*np.nonzero(X.le)):
        ua, ub = T[a], T[b]
        inside = Y.le[ua, T] & Y.le[T, ub]
        m = X.members(a, b)
        out = m[~inside[m]]
        if out.size:
            return CausalityVerdict(False, "image", (X.ids[a], X.ids[b], X.ids[int(out[0])]))
    return CausalityVerdict(True)
