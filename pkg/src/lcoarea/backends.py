"""Concrete spaces: Minkowski R^{1,n} and finite causal sets.

Also hosts Poisson sprinkling, longest-path time separations and the
causal-set JSON reader/writer.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from graphlib import CycleError, TopologicalSorter
from pathlib import Path

import jsonschema
import numpy as np

from . import kernels
from .errors import AxiomViolation, InputError, UnsupportedError
from .space import CausalDiamond, PointRef, PreLengthSpace, verify_axioms


def _omega(N):
    from .measure import omega
    return omega(N)


# --------------------------------------------------------------------------
# Minkowski
# --------------------------------------------------------------------------

def minkowski_tau(x, y) -> float:
    """Time separation in Minkowski space (time coordinate first)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1 or x.size < 1:
        raise InputError(f"coordinate mismatch: {x.shape} vs {y.shape}")
    dt = y[0] - x[0]
    r = float(np.sqrt(np.sum((y[1:] - x[1:]) ** 2)))
    if dt > r:
        return float(np.sqrt((dt - r) * (dt + r)))
    return 0.0


def _causal_vec(x, y):
    """Vectorised ``x <= y`` over the leading axis (broadcasting)."""
    d = np.asarray(y, dtype=float) - np.asarray(x, dtype=float)
    return d[..., 0] >= np.sqrt(np.sum(d[..., 1:] ** 2, axis=-1))


def _chrono_vec(x, y):
    d = np.asarray(y, dtype=float) - np.asarray(x, dtype=float)
    return d[..., 0] > np.sqrt(np.sum(d[..., 1:] ** 2, axis=-1))


@dataclass(frozen=True)
class MinkowskiDiamond:
    """Analytic causal diamond ``J(p,q)`` in Minkowski space.

    The Euclidean diameter of a non-empty diamond is ``|q - p|``: the body
    is the convex hull of ``p``, ``q`` and the rim where the two light
    cones meet, and no rim chord is longer than the vertex chord.
    """

    p: tuple[float, ...]
    q: tuple[float, ...]

    def __post_init__(self):
        p = tuple(float(v) for v in self.p)
        q = tuple(float(v) for v in self.q)
        if len(p) != len(q) or not p:
            raise InputError("diamond vertices must share a dimension")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)

    @property
    def dim(self) -> int:
        return len(self.p)

    @property
    def empty(self) -> bool:
        return not bool(_causal_vec(self.p, self.q))

    @property
    def timelike(self) -> bool:
        return bool(_chrono_vec(self.p, self.q))

    @property
    def tau(self) -> float:
        return minkowski_tau(self.p, self.q)

    @property
    def diam(self) -> float:
        if self.empty:
            return 0.0
        return float(np.linalg.norm(np.subtract(self.q, self.p)))

    @property
    def eccentricity(self) -> float:
        t = self.tau
        return math.inf if t == 0 else self.diam / t

    @property
    def volume(self) -> float:
        return 0.0 if self.empty else _omega(self.dim) * self.tau ** self.dim

    def contains(self, pts) -> np.ndarray:
        pts = np.asarray(pts, dtype=float)
        return _causal_vec(self.p, pts) & _causal_vec(pts, self.q)

    def contains_strict(self, pts) -> np.ndarray:
        pts = np.asarray(pts, dtype=float)
        return _chrono_vec(self.p, pts) & _chrono_vec(pts, self.q)

    def contains_diamond(self, other: MinkowskiDiamond) -> bool:
        if other.empty:
            return True
        return bool(self.contains(other.p)) and bool(self.contains(other.q))

    def null_box(self):
        """``(u0, u1, v0, v1)`` with ``u = t - x``, ``v = t + x`` (1+1 only)."""
        if self.dim != 2:
            raise UnsupportedError("null coordinates need spatial dimension 1")
        (tp, xp), (tq, xq) = self.p, self.q
        return tp - xp, tq - xq, tp + xp, tq + xq

    def intersects(self, other: MinkowskiDiamond) -> bool:
        if self.empty or other.empty:
            return False
        a0, a1, b0, b1 = self.null_box()
        c0, c1, d0, d1 = other.null_box()
        return max(a0, c0) <= min(a1, c1) and max(b0, d0) <= min(b1, d1)

    def bounding_box(self):
        p = np.asarray(self.p)
        T = self.q[0] - self.p[0]
        lo = np.concatenate([[p[0]], p[1:] - T])
        hi = np.concatenate([[self.q[0]], p[1:] + T])
        return lo, hi

    def sample(self, rng: np.random.Generator, k: int) -> np.ndarray:
        """``k`` points uniform in the diamond (rejection from its box)."""
        if self.empty or not self.timelike:
            raise UnsupportedError("cannot sample a degenerate diamond")
        lo, hi = self.bounding_box()
        out = []
        have = 0
        while have < k:
            cand = rng.uniform(lo, hi, size=(max(64, 2 * (k - have)), self.dim))
            cand = cand[self.contains(cand)]
            out.append(cand)
            have += len(cand)
        return np.concatenate(out)[:k]

    def to_dict(self) -> dict:
        return {"p": list(self.p), "q": list(self.q), "tau": self.tau, "diam": self.diam}


@dataclass(frozen=True)
class Box:
    lo: tuple[float, ...]
    hi: tuple[float, ...]

    @property
    def dim(self) -> int:
        return len(self.lo)

    @property
    def volume(self) -> float:
        return float(np.prod(np.subtract(self.hi, self.lo)))

    def contains(self, pts) -> np.ndarray:
        pts = np.asarray(pts, dtype=float)
        return np.all((pts >= self.lo) & (pts <= self.hi), axis=-1)

    def bounding_box(self):
        return np.asarray(self.lo, float), np.asarray(self.hi, float)


def unit_diamond(n: int = 1, tau: float = 1.0) -> MinkowskiDiamond:
    """``J((0,0..), (tau,0..))`` in ``R^{1,n}``."""
    zero = [0.0] * (n + 1)
    top = [tau] + [0.0] * n
    return MinkowskiDiamond(tuple(zero), tuple(top))


class MinkowskiSpace(PreLengthSpace):
    """``R^{1,n}`` with the Euclidean background metric."""

    backend = "minkowski"
    finite = False

    def __init__(self, n: int, region=None):
        if n < 0:
            raise InputError("spatial dimension must be >= 0")
        self.n = int(n)
        self.region = region

    @property
    def dim(self) -> int:
        return self.n + 1

    def _check(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.dim:
            raise InputError(f"expected {self.dim} coordinates, got {x.shape[-1]}")
        return x

    def causal(self, x, y) -> bool:
        return bool(_causal_vec(self._check(x), self._check(y)))

    def chronological(self, x, y) -> bool:
        return bool(_chrono_vec(self._check(x), self._check(y)))

    def time_separation(self, x, y) -> float:
        return minkowski_tau(self._check(x), self._check(y))

    def distance(self, x, y) -> float:
        return float(np.linalg.norm(self._check(y) - self._check(x)))

    def diamond(self, p, q) -> MinkowskiDiamond:
        return MinkowskiDiamond(tuple(self._check(p)), tuple(self._check(q)))

    def contains(self, pts) -> np.ndarray:
        pts = self._check(pts)
        if self.region is None:
            return np.ones(pts.shape[:-1], dtype=bool)
        return self.region.contains(pts)

    def induced(self, coords, ids=None) -> CausalSet:
        coords = self._check(np.atleast_2d(coords))
        outside = np.flatnonzero(~self.contains(coords))
        if outside.size:
            raise InputError(f"sample point {int(outside[0])} lies outside the region")
        return CausalSet.from_coords(coords, ids)


# --------------------------------------------------------------------------
# Finite causal sets
# --------------------------------------------------------------------------

def _frozen(a, dtype):
    a = np.array(a, dtype=dtype, copy=True)
    a.setflags(write=False)
    return a


class CausalSet(PreLengthSpace):
    """Finite pre-length space stored as dense relation tables.

    ``le`` is reflexive and transitively closed; ``tau`` may contain
    ``inf``. ``origin`` records whether relations came from Minkowski
    coordinates (``"minkowski"``) or from explicit tables (``"table"``).
    """

    backend = "causal_set"
    finite = True

    def __init__(self, ids, le, ll, tau, dist, coords=None, origin="table"):
        ids = tuple(str(i) for i in ids)
        n = len(ids)
        if len(set(ids)) != n:
            raise InputError("point ids must be unique")
        for name, arr in (("le", le), ("ll", ll), ("tau", tau), ("dist", dist)):
            if np.shape(arr) != (n, n):
                raise InputError(f"{name} table must be {n}x{n}")
        self.ids = ids
        self.le = _frozen(le, bool)
        self.ll = _frozen(ll, bool)
        self.tau = _frozen(tau, float)
        self.dist = _frozen(dist, float)
        self.coords = None if coords is None else _frozen(coords, float)
        self.origin = origin
        self._index = {k: i for i, k in enumerate(ids)}

    @classmethod
    def from_coords(cls, coords, ids=None) -> CausalSet:
        coords = np.ascontiguousarray(np.atleast_2d(coords), dtype=float)
        n = coords.shape[0]
        if ids is None:
            ids = [f"x{i}" for i in range(n)]
        le, ll, tau = kernels.minkowski_relations(coords)
        diff = coords[:, None, :] - coords[None, :, :]
        dist = np.sqrt(np.sum(diff * diff, axis=-1))
        return cls(ids, le, ll, tau, dist, coords, origin="minkowski")

    def __len__(self):
        return len(self.ids)

    def __repr__(self):
        return f"CausalSet(n={self.n}, origin={self.origin!r})"

    @property
    def n(self) -> int:
        return len(self.ids)

    def resolve(self, x) -> int:
        """Index of a point given as index or id."""
        if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
            if not 0 <= int(x) < self.n:
                raise InputError(f"point index {x} not in universe")
            return int(x)
        try:
            return self._index[str(x)]
        except KeyError:
            raise InputError(f"point {x!r} not in universe") from None

    def resolve_all(self, xs) -> list[int]:
        if xs is None:
            return list(range(self.n))
        return [self.resolve(x) for x in xs]

    def point(self, i: int) -> PointRef:
        c = None if self.coords is None else tuple(self.coords[i])
        return PointRef(self.ids[i], c)

    def causal(self, x, y) -> bool:
        return bool(self.le[self.resolve(x), self.resolve(y)])

    def chronological(self, x, y) -> bool:
        return bool(self.ll[self.resolve(x), self.resolve(y)])

    def time_separation(self, x, y) -> float:
        return float(self.tau[self.resolve(x), self.resolve(y)])

    def distance(self, x, y) -> float:
        return float(self.dist[self.resolve(x), self.resolve(y)])

    def members(self, p: int, q: int, chronological: bool = False) -> np.ndarray:
        rel = self.ll if chronological else self.le
        return np.flatnonzero(rel[p] & rel[:, q])

    def diameter(self, members) -> float:
        m = np.asarray(members, dtype=np.int64)
        if m.size < 2:
            return 0.0
        return float(self.dist[np.ix_(m, m)].max())

    def diamond(self, p, q) -> CausalDiamond:
        p, q = self.resolve(p), self.resolve(q)
        m = self.members(p, q)
        return CausalDiamond(p, q, float(self.tau[p, q]), self.diameter(m),
                             tuple(int(i) for i in m), (self.ids[p], self.ids[q]))

    def chronological_diamond(self, p, q) -> CausalDiamond:
        p, q = self.resolve(p), self.resolve(q)
        m = self.members(p, q, chronological=True)
        closure = self.members(p, q)
        return CausalDiamond(p, q, float(self.tau[p, q]), self.diameter(closure),
                             tuple(int(i) for i in m), (self.ids[p], self.ids[q]),
                             chronological=True)

    def subset(self, idx) -> CausalSet:
        idx = np.asarray(self.resolve_all(idx), dtype=np.int64)
        sub = np.ix_(idx, idx)
        coords = None if self.coords is None else self.coords[idx]
        return CausalSet([self.ids[i] for i in idx], self.le[sub], self.ll[sub],
                         self.tau[sub], self.dist[sub], coords, self.origin)

    def extended(self, coords, ids=None) -> CausalSet:
        """Add ambient points; only for coordinate-induced sets."""
        if self.origin != "minkowski" or self.coords is None:
            raise UnsupportedError("ambient points need a coordinate-induced set")
        coords = np.atleast_2d(np.asarray(coords, dtype=float))
        if ids is None:
            ids = [f"a{i}" for i in range(len(coords))]
        return CausalSet.from_coords(np.vstack([self.coords, coords]), list(self.ids) + list(ids))


# --------------------------------------------------------------------------
# Sprinkling
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class SprinkleConfig:
    dimension: int
    intensity: float
    seed: int = 0
    region: object = None

    def resolved_region(self):
        return self.region if self.region is not None else unit_diamond(self.dimension - 1)


def region_volume(region) -> float:
    return float(region.volume)


def sprinkle(cfg: SprinkleConfig) -> CausalSet:
    """Poisson sprinkling with relations induced from Minkowski space.

    Points are sorted by time and named ``x0, x1, ...``.
    """
    if cfg.dimension < 1:
        raise InputError("dimension must be >= 1")
    if not cfg.intensity > 0:
        raise InputError("intensity must be positive")
    region = cfg.resolved_region()
    if region.dim != cfg.dimension:
        raise InputError("region dimension does not match")
    vol = region_volume(region)
    if not vol > 0:
        raise InputError("region has zero volume")
    rng = np.random.default_rng(cfg.seed)
    count = int(rng.poisson(cfg.intensity * vol))
    lo, hi = region.bounding_box()
    chunks, have = [], 0
    while have < count:
        cand = rng.uniform(lo, hi, size=(max(32, 2 * (count - have)), cfg.dimension))
        cand = cand[region.contains(cand)]
        chunks.append(cand)
        have += len(cand)
    pts = np.concatenate(chunks)[:count] if count else np.zeros((0, cfg.dimension))
    pts = pts[np.argsort(pts[:, 0], kind="stable")]
    return CausalSet.from_coords(pts)


# --------------------------------------------------------------------------
# Longest-path time separation
# --------------------------------------------------------------------------

def longest_path_tau(n: int, links):
    """Time separation as the heaviest directed path in a weighted DAG.

    ``links`` holds ``(i, j, w)`` with ``w >= 0``; a zero weight is a null
    (causal-only) link. Returns ``(tau, le)`` where ``le`` is the reflexive
    reachability relation and ``tau`` is 0 off it.
    """
    graph = {i: set() for i in range(n)}
    src, dst, wts = [], [], []
    for link in links:
        i, j, w = int(link[0]), int(link[1]), float(link[2])
        if not (0 <= i < n and 0 <= j < n):
            raise InputError(f"link {link} references an unknown point")
        if not w >= 0 or math.isinf(w):
            raise InputError(f"link {link} needs a finite nonnegative weight")
        if i == j:
            raise InputError(f"cycle detected: self-loop at {i}")
        graph[j].add(i)
        src.append(i); dst.append(j); wts.append(w)
    try:
        order = list(TopologicalSorter(graph).static_order())
    except CycleError as exc:
        raise InputError(f"cycle detected: {exc.args[1]}") from None
    src = np.asarray(src, dtype=np.int64)
    perm = np.argsort(src, kind="stable")
    targets = np.asarray(dst, dtype=np.int64)[perm]
    weights = np.asarray(wts, dtype=float)[perm]
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.add.at(indptr, src + 1, 1)
    indptr = np.cumsum(indptr)
    best = kernels.longest_paths(n, np.asarray(order, dtype=np.int64), indptr, targets, weights)
    le = best > -np.inf
    tau = np.where(le, best, 0.0)
    return tau, le


# --------------------------------------------------------------------------
# JSON format
# --------------------------------------------------------------------------

_REF = {"type": ["integer", "string"]}
_NUM = {"type": ["number", "string", "null"]}

SPACE_SCHEMA = {
    "type": "object",
    "required": ["points"],
    "properties": {
        "points": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["id"],
                "properties": {
                    "id": {"type": "string"},
                    "coords": {"type": "array", "items": {"type": "number"}, "minItems": 1},
                },
            },
        },
        "metric": {
            "oneOf": [
                {"const": "euclidean"},
                {
                    "type": "object",
                    "required": ["pairs"],
                    "properties": {
                        "pairs": {"type": "array", "items": {
                            "type": "array", "prefixItems": [_REF, _REF, {"type": "number"}],
                            "minItems": 3, "maxItems": 3}},
                    },
                },
            ]
        },
        "relations": {
            "type": "object",
            "required": ["mode"],
            "properties": {
                "mode": {"enum": ["from_coords_minkowski", "explicit"]},
                "le": {"type": "array", "items": {"type": "array", "items": _REF, "minItems": 2, "maxItems": 2}},
                "ll": {"type": "array", "items": {"type": "array", "items": _REF, "minItems": 2, "maxItems": 2}},
            },
        },
        "tau": {
            "type": "object",
            "required": ["mode"],
            "properties": {
                "mode": {"enum": ["from_coords", "longest_path", "explicit"]},
                "links": {"type": "array", "items": {
                    "type": "array", "prefixItems": [_REF, _REF, {"type": "number"}],
                    "minItems": 3, "maxItems": 3}},
                "pairs": {"type": "array", "items": {
                    "type": "array", "prefixItems": [_REF, _REF, _NUM],
                    "minItems": 3, "maxItems": 3}},
            },
        },
    },
}


def _as_float(v) -> float:
    if v is None:
        return math.inf
    if isinstance(v, str):
        try:
            return float(v)
        except ValueError:
            raise InputError(f"bad numeric value {v!r}") from None
    return float(v)


def parse_space(doc, verify: bool = True, tol: float = 1e-9) -> CausalSet:
    """Build a :class:`CausalSet` from the causal-set JSON format.

    ``<=`` is transitively closed. With ``verify`` the axioms are checked
    and :class:`AxiomViolation` is raised on the first failing report.
    """
    try:
        jsonschema.validate(doc, SPACE_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise InputError(f"schema violation: {exc.message}") from None

    pts = doc["points"]
    ids = [p["id"] for p in pts]
    n = len(ids)
    if len(set(ids)) != n:
        raise InputError("point ids must be unique")
    index = {k: i for i, k in enumerate(ids)}

    def ref(r):
        if isinstance(r, int):
            if not 0 <= r < n:
                raise InputError(f"index {r} out of range")
            return r
        if r not in index:
            raise InputError(f"unknown point id {r!r}")
        return index[r]

    have_coords = [("coords" in p) for p in pts]
    coords = None
    if n and all(have_coords):
        coords = np.asarray([p["coords"] for p in pts], dtype=float)
        if coords.ndim != 2:
            raise InputError("all coords must share a length")
    elif any(have_coords):
        raise InputError("coords must be given for all points or none")

    metric = doc.get("metric", "euclidean" if coords is not None else None)
    if metric == "euclidean":
        if coords is None:
            raise InputError("euclidean metric needs coords")
        diff = coords[:, None, :] - coords[None, :, :]
        dist = np.sqrt(np.sum(diff * diff, axis=-1))
    elif metric is None:
        raise InputError("metric required when points carry no coords")
    else:
        dist = np.full((n, n), np.nan)
        np.fill_diagonal(dist, 0.0)
        for a, b, d in metric["pairs"]:
            i, j = ref(a), ref(b)
            dist[i, j] = dist[j, i] = float(d)
        if np.isnan(dist).any():
            i, j = np.argwhere(np.isnan(dist))[0]
            raise InputError(f"metric missing pair ({ids[i]}, {ids[j]})")

    rel = doc.get("relations", {"mode": "from_coords_minkowski" if coords is not None else "explicit"})
    tau_spec = doc.get("tau", {"mode": "from_coords" if coords is not None else "explicit"})
    origin = "table"

    if rel["mode"] == "from_coords_minkowski":
        if coords is None:
            raise InputError("from_coords_minkowski needs coords")
        le, ll, ctau = kernels.minkowski_relations(np.ascontiguousarray(coords))
        le, ll = le.copy(), ll.copy()
        origin = "minkowski"
    else:
        le = np.eye(n, dtype=bool)
        ll = np.zeros((n, n), dtype=bool)
        for a, b in rel.get("le", []):
            le[ref(a), ref(b)] = True
        for a, b in rel.get("ll", []):
            ll[ref(a), ref(b)] = True
        ctau = None

    mode = tau_spec["mode"]
    if mode == "from_coords":
        if coords is None:
            raise InputError("tau from_coords needs coords")
        if ctau is None:
            _, _, ctau = kernels.minkowski_relations(np.ascontiguousarray(coords))
        tau = np.array(ctau, copy=True)
    elif mode == "longest_path":
        links = [(ref(a), ref(b), float(w)) for a, b, w in tau_spec.get("links", [])]
        tau, reach = longest_path_tau(n, links)
        le |= reach
        ll |= tau > 0
        origin = "table"
    else:
        tau = np.zeros((n, n))
        for a, b, t in tau_spec.get("pairs", []):
            tau[ref(a), ref(b)] = _as_float(t)
        if rel["mode"] == "explicit" and "ll" not in rel:
            ll |= tau > 0

    le = kernels.transitive_closure(np.ascontiguousarray(le | np.eye(n, dtype=bool)))
    if origin == "minkowski" and mode != "from_coords":
        origin = "table"
    space = CausalSet(ids, le, ll, tau, dist, coords, origin)
    if verify:
        report = verify_axioms(space, tol=tol)
        if not report.passed:
            raise AxiomViolation(report)
    return space


def load_space(path, verify: bool = True) -> CausalSet:
    with open(path) as fh:
        return parse_space(json.load(fh), verify=verify)


def _num(v: float):
    return v if math.isfinite(v) else "inf"


def dump_space(space: CausalSet) -> dict:
    """Inverse of :func:`parse_space` (up to transitive closure)."""
    pts = []
    for i, pid in enumerate(space.ids):
        entry = {"id": pid}
        if space.coords is not None:
            entry["coords"] = [float(c) for c in space.coords[i]]
        pts.append(entry)
    if space.origin == "minkowski":
        return {
            "points": pts,
            "metric": "euclidean",
            "relations": {"mode": "from_coords_minkowski"},
            "tau": {"mode": "from_coords"},
        }
    n = space.n
    off = ~np.eye(n, dtype=bool)
    doc = {"points": pts}
    if space.coords is not None:
        doc["metric"] = "euclidean"
    else:
        doc["metric"] = {"pairs": [[int(i), int(j), float(space.dist[i, j])]
                                   for i in range(n) for j in range(i + 1, n)]}
    doc["relations"] = {
        "mode": "explicit",
        "le": [[int(i), int(j)] for i, j in np.argwhere(space.le & off)],
        "ll": [[int(i), int(j)] for i, j in np.argwhere(space.ll)],
    }
    doc["tau"] = {
        "mode": "explicit",
        "pairs": [[int(i), int(j), _num(float(space.tau[i, j]))] for i, j in np.argwhere(space.tau != 0)],
    }
    return doc


def save_space(space: CausalSet, path) -> None:
    Path(path).write_text(json.dumps(dump_space(space), indent=1, sort_keys=True) + "\n")
