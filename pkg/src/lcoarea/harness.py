"""End-to-end experiments: coarea reports, volume runs, diagnostics.

Reports are plain dataclasses with ``to_dict``; :mod:`lcoarea.report`
turns them into canonical JSON so equal inputs give byte-identical files.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ._accel import thread_cap
from .backends import CausalSet, MinkowskiDiamond, load_space, parse_space, unit_diamond
from .covering import chronological_estimation
from .curves import CausalMap, check_causality_preserving, tlip_estimate
from .errors import ExperimentAborted, InfeasibleError, InputError, SizeError
from .integration import ChainReport, check_coarea_chain
from .measure import (EXACT_CANDIDATE_LIMIT, EXACT_TARGET_LIMIT, MeasureEstimate, candidate_diamonds,
                      chronological_candidates, cover_value_exact, cover_value_greedy, estimate_measure,
                      omega, rho, rho_value)

HYPOTHESES_NOTE = (
    "finite Y: every function is measurable; regularity, sigma-finiteness and "
    "nullity of null diamonds hold by construction on finite and Minkowski backends"
)


def _fmt(v):
    return v if math.isfinite(v) else "inf"


# --------------------------------------------------------------------------
# Configuration
# --------------------------------------------------------------------------

@dataclass
class ExperimentConfig:
    X: object = None
    Y: object = None
    map: dict = field(default_factory=dict)
    s: float = 1.0
    t: float = 1.0
    delta: float = 1.0
    delta0: float | None = None
    E: list | None = None
    seed: int = 0
    tolerance: float = 1e-9
    integral_method: str = "lp"
    generator: dict | None = None

    def __post_init__(self):
        if self.delta0 is None:
            self.delta0 = self.delta
        if not 0 <= self.t <= self.s:
            raise InputError("config needs 0 <= t <= s")
        if not self.delta > 0:
            raise InputError("config needs delta > 0")
        if self.delta > self.delta0:
            raise InputError("config needs delta <= delta0")

    @classmethod
    def from_dict(cls, doc: dict, base: Path | None = None) -> ExperimentConfig:
        known = {"X", "Y", "map", "s", "t", "delta", "delta0", "E", "seed", "tolerance",
                 "integral_method", "generator"}
        extra = set(doc) - known
        if extra:
            raise InputError(f"unknown config keys: {sorted(extra)}")
        doc = dict(doc)
        for key in ("X", "Y"):
            if isinstance(doc.get(key), str):
                p = Path(doc[key])
                doc[key] = str(p if p.is_absolute() or base is None else base / p)
        return cls(**doc)

    def to_dict(self) -> dict:
        out = {k: getattr(self, k) for k in ("map", "s", "t", "delta", "delta0", "E", "seed",
                                             "tolerance", "integral_method", "generator")}
        out["X"] = self.X if isinstance(self.X, (str, type(None))) else "inline"
        out["Y"] = self.Y if isinstance(self.Y, (str, type(None))) else "inline"
        return out


def _load(src) -> CausalSet:
    if isinstance(src, CausalSet):
        return src
    if isinstance(src, (str, Path)):
        return load_space(src)
    if isinstance(src, dict):
        return parse_space(src)
    raise InputError("space source must be a path, a space document or a CausalSet")


# --------------------------------------------------------------------------
# Random instances
# --------------------------------------------------------------------------

@dataclass
class CoareaInstance:
    X: CausalSet
    Y: CausalSet
    U: CausalMap
    s: float
    t: float
    delta: float
    delta0: float
    seed: int


def random_coarea_instance(seed: int, max_x: int = 10, max_y: int = 4, ecc_max: float = 3.0,
                           dims=(0, 1, 2)) -> CoareaInstance:
    """Layered 1+1 point set mapped onto a timelike chain.

    Points sit in layers near times ``0, 1, 2, ...`` (jitter 0.1) and are
    spacelike within a layer. Related pairs across layers have
    eccentricity ``<= ecc_max`` and no pair is null, so ``U`` (the layer
    index) is causality preserving, timelike Lipschitz and sends every
    related pair to a strictly related pair of ``Y``.
    """
    rng = np.random.default_rng(seed)
    n_layers = int(rng.integers(2, max_y + 1))
    n = int(rng.integers(n_layers, max_x + 1))
    layer = np.sort(np.concatenate([np.arange(n_layers), rng.integers(0, n_layers, n - n_layers)]))
    beta2 = (ecc_max ** 2 - 1.0) / (ecc_max ** 2 + 1.0)
    pts = []
    for k in range(n):
        for _ in range(10_000):
            c = np.array([layer[k] + rng.uniform(-0.1, 0.1), rng.uniform(-0.8, 0.8)])
            ok = True
            for j, q in enumerate(pts):
                dt = abs(c[0] - q[0])
                r = abs(c[1] - q[1])
                if layer[j] == layer[k]:
                    ok = r > dt + 0.05
                else:
                    ok = r * r <= beta2 * dt * dt * 0.999 or r > dt + 0.05
                if not ok:
                    break
            if ok:
                pts.append(c)
                break
        else:  # pragma: no cover - rejection budget is generous
            raise InputError("could not place a point")
    X = CausalSet.from_coords(np.array(pts))
    Tj = np.cumsum(np.concatenate([[0.0], rng.uniform(0.5, 1.5, n_layers - 1)]))
    Y = CausalSet.from_coords(np.column_stack([Tj, np.zeros(n_layers)]),
                              [f"y{j}" for j in range(n_layers)])
    U = CausalMap(X, Y, tuple(int(v) for v in layer))
    s = float(rng.choice(dims))
    t = float(rng.choice([d for d in dims if d <= s]))
    dmax = float(X.dist.max()) if X.n > 1 else 1.0
    delta = dmax * float(rng.uniform(0.4, 1.2))
    delta0 = delta * float(rng.uniform(1.0, 1.5))
    return CoareaInstance(X, Y, U, s, t, delta, delta0, seed)


# --------------------------------------------------------------------------
# Coarea experiment
# --------------------------------------------------------------------------

@dataclass
class CoareaReport:
    lhs: float
    rhs: float
    constant: float
    fibers: dict
    passed: bool
    tolerance: float
    chain: ChainReport
    verdicts: dict
    config: dict

    @property
    def slack(self) -> float:
        if math.isinf(self.rhs):
            return math.inf
        return self.rhs - self.lhs

    def to_dict(self) -> dict:
        return {
            "lhs": _fmt(self.lhs), "rhs": _fmt(self.rhs), "constant": _fmt(self.constant),
            "slack": _fmt(self.slack), "fibers": {k: _fmt(v) for k, v in self.fibers.items()},
            "passed": self.passed, "tolerance": self.tolerance, "chain": self.chain.to_dict(),
            "verdicts": self.verdicts, "config": self.config, "hypotheses": HYPOTHESES_NOTE,
        }


def run_coarea_instance(X: CausalSet, Y: CausalSet, U: CausalMap, s: float, t: float, delta: float,
                        delta0: float, E=None, tolerance: float = 1e-9, integral_method: str = "lp",
                        config: dict | None = None) -> CoareaReport:
    cv = check_causality_preserving(U)
    if not cv.passed:
        raise ExperimentAborted(f"map is not causality preserving: {cv.witness}", cv)
    tv = tlip_estimate(U)
    if not tv.lipschitz:
        raise ExperimentAborted(f"map is not timelike Lipschitz: {tv.witness}", tv)
    chain = check_coarea_chain(U, E, s, t, delta, delta0, tolerance, integral_method)
    return CoareaReport(chain.integral, chain.rhs_i, chain.constant, chain.fibers, chain.passed,
                        tolerance, chain, {"causality": cv.to_dict(), "tlip": tv.to_dict()},
                        config or {})


def run_coarea_experiment(cfg: ExperimentConfig) -> CoareaReport:
    """Build the spaces and map from ``cfg`` and run the fixed-scale chain."""
    if cfg.generator is not None:
        g = dict(cfg.generator)
        inst = random_coarea_instance(int(g.get("seed", cfg.seed)), int(g.get("max_x", 10)),
                                      int(g.get("max_y", 4)), float(g.get("ecc_max", 3.0)))
        return run_coarea_instance(inst.X, inst.Y, inst.U, inst.s, inst.t, inst.delta, inst.delta0,
                                   None, cfg.tolerance, cfg.integral_method,
                                   dict(cfg.to_dict(), s=inst.s, t=inst.t, delta=inst.delta,
                                        delta0=inst.delta0))
    X = _load(cfg.X)
    m = cfg.map or {}
    if "rule" in m:
        U = CausalMap.from_rule(m["rule"], X)
        Y = U.Y
    elif "table" in m:
        Y = _load(cfg.Y)
        U = CausalMap.from_table(X, Y, m["table"])
    else:
        raise InputError("map needs a 'rule' or a 'table'")
    return run_coarea_instance(X, Y, U, cfg.s, cfg.t, cfg.delta, cfg.delta0, cfg.E, cfg.tolerance,
                               cfg.integral_method, cfg.to_dict())


def run_batch(fn, seeds, threads: int | None = None) -> list:
    """Apply ``fn(seed)`` to every seed; results are returned in seed order."""
    seeds = list(seeds)
    workers = min(thread_cap() if threads is None else max(1, threads), max(1, len(seeds)))
    if workers == 1:
        return [fn(k) for k in seeds]
    with ThreadPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, seeds))


# --------------------------------------------------------------------------
# Volume experiment
# --------------------------------------------------------------------------

@dataclass
class VolumeReport:
    estimate: MeasureEstimate
    volume: float
    max_abs_error: float

    def to_dict(self) -> dict:
        d = self.estimate.to_dict()
        d.pop("solutions", None)
        return {"estimate": d, "volume": self.volume, "max_abs_error": self.max_abs_error}

    def csv_rows(self):
        return [("V", self.estimate.s, None, d, v)
                for d, v in zip(self.estimate.delta_schedule, self.estimate.values)]


def run_minkowski_volume_experiment(delta_schedule, tau: float = 1.0, p=(0.0, 0.0),
                                    q=None) -> VolumeReport:
    """Null-tiling cover values of a 1+1 diamond against ``omega_2 tau**2``."""
    if q is None:
        q = (p[0] + tau, p[1])
    J = MinkowskiDiamond(p, q)
    vol = rho_value(2, J.tau, J.empty)
    if J.timelike:
        est = estimate_measure(None, J, 2.0, delta_schedule, method="structured")
    else:
        # null or empty: split into null segments, each of zero content
        sched = [float(d) for d in delta_schedule]
        est = MeasureEstimate(2.0, sched, [0.0] * len(sched), "converged", 1e-12, [])
    err = max(abs(v - vol) for v in est.values)
    return VolumeReport(est, vol, err)


def minkowski_volume_mc(N: int, samples: int = 1_000_000, seed: int = 0, tau: float = 1.0) -> float:
    """Monte-Carlo volume of the diamond of time separation ``tau`` in dimension ``N``."""
    J = unit_diamond(N - 1, tau)
    lo, hi = J.bounding_box()
    rng = np.random.default_rng(seed)
    hits = 0
    chunk = 200_000
    done = 0
    while done < samples:
        k = min(chunk, samples - done)
        hits += int(J.contains(rng.uniform(lo, hi, size=(k, N))).sum())
        done += k
    return float(np.prod(hi - lo)) * hits / samples


# --------------------------------------------------------------------------
# Density diagnostic
# --------------------------------------------------------------------------

@dataclass
class DensityStat:
    s: float
    epsilon: float
    delta: float
    checked: int
    violations: int
    rows: list

    @property
    def fraction(self) -> float:
        return self.violations / self.checked if self.checked else 0.0

    def to_dict(self) -> dict:
        return {"s": self.s, "epsilon": _fmt(self.epsilon), "delta": _fmt(self.delta),
                "checked": self.checked, "violations": self.violations,
                "violation_fraction": self.fraction, "rows": self.rows}


def density_diagnostic(space: CausalSet, E=None, s: float = 2.0, epsilon: float = 0.1,
                       samples: int = 20, seed: int = 0) -> DensityStat:
    """Fraction of sampled ``x`` in ``E`` with ``V^s_delta(E ∩ J) > (1+eps) rho_s(J)``.

    ``J`` is the smallest-diameter diamond of ``space`` containing ``x``;
    ``delta`` is just above the largest such diameter over ``E`` (the
    smallest scale at which every sampled point has a diamond).
    """
    E = space.resolve_all(E)
    all_c = candidate_diamonds(space, math.inf)
    best = {}
    for x in E:
        cont = [J for J in all_c if x in J.members]
        if cont:
            best[x] = min(cont, key=lambda J: (J.diam, J.label))
    if not best:
        return DensityStat(s, epsilon, math.inf, 0, 0, [])
    delta = max(J.diam for J in best.values()) * (1 + 1e-9) + 1e-300
    cands = candidate_diamonds(space, delta)
    rng = np.random.default_rng(seed)
    pts = sorted(best)
    if len(pts) > samples:
        pts = sorted(rng.choice(pts, samples, replace=False).tolist())
    Eset = set(E)
    rows, bad = [], 0
    for x in pts:
        J = best[x]
        sub = sorted(Eset.intersection(J.members))
        try:
            sol = cover_value_exact(space, sub, cands, s, delta)
        except SizeError:
            sol = cover_value_greedy(space, sub, cands, s, delta)
        bound = (1 + epsilon) * rho(s, J) if math.isfinite(epsilon) else math.inf
        viol = sol.cost > bound + 1e-12
        bad += viol
        rows.append({"x": space.ids[x], "J": list(J.label), "value": _fmt(sol.cost),
                     "bound": _fmt(bound), "certificate": sol.certificate, "violation": bool(viol)})
    return DensityStat(s, epsilon, delta, len(rows), bad, rows)


# --------------------------------------------------------------------------
# Strong versus causal pre-measure
# --------------------------------------------------------------------------

@dataclass
class StrongVsCausal:
    s: float
    delta: float
    epsilon: float
    V_delta: float
    M_delta: float
    V_delta_ext: float
    M_delta_ext: float
    M_eps_estimate: float
    M_eps_exact: float
    bound: float
    infeasible: list
    tolerance: float = 1e-9

    @property
    def lower_holds(self) -> bool:
        return self.M_delta >= self.V_delta - self.tolerance and \
            self.M_delta_ext >= self.V_delta_ext - self.tolerance

    @property
    def upper_holds(self) -> bool:
        if math.isinf(self.bound):
            return True
        return self.M_eps_exact <= self.M_eps_estimate + self.tolerance and \
            self.M_eps_estimate <= self.bound + self.tolerance

    def to_dict(self) -> dict:
        d = {k: _fmt(getattr(self, k)) for k in ("V_delta", "M_delta", "V_delta_ext", "M_delta_ext",
                                               "M_eps_estimate", "M_eps_exact", "bound")}
        d.update(s=self.s, delta=self.delta, epsilon=self.epsilon, infeasible=self.infeasible,
                 lower_holds=self.lower_holds, upper_holds=self.upper_holds, tolerance=self.tolerance)
        return d


def _budget_eps2(s: float, tau: float, budget: float) -> float:
    if s == 0:
        return 1.0
    return (tau ** s + budget / omega(s)) ** (1.0 / s) - tau


def strong_vs_causal_test(space: CausalSet, target, delta: float, s: float = 1.0, epsilon: float = 1.5,
                          pool=None, tolerance: float = 1e-9) -> StrongVsCausal:
    """Compare chronological and causal cover values on a Minkowski-embedded set.

    Lower side: chronological covers are causal covers, so ``M >= V`` at the
    same scale and pool (checked both for ``pool`` and for ``pool`` plus
    the fattened vertices). Upper side: every diamond of an optimal causal
    cover is fattened to ``I(p~,q~)`` with ``diam <= epsilon diam`` and
    ``rho_s`` growth at most ``(epsilon-1) 2**-(i+1)``, giving a
    chronological ``epsilon*delta``-cover of cost ``<= (epsilon-1) + V``.
    """
    if not epsilon > 1:
        raise InputError("epsilon must exceed 1")
    if space.coords is None:
        raise InputError("strong_vs_causal_test needs a coordinate-induced set")
    tgt = space.resolve_all(target)
    base_pool = space.resolve_all(pool)
    if not tgt:
        return StrongVsCausal(s, delta, epsilon, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, epsilon - 1, [], tolerance)

    V = cover_value_exact(space, tgt, candidate_diamonds(space, delta, base_pool), s, delta)
    M = cover_value_exact(space, tgt, chronological_candidates(space, delta, base_pool), s, delta)

    pushed, infeasible, est_cost = [], [], []
    if math.isfinite(V.cost):
        for i, (_, J) in enumerate(V.items):
            JJ = MinkowskiDiamond(tuple(space.coords[J.p]), tuple(space.coords[J.q]))
            budget = (epsilon - 1.0) * 2.0 ** -(i + 1)
            try:
                est = chronological_estimation(JJ, epsilon, _budget_eps2(s, JJ.tau, budget))
            except InfeasibleError as exc:
                infeasible.append({"diamond": list(J.label), "reason": str(exc)})
                continue
            pushed.extend([est.diamond.p, est.diamond.q])
            est_cost.append(rho_value(s, est.tau))
    if infeasible or not math.isfinite(V.cost):
        est_total = math.inf
    else:
        est_total = math.fsum(est_cost)

    ext = space.extended(pushed, [f"push{k}" for k in range(len(pushed))]) if pushed else space
    ext_pool = list(base_pool) + list(range(space.n, ext.n))
    V_ext = cover_value_exact(ext, tgt, candidate_diamonds(ext, delta, ext_pool), s, delta)
    M_ext = cover_value_exact(ext, tgt, chronological_candidates(ext, delta, ext_pool), s, delta)
    try:
        M_eps = cover_value_exact(ext, tgt, chronological_candidates(ext, epsilon * delta, ext_pool),
                                  s, epsilon * delta, EXACT_TARGET_LIMIT, EXACT_CANDIDATE_LIMIT).cost
    except SizeError:
        M_eps = est_total
    bound = (epsilon - 1.0) + V.cost if math.isfinite(V.cost) else math.inf
    return StrongVsCausal(s, delta, epsilon, V.cost, M.cost, V_ext.cost, M_ext.cost, est_total, M_eps,
                          bound, infeasible, tolerance)
