"""Upper integrals, causal weighted integrals and the coarea functional.

Functions on finite spaces are dicts ``point -> value`` (ids or indices),
values in ``[0, inf]``. Products use ``0 * inf = 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .backends import CausalSet
from .curves import CausalMap, controlling_modulus, tlip_estimate
from .errors import InputError, SizeError
from .lp import covering_lp, covering_lp_vertices
from .measure import (candidate_diamonds, cover_value_exact, omega, rho, solve_cover)

LP_ROW_LIMIT = 60
LP_COL_LIMIT = 400


def _mul(a: float, b: float) -> float:
    if a == 0 or b == 0:
        return 0.0
    return a * b


def _fmt(v: float):
    return v if math.isfinite(v) else "inf"


# --------------------------------------------------------------------------
# Finite measures
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class FiniteMeasure:
    atoms: dict

    def __post_init__(self):
        for k, m in self.atoms.items():
            if not float(m) >= 0:
                raise InputError(f"mass of {k!r} must be nonnegative")


def upper_integral_finite(f: dict, mu: FiniteMeasure) -> float:
    """``sum f(x) mu(x)``; every function on a finite atom set is measurable."""
    total = []
    for x, m in mu.atoms.items():
        m = float(m)
        if m == 0:
            continue
        if x not in f:
            raise InputError(f"f undefined at atom {x!r} of positive mass")
        v = float(f[x])
        if not v >= 0:
            raise InputError(f"f({x!r}) must be in [0, inf]")
        total.append(_mul(v, m))
    if any(math.isinf(v) for v in total):
        return math.inf
    return math.fsum(total)


# --------------------------------------------------------------------------
# Weighted causal integral at fixed scale
# --------------------------------------------------------------------------

@dataclass
class WeightedCover:
    items: list = field(default_factory=list)
    delta: float = math.inf
    s: float = 0.0

    def to_dict(self) -> dict:
        return {
            "delta": _fmt(self.delta),
            "s": self.s,
            "items": [{"weight": _fmt(w), "diamond": J.to_dict()} for w, J in self.items],
        }


@dataclass
class WeightedIntegral:
    value: float
    cover: WeightedCover
    method: str

    def to_dict(self) -> dict:
        return {"value": _fmt(self.value), "method": self.method, "cover": self.cover.to_dict()}


def _normalise_f(space: CausalSet, f: dict) -> dict[int, float]:
    out = {}
    for k, v in f.items():
        v = float(v)
        if not v >= 0:
            raise InputError(f"f({k!r}) must be in [0, inf]")
        out[space.resolve(k)] = v
    return out


def weighted_causal_integral_delta(space: CausalSet, f: dict, s: float, delta: float, pool=None,
                                   method: str = "lp") -> WeightedIntegral:
    """Cheapest weighted diamond cover majorising ``f`` at scale ``delta``.

    Minimises ``sum a_i rho_s(J_i)`` subject to ``sum_{x in J_i} a_i >= f(x)``
    over diamonds with ``diam <= delta`` and vertices in ``pool``. Points with
    ``f = inf`` need a zero-cost diamond carrying infinite weight, otherwise
    the value is ``inf``. ``method`` is ``lp`` (exact rational simplex) or
    ``exact`` (vertex enumeration, small instances only).
    """
    fv = _normalise_f(space, f)
    support = sorted(x for x, v in fv.items() if v > 0)
    cover = WeightedCover([], delta, s)
    if not support:
        return WeightedIntegral(0.0, cover, method)
    cands = [J for J in candidate_diamonds(space, delta, pool, closed=True)
             if any(x in J.members for x in support)]
    cands = [J for J in cands if math.isfinite(rho(s, J))]

    # infinite demand: only free diamonds can carry it
    inf_pts = [x for x in support if math.isinf(fv[x])]
    free_items = []
    if inf_pts:
        free = [J for J in cands if rho(s, J) == 0]
        covered = set()
        for x in inf_pts:
            J = next((J for J in free if x in J.members), None)
            if J is None:
                return WeightedIntegral(math.inf, cover, method)
            if J.label not in {K.label for _, K in free_items}:
                free_items.append((math.inf, J))
            covered.update(J.members)
        support = [x for x in support if x not in covered]

    rows = support
    if method == "lp":
        if len(rows) > LP_ROW_LIMIT or len(cands) > LP_COL_LIMIT:
            raise SizeError(f"LP limited to {LP_ROW_LIMIT} support points / {LP_COL_LIMIT} candidates")
        solver = covering_lp
    elif method == "exact":
        solver = covering_lp_vertices
    else:
        raise InputError(f"unknown method {method!r}")
    M = [[1 if x in J.members else 0 for J in cands] for x in rows]
    res = solver(M, [rho(s, J) for J in cands], [fv[x] for x in rows])
    if res.status != "optimal":
        return WeightedIntegral(math.inf, cover, method)
    cover.items = free_items + [(w, J) for w, J in zip(res.weights, cands) if w > 0]
    return WeightedIntegral(res.value, cover, method)


# --------------------------------------------------------------------------
# Coarea functional
# --------------------------------------------------------------------------

@dataclass
class PhiValue:
    s: float
    t: float
    delta: float
    value: float
    witness: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "s": self.s, "t": self.t, "delta": _fmt(self.delta), "value": _fmt(self.value),
            "witness": [{"cost": _fmt(c), "diamond": J.to_dict()} for c, J in self.witness],
        }


def phi_cost(U: CausalMap, J, s: float, t: float) -> float:
    """``rho_s(J(Ua,Ub)) * rho_t(J(a,b))`` for a diamond of ``X``."""
    return _mul(rho(s, U.image_diamond(J.p, J.q)), rho(t, J))


def phi_delta(U: CausalMap, E, s: float, t: float, delta: float, method: str = "exact",
              pool=None) -> PhiValue:
    """Minimum of ``sum rho_s(J(Ua_i,Ub_i)) rho_t(J(a_i,b_i))`` over causal
    ``delta``-covers of ``E`` by diamonds of ``X`` (``diam < delta``)."""
    X = U.X
    E = X.resolve_all(E)
    if not E:
        return PhiValue(s, t, delta, 0.0, [])
    cands = candidate_diamonds(X, delta, pool)
    costs = [phi_cost(U, J, s, t) for J in cands]
    cost, picks = solve_cover(X, E, cands, costs, method)
    return PhiValue(s, t, delta, cost, [(costs[i], cands[i]) for i in picks])


@dataclass
class ChainReport:
    s: float
    t: float
    delta: float
    delta0: float
    tlip: float
    constant: float
    eta: float
    v_s: float
    phi: float
    integral: float
    fibers: dict
    rhs_i: float
    tolerance: float
    degenerate_images: list = field(default_factory=list)
    witnesses: dict = field(default_factory=dict)

    @property
    def slack_i(self) -> float:
        return _slack(self.rhs_i, self.phi)

    @property
    def slack_ii(self) -> float:
        return _slack(self.phi, self.integral)

    @property
    def slack_total(self) -> float:
        return _slack(self.rhs_i, self.integral)

    @property
    def passed(self) -> bool:
        tol = self.tolerance
        return self.slack_i >= -tol and self.slack_ii >= -tol and self.slack_total >= -tol

    def to_dict(self) -> dict:
        return {
            "s": self.s, "t": self.t, "delta": self.delta, "delta0": self.delta0,
            "tlip": _fmt(self.tlip), "constant": _fmt(self.constant), "eta": self.eta,
            "V_s": _fmt(self.v_s), "phi": _fmt(self.phi), "integral": _fmt(self.integral),
            "rhs": _fmt(self.rhs_i),
            "slack_i": _fmt(self.slack_i), "slack_ii": _fmt(self.slack_ii),
            "slack_total": _fmt(self.slack_total),
            "fibers": {k: _fmt(v) for k, v in self.fibers.items()},
            "degenerate_images": [list(p) for p in self.degenerate_images],
            "passed": self.passed, "tolerance": self.tolerance,
            "witnesses": self.witnesses,
        }


def _slack(big: float, small: float) -> float:
    if math.isinf(big):
        return math.inf
    if math.isinf(small):
        return -math.inf
    return big - small


def coarea_constant(s: float, t: float, tlip: float) -> float:
    """``tlip**t * omega_t * omega_{s-t} / omega_s`` with ``0**0 = 1``."""
    if not 0 <= t <= s:
        raise InputError("need 0 <= t <= s")
    lt = 1.0 if t == 0 else tlip ** t
    return lt * omega(t) * omega(s - t) / omega(s)


def fiber_function(U: CausalMap, E, dim: float, delta0: float) -> tuple[dict, dict]:
    """``y -> V^dim_{delta0}(U^{-1}(y) ∩ E)`` on Y, with the covers used."""
    X = U.X
    E = X.resolve_all(E)
    cands = candidate_diamonds(X, delta0)
    values, covers = {}, {}
    for y in range(U.Y.n):
        fib = U.preimage(y, E)
        if not fib:
            continue
        sol = cover_value_exact(X, fib, cands, dim, delta0)
        values[y] = sol.cost
        covers[y] = sol
    return values, covers


def check_coarea_chain(U: CausalMap, E, s: float, t: float, delta: float, delta0: float,
                       tol: float = 1e-9, integral_method: str = "lp") -> ChainReport:
    """Check the fixed-scale chain

    (i)  Phi^{t,s-t}_delta(U,E) <= TLip^t (omega_t omega_{s-t}/omega_s) V^s_delta(E)
    (ii) integral_{eta(delta)} V^{s-t}_{delta0}(U^{-1}(y) ∩ E) dV^t <= Phi^{t,s-t}_delta(U,E)

    with exact covers throughout and ``eta`` the empirical modulus of ``U``.
    """
    if not 0 <= t <= s:
        raise InputError("need 0 <= t <= s")
    if delta > delta0:
        raise InputError("need delta <= delta0")
    X, Y = U.X, U.Y
    E = X.resolve_all(E)
    verdict = tlip_estimate(U)
    if not verdict.lipschitz:
        raise InputError(f"map is not timelike Lipschitz: witness {verdict.witness}")
    const = coarea_constant(s, t, verdict.value)

    cands = candidate_diamonds(X, delta)
    v_s = cover_value_exact(X, E, cands, s, delta)
    rhs = math.inf if math.isinf(v_s.cost) else const * v_s.cost
    phi = phi_delta(U, E, t, s - t, delta)

    eta = controlling_modulus(U, [delta])[float(delta)]
    g, fiber_covers = fiber_function(U, E, s - t, delta0)
    integral = weighted_causal_integral_delta(Y, g, t, eta, method=integral_method)

    degenerate = [(X.ids[J.p], X.ids[J.q]) for J in cands if U(J.p) == U(J.q)]
    return ChainReport(
        s, t, delta, delta0, verdict.value, const, eta, v_s.cost, phi.value, integral.value,
        {Y.ids[y]: v for y, v in g.items()}, rhs, tol, degenerate,
        {
            "V_s_cover": v_s.to_dict(),
            "phi_cover": phi.to_dict(),
            "integral_cover": integral.to_dict(),
            "fiber_covers": {Y.ids[y]: c.to_dict() for y, c in fiber_covers.items()},
            "tlip_pair": list(verdict.witness),
        },
    )

