"""Lorentzian pre-length spaces: the abstract interface and axiom checks.

A space answers four queries on pairs of points: the background metric
``d``, the causal relation ``<=``, the chronological relation ``<<`` and the
time separation ``tau``. Finite spaces (:class:`lcoarea.backends.CausalSet`)
index points by integers; the analytic Minkowski backend uses coordinate
vectors.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import InputError

ALL = None

AXIOM_ORDER = (
    "le_reflexive",
    "le_transitive",
    "ll_transitive",
    "ll_subset_le",
    "tau_nonnegative",
    "tau_positive_iff_ll",
    "tau_zero_off_le",
    "reverse_triangle",
    "metric_identity",
    "metric_symmetry",
    "metric_triangle",
    "ll_irreflexive",
    "le_antisymmetric",
)


@dataclass(frozen=True)
class PointRef:
    id: str
    coords: tuple[float, ...] | None = None


class PreLengthSpace(ABC):
    """Queryable oracle for ``(d, <=, <<, tau)``.

    Instances are immutable after construction.
    """

    backend: str = "abstract"
    finite: bool = False

    @abstractmethod
    def causal(self, x, y) -> bool: ...

    @abstractmethod
    def chronological(self, x, y) -> bool: ...

    @abstractmethod
    def time_separation(self, x, y) -> float: ...

    @abstractmethod
    def distance(self, x, y) -> float: ...


@dataclass(frozen=True)
class CausalDiamond:
    """``J(p,q)`` (or ``I(p,q)`` when ``chronological``) in a finite space.

    ``diam`` is always the diameter of the causal diamond ``J(p,q)``; for a
    chronological diamond this is the diameter of its closure.
    """

    p: int
    q: int
    tau: float
    diam: float
    members: tuple[int, ...]
    label: tuple[str, str] = ("", "")
    chronological: bool = False

    @property
    def empty(self) -> bool:
        return not self.members

    @property
    def null(self) -> bool:
        return not self.empty and self.tau == 0.0

    def contains(self, x: int) -> bool:
        return x in self.members

    def mask(self, n: int) -> np.ndarray:
        m = np.zeros(n, dtype=bool)
        m[list(self.members)] = True
        return m

    def to_dict(self) -> dict:
        return {
            "p": self.label[0],
            "q": self.label[1],
            "kind": "I" if self.chronological else "J",
            "tau": self.tau,
            "diam": self.diam,
            "members": len(self.members),
        }


@dataclass(frozen=True)
class AxiomCheck:
    name: str
    passed: bool
    witness: tuple = ()


@dataclass(frozen=True)
class AxiomReport:
    checks: tuple[AxiomCheck, ...]
    causality_class: str
    n_points: int = 0
    tolerance: float = 1e-9

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def check(self, name: str) -> AxiomCheck:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def failures(self) -> list[AxiomCheck]:
        return [c for c in self.checks if not c.passed]

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "causality_class": self.causality_class,
            "n_points": self.n_points,
            "tolerance": self.tolerance,
            "checks": [
                {"axiom": c.name, "passed": c.passed, "witness": list(c.witness)}
                for c in self.checks
            ],
        }


def _first_pair(mask):
    if not mask.any():
        return None
    return divmod(int(np.argmax(mask)), mask.shape[1])


def _table_report(ids, le, ll, tau, dist, tol) -> AxiomReport:
    n = len(ids)
    eye = np.eye(n, dtype=bool)
    wit: dict[str, tuple] = {}

    def pair(name, mask):
        hit = _first_pair(mask)
        wit[name] = () if hit is None else (ids[hit[0]], ids[hit[1]])

    def single(name, mask):
        hit = np.flatnonzero(mask)
        wit[name] = () if hit.size == 0 else (ids[int(hit[0])],)

    single("le_reflexive", ~np.diag(le))
    pair("ll_subset_le", ll & ~le)
    pair("tau_nonnegative", ~(tau >= 0))
    pair("tau_positive_iff_ll", (tau > 0) != ll)
    pair("tau_zero_off_le", ~le & (tau != 0))
    pair("metric_identity", (dist == 0) != eye)
    sym = np.abs(dist - dist.T) > tol * np.maximum(1.0, np.abs(dist))
    pair("metric_symmetry", sym | ~(dist >= 0))
    single("ll_irreflexive", np.diag(ll))
    pair("le_antisymmetric", le & le.T & ~eye)

    safe_tau = np.where(np.isnan(tau), 0.0, tau)
    triples = kernels.axiom_triple_scan(
        np.ascontiguousarray(le), np.ascontiguousarray(ll),
        np.ascontiguousarray(safe_tau), np.ascontiguousarray(dist), float(tol),
    )
    for k, name in enumerate(("le_transitive", "ll_transitive", "reverse_triangle", "metric_triangle")):
        w = triples[k]
        wit[name] = () if w[0] < 0 else tuple(ids[int(i)] for i in w)

    checks = tuple(AxiomCheck(name, not wit[name], wit[name]) for name in AXIOM_ORDER)
    chronological = not wit["ll_irreflexive"]
    if chronological and not wit["le_antisymmetric"]:
        cls = "causal"
    elif chronological:
        cls = "chronological"
    else:
        cls = "none"
    return AxiomReport(checks, cls, n, tol)


def verify_axioms(space: PreLengthSpace, sample=ALL, tol: float = 1e-9) -> AxiomReport:
    """Check every pre-length axiom on all pairs/triples of ``sample``.

    Finite spaces accept ``ALL`` (every point) or a list of indices or ids.
    Analytic spaces need an explicit list of coordinate vectors; they are
    checked through the induced finite table.
    """
    if space.finite:
        if sample is ALL:
            idx = np.arange(space.n)
        else:
            idx = np.asarray([space.resolve(x) for x in sample], dtype=np.int64)
        sub = np.ix_(idx, idx)
        ids = [space.ids[i] for i in idx]
        return _table_report(ids, space.le[sub], space.ll[sub], space.tau[sub], space.dist[sub], tol)
    if sample is ALL:
        raise InputError("analytic backends need an explicit finite sample")
    induced = space.induced(sample)
    return _table_report(list(induced.ids), induced.le, induced.ll, induced.tau, induced.dist, tol)


def diamond_members(space: PreLengthSpace, p, q):
    """``J(p,q) = J+(p) ∩ J-(q)``; empty when ``p`` does not precede ``q``."""
    return space.diamond(p, q)
