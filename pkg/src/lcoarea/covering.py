"""Enlargements, Vitali-type disjoint selection and chronological fattening.

Everything here works with analytic :class:`MinkowskiDiamond` objects.
Disjointness of diamonds is decided exactly in 1+1 dimensions (diamonds
are rectangles in null coordinates); other claims are also checked on
seeded random witnesses.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .backends import MinkowskiDiamond
from .errors import InfeasibleError, InputError, InvariantError, UnsupportedError

DEFAULT_MARGIN = 3.0


@dataclass(frozen=True)
class Enlargement:
    original: MinkowskiDiamond
    enlarged: MinkowskiDiamond

    @property
    def achieved_C1(self) -> float:
        return self.enlarged.diam / self.original.diam

    @property
    def achieved_C2(self) -> float:
        return self.enlarged.tau / self.original.tau

    def to_dict(self) -> dict:
        return {"original": self.original.to_dict(), "enlarged": self.enlarged.to_dict(),
                "C1": self.achieved_C1, "C2": self.achieved_C2}


def _shift_time(x, h):
    x = list(x)
    x[0] += h
    return tuple(x)


def enlarge_minkowski(J: MinkowskiDiamond, margin: float = DEFAULT_MARGIN) -> Enlargement:
    """Push both vertices ``margin * diam(J)`` along the time axis.

    Every point within Euclidean distance ``2 diam(J)`` of ``J`` then lies in
    the enlarged diamond, so every diamond of diameter at most
    ``2 diam(J)`` that meets ``J`` is contained in it.
    """
    if margin < DEFAULT_MARGIN:
        raise InputError(f"margin must be >= {DEFAULT_MARGIN}")
    if not J.timelike:
        raise UnsupportedError("enlargement needs p << q (tau ratio undefined for null pairs)")
    D = J.diam
    return Enlargement(J, MinkowskiDiamond(_shift_time(J.p, -margin * D), _shift_time(J.q, margin * D)))


def random_witness_diamonds(J: MinkowskiDiamond, rng: np.random.Generator, k: int,
                            max_diam: float) -> list[MinkowskiDiamond]:
    """Random diamonds of diameter ``<= max_diam`` through points of ``J``."""
    x = J.sample(rng, k)
    n = J.dim

    def causal_vectors(size):
        v = rng.normal(size=(size, n))
        v[:, 0] = np.abs(v[:, 0])
        r = np.linalg.norm(v[:, 1:], axis=1)
        v[:, 0] = np.maximum(v[:, 0], r) * rng.uniform(1.0, 2.0, size)
        return v * rng.uniform(0.0, 1.0, size)[:, None]

    u, w = causal_vectors(k), causal_vectors(k)
    span = np.linalg.norm(u + w, axis=1)
    scale = np.where(span > 0, max_diam * rng.uniform(0.0, 1.0, k) / np.maximum(span, 1e-300), 0.0)
    u *= scale[:, None]
    w *= scale[:, None]
    return [MinkowskiDiamond(tuple(a), tuple(b)) for a, b in zip(x - u, x + w)]


def check_enlargement(E: Enlargement, rng: np.random.Generator, samples: int = 10_000) -> list:
    """Witness diamonds (diam <= 2 diam J, meeting J) not inside the enlargement."""
    wit = random_witness_diamonds(E.original, rng, samples, 2.0 * E.original.diam)
    return [K for K in wit if K.diam <= 2.0 * E.original.diam and not E.enlarged.contains_diamond(K)]


# --------------------------------------------------------------------------
# Vitali selection
# --------------------------------------------------------------------------

@dataclass
class VitaliCertificate:
    family: list
    selected: list  # indices into family, in selection order
    assignment: list  # family index -> selected family index
    enlargements: dict  # selected index -> Enlargement
    classes: list  # family index -> dyadic class
    checks: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(v == 0 for v in self.checks.values())

    def to_dict(self) -> dict:
        return {
            "n_family": len(self.family),
            "selected": list(self.selected),
            "assignment": list(self.assignment),
            "classes": list(self.classes),
            "selected_diamonds": [self.family[i].to_dict() for i in self.selected],
            "enlargements": [self.enlargements[i].to_dict() for i in self.selected],
            "failures": dict(self.checks),
            "passed": self.passed,
        }


def _dyadic_class(d: float, R: float) -> int:
    """``j >= 1`` with ``R / 2**j < d <= R / 2**(j-1)``."""
    j = 1
    while d <= R / 2 ** j:
        j += 1
    return j


def vitali_select(E, kappa, bound: float | None = None, enlarger=enlarge_minkowski,
                  margin: float = DEFAULT_MARGIN) -> VitaliCertificate:
    """Greedy maximal disjoint subfamily over dyadic diameter classes.

    Preconditions, checked in this order: every diamond has ``p << q``;
    every diamond meets ``E``; ``E`` is covered by the family; all diameters
    are below ``bound`` when one is given. ``E`` is an array of coordinate
    rows. Within a class diamonds are tried by descending diameter, then
    family index.
    """
    E = np.atleast_2d(np.asarray(E, dtype=float))
    kappa = list(kappa)
    if not kappa:
        raise InputError("family is empty")
    if any(J.dim != 2 for J in kappa):
        raise UnsupportedError("exact disjointness needs 1+1 dimensions")
    for i, J in enumerate(kappa):
        if not J.timelike:
            raise InputError(f"clause (1) violated: diamond {i} does not satisfy p << q")
    inside = np.array([J.contains(E) for J in kappa])  # (family, points)
    for i in range(len(kappa)):
        if not inside[i].any():
            raise InputError(f"clause (meets E) violated: diamond {i} misses E")
    if E.size and not inside.any(axis=0).all():
        k = int(np.argmin(inside.any(axis=0)))
        raise InputError(f"clause (covers E) violated: point {k} lies in no diamond")
    diams = [J.diam for J in kappa]
    R = max(diams)
    if bound is not None and not R < bound:
        raise InputError(f"clause (bounded diameter) violated: sup diam {R} >= {bound}")

    classes = [_dyadic_class(d, R) for d in diams]
    order = sorted(range(len(kappa)), key=lambda i: (classes[i], -diams[i], i))
    selected: list[int] = []
    for i in order:
        if all(not kappa[i].intersects(kappa[j]) for j in selected):
            selected.append(i)

    assignment = []
    for i, J in enumerate(kappa):
        match = next((j for j in selected
                      if J.intersects(kappa[j]) and diams[i] <= 2.0 * diams[j]), None)
        if match is None:
            raise InvariantError(f"diamond {i} has no admissible selected partner")
        assignment.append(match)
    enl = {j: enlarger(kappa[j], margin) for j in selected}
    cert = VitaliCertificate(kappa, selected, assignment, enl, classes)
    covered = np.zeros(len(E), dtype=bool)
    for j in selected:
        covered |= enl[j].enlarged.contains(E)
    if not covered.all():
        raise InvariantError("points of E outside every enlargement")
    return cert


def verify_certificate(cert: VitaliCertificate, E, rng: np.random.Generator,
                       samples: int = 10_000) -> dict:
    """Recheck a certificate independently; returns failure counts per check.

    ``disjoint_exact``: pairs of selected diamonds whose null boxes overlap.
    ``disjoint_sampled``: sampled points of a selected diamond inside another.
    ``coverage``: points of ``E`` outside every enlargement.
    ``assignment``: partners violating meet / diameter-ratio / containment.
    ``enlargement``: sampled witness diamonds escaping an enlargement.
    """
    E = np.atleast_2d(np.asarray(E, dtype=float))
    fam, sel = cert.family, cert.selected
    out = {"disjoint_exact": 0, "disjoint_sampled": 0, "coverage": 0, "assignment": 0, "enlargement": 0}
    for a in range(len(sel)):
        for b in range(a + 1, len(sel)):
            if fam[sel[a]].intersects(fam[sel[b]]):
                out["disjoint_exact"] += 1
    per = max(1, samples // max(1, len(sel)))
    for j in sel:
        pts = fam[j].sample(rng, per)
        for k in sel:
            if k != j:
                out["disjoint_sampled"] += int(fam[k].contains_strict(pts).sum())
    covered = np.zeros(len(E), dtype=bool)
    for j in sel:
        covered |= cert.enlargements[j].enlarged.contains(E)
    out["coverage"] = int((~covered).sum())
    for i, j in enumerate(cert.assignment):
        J, K = fam[i], fam[j]
        if not (J.intersects(K) and J.diam <= 2.0 * K.diam and cert.enlargements[j].enlarged.contains_diamond(J)):
            out["assignment"] += 1
    per = max(1, samples // max(1, len(sel)))
    for j in sel:
        out["enlargement"] += len(check_enlargement(cert.enlargements[j], rng, per))
    cert.checks = out
    return out


def finite_exclusion_failures(cert: VitaliCertificate, E, K) -> list[int]:
    """Points of ``E`` outside ``(∪K) ∪ (∪ enlargements of selected ∖ K)``.

    ``K`` is a set of selected family indices.
    """
    E = np.atleast_2d(np.asarray(E, dtype=float))
    K = set(K)
    ok = np.zeros(len(E), dtype=bool)
    for j in cert.selected:
        D = cert.family[j] if j in K else cert.enlargements[j].enlarged
        ok |= D.contains(E)
    return [int(i) for i in np.flatnonzero(~ok)]


# --------------------------------------------------------------------------
# Random families
# --------------------------------------------------------------------------

def _diamond_through(x, diam, ecc, theta, direction):
    """1+1 diamond through ``x`` with given diameter and eccentricity."""
    beta = math.sqrt(max(0.0, (ecc * ecc - 1.0) / (ecc * ecc + 1.0))) * direction
    v = np.array([1.0, beta]) * diam / math.sqrt(1.0 + beta * beta)
    return MinkowskiDiamond(tuple(x - theta * v), tuple(x + (1.0 - theta) * v))


def random_family(rng: np.random.Generator, E, n: int, ecc_max: float = 3.0,
                  diam_range=(0.05, 0.4)) -> list[MinkowskiDiamond]:
    """``n`` timelike 1+1 diamonds, each through a point of ``E``.

    The first ``len(E)`` diamonds pass through the points of ``E`` in order,
    so the family covers ``E``. Eccentricities are uniform in
    ``[1, ecc_max]``.
    """
    E = np.atleast_2d(np.asarray(E, dtype=float))
    if ecc_max < 1:
        raise InputError("eccentricity cap must be >= 1")
    if len(E) == 0 or n < len(E):
        raise InputError("need 1 <= len(E) <= n")
    out = []
    for k in range(n):
        x = E[k] if k < len(E) else E[rng.integers(len(E))]
        d = rng.uniform(*diam_range)
        e = rng.uniform(1.0, ecc_max)
        out.append(_diamond_through(x, d, e, rng.uniform(0.05, 0.95), rng.choice([-1.0, 1.0])))
    return out


def fine_family(rng: np.random.Generator, E, levels: int = 8, base: float = 0.2) -> list[MinkowskiDiamond]:
    """Diamonds around every point of ``E`` at scales ``base * 2**-k``.

    A finite stand-in for a fine cover: each point has diamonds down to
    diameter ``base * 2**-(levels-1)``.
    """
    E = np.atleast_2d(np.asarray(E, dtype=float))
    out = []
    for x in E:
        for k in range(levels):
            out.append(_diamond_through(x, base * 2.0 ** -k, rng.uniform(1.0, 2.0),
                                        rng.uniform(0.3, 0.7), rng.choice([-1.0, 1.0])))
    return out


def sample_points(rng: np.random.Generator, region: MinkowskiDiamond, m: int) -> np.ndarray:
    return region.sample(rng, m)


# --------------------------------------------------------------------------
# Chronological estimation
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class ChronologicalEstimate:
    original: MinkowskiDiamond
    diamond: MinkowskiDiamond  # vertices of I(p~, q~)
    h: float

    @property
    def tau(self) -> float:
        return self.diamond.tau

    @property
    def diam(self) -> float:
        """Diameter of the closure ``J(p~, q~)``."""
        return self.diamond.diam

    def to_dict(self) -> dict:
        return {"original": self.original.to_dict(), "I": self.diamond.to_dict(), "h": self.h}


def chronological_estimation(J: MinkowskiDiamond, eps1: float, eps2: float) -> ChronologicalEstimate:
    """Fatten ``J(p,q)`` to ``I(p - h e0, q + h e0)`` with the largest ``h``
    keeping ``diam <= eps1 * diam(J)`` and ``tau <= tau(J) + eps2``."""
    if not eps1 > 1:
        raise InputError("eps1 must exceed 1")
    if not eps2 > 0:
        raise InputError("eps2 must be positive")
    if J.empty:
        raise InputError("J(p,q) is empty")
    d = np.subtract(J.q, J.p)
    T = float(d[0])
    W2 = float(np.sum(d[1:] ** 2))
    D = J.diam
    tau = J.tau
    h_tau = (math.sqrt((tau + eps2) ** 2 + W2) - T) / 2.0
    cap = (eps1 * D) ** 2 - W2
    h_diam = (math.sqrt(cap) - T) / 2.0 if cap > 0 else -math.inf
    h = min(h_tau, h_diam)
    if not h > 0:
        raise InfeasibleError(f"no admissible h (tau bound {h_tau}, diameter bound {h_diam})")
    I = MinkowskiDiamond(_shift_time(J.p, -h), _shift_time(J.q, h))
    return ChronologicalEstimate(J, I, h)

