"""Small covering linear programs in exact rational arithmetic.

The programs have the form::

    minimise   c . a
    subject to M a >= f,  a >= 0

with ``M`` a 0/1 membership matrix (rows: support points, columns:
candidate diamonds) and ``c >= 0``. Floats enter as exact fractions, so
results are exact for the given binary inputs and converted back to float
once at the end.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import InputError, SizeError

VERTEX_ROW_LIMIT = 8
VERTEX_COL_LIMIT = 16


@dataclass(frozen=True)
class LPResult:
    value: float
    weights: tuple[float, ...]
    exact_value: Fraction | None
    status: str  # "optimal" | "infeasible"


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float) and not math.isfinite(x):
        raise InputError("LP data must be finite")
    return Fraction(x)


def simplex_max(c, A, b):
    """Maximise ``c.y`` s.t. ``A y <= b``, ``y >= 0`` with ``b >= 0``.

    Dense tableau, slack start basis, Bland's rule (no cycling). Returns
    ``(status, value, y, duals)`` where ``duals`` are the optimal
    multipliers of the ``<=`` rows (``status`` is ``optimal`` or
    ``unbounded``).
    """
    m, n = len(A), len(c)
    c = [_frac(v) for v in c]
    b = [_frac(v) for v in b]
    if any(v < 0 for v in b):
        raise InputError("simplex_max needs b >= 0")
    # rows: [A | I | b]; objective row holds reduced costs (c_j - z_j)
    T = [[_frac(A[i][j]) for j in range(n)] + [Fraction(int(i == k)) for k in range(m)] + [b[i]]
         for i in range(m)]
    obj = c + [Fraction(0)] * m + [Fraction(0)]
    basis = [n + i for i in range(m)]
    while True:
        enter = next((j for j in range(n + m) if obj[j] > 0), None)
        if enter is None:
            break
        best, leave = None, None
        for i in range(m):
            a = T[i][enter]
            if a > 0:
                ratio = T[i][-1] / a
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    best, leave = ratio, i
        if leave is None:
            return "unbounded", None, None, None
        piv = T[leave][enter]
        row = [v / piv for v in T[leave]]
        T[leave] = row
        for i in range(m):
            if i != leave and T[i][enter] != 0:
                f = T[i][enter]
                T[i] = [u - f * v for u, v in zip(T[i], row)]
        if obj[enter] != 0:
            f = obj[enter]
            obj = [u - f * v for u, v in zip(obj, row)]
        basis[leave] = enter
    y = [Fraction(0)] * n
    for i, var in enumerate(basis):
        if var < n:
            y[var] = T[i][-1]
    value = -obj[-1]
    duals = [-obj[n + i] for i in range(m)]
    return "optimal", value, y, duals


def covering_lp(M, costs, demand) -> LPResult:
    """Solve the covering LP through its dual packing program.

    The dual ``max f.y  s.t.  M^T y <= c, y >= 0`` starts feasible at
    ``y = 0`` because ``c >= 0``. Its optimal multipliers are the primal
    weights; an unbounded dual means no feasible cover (value ``inf``).
    """
    m = len(demand)
    n = len(costs)
    if m == 0:
        return LPResult(0.0, tuple(0.0 for _ in range(n)), Fraction(0), "optimal")
    At = [[M[i][j] for i in range(m)] for j in range(n)]
    status, value, _, duals = simplex_max(demand, At, costs)
    if status == "unbounded":
        return LPResult(math.inf, (), None, "infeasible")
    return LPResult(float(value), tuple(float(w) for w in duals), value, "optimal")


def _solve_square(A, b):
    """Gaussian elimination over fractions; ``None`` if singular."""
    k = len(A)
    T = [list(A[i]) + [b[i]] for i in range(k)]
    for col in range(k):
        piv = next((r for r in range(col, k) if T[r][col] != 0), None)
        if piv is None:
            return None
        T[col], T[piv] = T[piv], T[col]
        p = T[col][col]
        T[col] = [v / p for v in T[col]]
        for r in range(k):
            if r != col and T[r][col] != 0:
                f = T[r][col]
                T[r] = [u - f * v for u, v in zip(T[r], T[col])]
    return [T[i][-1] for i in range(k)]


def covering_lp_vertices(M, costs, demand, row_limit: int = VERTEX_ROW_LIMIT,
                         col_limit: int = VERTEX_COL_LIMIT) -> LPResult:
    """Solve the covering LP by enumerating basic feasible solutions.

    Every vertex of ``{a >= 0, M a >= f}`` has a support ``B`` of columns
    and an equal-size set ``R`` of tight rows with ``M[R,B]`` nonsingular.
    Feasible sets are nonempty polyhedra in the nonnegative orthant, so the
    minimum of a nonnegative cost is attained at such a vertex.
    """
    m, n = len(demand), len(costs)
    if m > row_limit or n > col_limit:
        raise SizeError(f"vertex enumeration limited to {row_limit} rows / {col_limit} columns")
    Mf = [[_frac(M[i][j]) for j in range(n)] for i in range(m)]
    cf = [_frac(v) for v in costs]
    ff = [_frac(v) for v in demand]
    best, best_a = None, None
    if all(v <= 0 for v in ff):
        return LPResult(0.0, tuple(0.0 for _ in range(n)), Fraction(0), "optimal")
    for k in range(1, min(m, n) + 1):
        for B in itertools.combinations(range(n), k):
            for R in itertools.combinations(range(m), k):
                sub = [[Mf[r][j] for j in B] for r in R]
                sol = _solve_square(sub, [ff[r] for r in R])
                if sol is None or any(v < 0 for v in sol):
                    continue
                a = [Fraction(0)] * n
                for j, v in zip(B, sol):
                    a[j] = v
                if any(sum(Mf[i][j] * a[j] for j in range(n)) < ff[i] for i in range(m)):
                    continue
                val = sum(cf[j] * a[j] for j in range(n))
                if best is None or val < best:
                    best, best_a = val, a
    if best is None:
        return LPResult(math.inf, (), None, "infeasible")
    return LPResult(float(best), tuple(float(v) for v in best_a), best, "optimal")
