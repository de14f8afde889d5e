"""Linear-programming path for price-of-anarchy computation and design.

Three programs live here, all built over the same index set of integer
tuples (a, x, b):

* the two-variable dual program valuing a fixed mechanism,
* the mechanism-design program over (f, mu) in n+1 unknowns,
* its shape-restricted variant for concave bases.

The fixed-mechanism program is solved exactly by minimizing the upper
envelope of its constraint lines over lambda (it has only two variables);
set POA_FORGE_LP_CHECK=1 to cross-check every envelope solve against the
simplex.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import InternalSolverError, InvalidParameterError
from .mechanisms import Mechanism, WelfareBasis, check_assumption, marginal_contribution
from . import simplex

BINDING_TOL = 1e-7


class IndexTuple(NamedTuple):
    a: int
    x: int
    b: int


def in_index_set(t: IndexTuple, n: int) -> bool:
    """Membership predicate for the constraint index set.

    Entries lie in [0, n], the sum is in [1, n], and either some entry is
    zero or the sum equals n.  The upper bound on the sum keeps every
    welfare/mechanism index within [0, n+1]; it is isolated here so the
    choice can be revisited in one place.
    """
    s = t.a + t.x + t.b
    if not (0 <= min(t) and max(t) <= n and 1 <= s <= n):
        return False
    return t.a * t.x * t.b == 0 or s == n


def enumerate_index_set(n: int) -> list[IndexTuple]:
    """All index tuples for class size n, lexicographically ordered."""
    if n < 1:
        raise InvalidParameterError("class size must be >= 1")
    out = []
    for a in range(n + 1):
        for x in range(n + 1 - a):
            for b in range(n + 1 - a - x):
                t = IndexTuple(a, x, b)
                if in_index_set(t, n):
                    out.append(t)
    return out


# ---------------------------------------------------------------------------
# Generic LP container and solver front-end
# ---------------------------------------------------------------------------

@dataclass
class LinearProgram:
    """min c'x subject to A x <= b, with per-variable lower bounds.

    ``lower_bounds[j]`` is None (free), 0 or 1.
    """

    c: np.ndarray
    a: np.ndarray
    b: np.ndarray
    lower_bounds: tuple[float | None, ...]

    def __post_init__(self):
        self.c = np.asarray(self.c, dtype=float)
        self.a = np.atleast_2d(np.asarray(self.a, dtype=float))
        self.b = np.asarray(self.b, dtype=float)
        m, nv = self.a.shape
        if self.c.shape != (nv,) or self.b.shape != (m,):
            raise InvalidParameterError("inconsistent LP dimensions")
        if len(self.lower_bounds) != nv:
            raise InvalidParameterError("one lower bound per variable required")
        if not (np.isfinite(self.a).all() and np.isfinite(self.b).all()
                and np.isfinite(self.c).all()):
            raise InvalidParameterError("LP data must be finite")


@dataclass
class LpSolution:
    status: str
    x: np.ndarray | None = None
    value: float | None = None


def _solve_primal(lp: LinearProgram) -> LpSolution:
    """Shift bounded variables, split free ones, add slacks, run simplex."""
    m, nv = lp.a.shape
    shift = np.array([lb if lb else 0.0 for lb in lp.lower_bounds])
    b = lp.b - lp.a @ shift
    cols, costs, mapping = [], [], []  # mapping: (var, sign)
    for j in range(nv):
        cols.append(lp.a[:, j])
        costs.append(lp.c[j])
        mapping.append((j, 1.0))
        if lp.lower_bounds[j] is None:
            cols.append(-lp.a[:, j])
            costs.append(-lp.c[j])
            mapping.append((j, -1.0))
    a_eq = np.column_stack(cols + [np.eye(m)[:, i] for i in range(m)])
    c_eq = np.array(costs + [0.0] * m)
    res = simplex.solve_canonical(c_eq, a_eq, b)
    if res.status != simplex.OPTIMAL:
        return LpSolution(res.status)
    x = shift.copy()
    for k, (j, sign) in enumerate(mapping):
        x[j] += sign * res.x[k]
    return LpSolution(simplex.OPTIMAL, x, float(lp.c @ x))


def _solve_via_dual(lp: LinearProgram) -> LpSolution:
    """Solve through the dual; the primal solution is read off the
    row multipliers.  Preferred when rows vastly outnumber variables,
    which keeps the tableau at (variables) x (rows) instead of
    (rows) x (rows)."""
    m, nv = lp.a.shape
    shift = np.array([lb if lb else 0.0 for lb in lp.lower_bounds])
    b = lp.b - lp.a @ shift
    free = [j for j in range(nv) if lp.lower_bounds[j] is None]
    # Dual rows, one per primal variable j: a_j' u  (= for free j, >= else)
    # with right-hand side -c_j, u >= 0.  Surplus columns turn >= into =.
    surplus_vars = [j for j in range(nv) if j not in free]
    a_rows = lp.a.T.copy()
    sur = np.zeros((nv, len(surplus_vars)))
    for k, j in enumerate(surplus_vars):
        sur[j, k] = -1.0
    a_eq = np.hstack([a_rows, sur])
    c_eq = np.concatenate([b, np.zeros(len(surplus_vars))])
    res = simplex.solve_canonical(c_eq, a_eq, -lp.c)
    if res.status == simplex.INFEASIBLE:
        return LpSolution(simplex.UNBOUNDED)
    if res.status == simplex.UNBOUNDED:
        return LpSolution(simplex.INFEASIBLE)
    x = shift + res.multipliers
    return LpSolution(simplex.OPTIMAL, x, float(lp.c @ x))


def solve_lp(lp: LinearProgram, route: str = "auto") -> LpSolution:
    """Solve a LinearProgram; statuses are returned, never raised."""
    m, nv = lp.a.shape
    if route == "auto":
        route = "dual" if m > 4 * nv else "primal"
    if route == "primal":
        return _solve_primal(lp)
    if route == "dual":
        return _solve_via_dual(lp)
    raise InvalidParameterError(f"unknown route {route!r}")


def dump_lp(lp: LinearProgram) -> str:
    """Plain-text tableau: one constraint per line, 12 significant digits."""
    out = [
        "# LP tableau: minimize c'x subject to rows (coeffs <= rhs)",
        "# bounds line: per-variable lower bound, '-' = free",
        f"vars {lp.a.shape[1]} rows {lp.a.shape[0]}",
        "c " + " ".join(f"{v:.12g}" for v in lp.c),
        "bounds " + " ".join("-" if lb is None else f"{lb:g}" for lb in lp.lower_bounds),
    ]
    for row, rhs in zip(lp.a, lp.b):
        out.append(" ".join(f"{v:.12g}" for v in row) + f" <= {rhs:.12g}")
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# Price-of-anarchy reports
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PoaReport:
    """Price of anarchy with its optimality certificate.

    ``binding`` holds the tight-constraint identifiers: (a, x, b) tuples
    for the LP path, (l, j) or (term, j) argmax labels for closed forms.
    """

    poa: float
    w_star: float
    lambda_star: float | None
    mu_star: float
    binding: tuple
    method: str

    def to_dict(self) -> dict:
        def clean(v):
            if v is None or (isinstance(v, float) and not math.isfinite(v)):
                return None
            return v

        return {
            "poa": self.poa,
            "w_star": clean(self.w_star),
            "lambda_star": clean(self.lambda_star),
            "mu_star": clean(self.mu_star),
            "binding": [list(t) for t in self.binding],
            "method": self.method,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def _degenerate_report() -> PoaReport:
    return PoaReport(0.0, math.inf, None, math.inf, (), "lp")


def _check_sizes(f: Mechanism, w: WelfareBasis, n: int) -> None:
    if w.n != n or f.n != n:
        raise InvalidParameterError(
            f"basis/mechanism must be defined on [1, {n}]; got w.n={w.n}, f.n={f.n}"
        )


def _upper_envelope_min(slopes, intercepts, lam_lo: float) -> float:
    """Arg-min over lam >= lam_lo of max_i(intercepts_i + lam*slopes_i).

    Builds the upper envelope with the convex-hull trick; returns the
    leftmost minimizer (the envelope is convex, so the minimum sits where
    the slope turns non-negative).
    """
    order = np.lexsort((intercepts, slopes))
    lines: list[tuple[float, float]] = []
    for k in order:
        s, t = float(slopes[k]), float(intercepts[k])
        if lines and lines[-1][0] == s:  # parallel: keep the higher one
            if lines[-1][1] >= t:
                continue
            lines.pop()
        while len(lines) >= 2:
            s1, t1 = lines[-2]
            s2, t2 = lines[-1]
            # middle line is below the crossing of its neighbours -> drop
            if (t - t2) * (s2 - s1) >= (t2 - t1) * (s - s2):
                lines.pop()
            else:
                break
        lines.append((s, t))
    # Walk to the first segment with non-negative slope.
    k = 0
    while k < len(lines) and lines[k][0] < 0.0:
        k += 1
    if k == 0:
        return lam_lo
    if k == len(lines):  # envelope decreasing forever: minimized at +inf
        return math.inf
    s1, t1 = lines[k - 1]
    s2, t2 = lines[k]
    return max(lam_lo, (t1 - t2) / (s2 - s1))


def build_dual_lp(f: Mechanism, w: WelfareBasis, n: int) -> LinearProgram:
    """The fixed-mechanism program over variables (lambda, mu)."""
    tuples = enumerate_index_set(n)
    rows = np.zeros((len(tuples), 2))
    rhs = np.zeros(len(tuples))
    for i, (a, x, b) in enumerate(tuples):
        rows[i, 0] = a * f(a + x) - b * f(a + x + 1)
        rows[i, 1] = -w(a + x)
        rhs[i] = -w(b + x)
    return LinearProgram(np.array([0.0, 1.0]), rows, rhs, (0.0, None))


def poa_dual_lp(
    f: Mechanism, w: WelfareBasis, n: int, cross_check: bool | None = None
) -> PoaReport:
    """Exact price of anarchy of a fixed mechanism on the class (w, n).

    Returns poa = 0 for the degenerate f(1) <= 0 case; otherwise minimizes
    mu over the constraint set, returning poa = 1/mu* with the multiplier
    lambda* and the tight tuples.
    """
    _check_sizes(f, w, n)
    if f(1) <= 0.0:
        return _degenerate_report()
    if cross_check is None:
        cross_check = os.environ.get("POA_FORGE_LP_CHECK", "") not in ("", "0")

    tuples = enumerate_index_set(n)
    lam_lo = 0.0
    slopes, intercepts = [], []
    for a, x, b in tuples:
        wa = w(a + x)
        coef = a * f(a + x) - b * f(a + x + 1)
        if wa == 0.0:  # a + x == 0: pure lower bound on lambda
            lam_lo = max(lam_lo, w(b + x) / (b * f(1)))
        else:
            slopes.append(coef / wa)
            intercepts.append(w(b + x) / wa)
    lam = _upper_envelope_min(np.array(slopes), np.array(intercepts), lam_lo)
    if not math.isfinite(lam):
        raise InternalSolverError("fixed-mechanism program is unbounded")
    w_star = float(np.max(np.array(intercepts) + lam * np.array(slopes)))

    if cross_check:
        sol = solve_lp(build_dual_lp(f, w, n), route="primal")
        if sol.status != simplex.OPTIMAL or abs(sol.value - w_star) > 1e-7:
            raise InternalSolverError(
                f"envelope/simplex disagreement: {w_star} vs {sol}"
            )

    binding = tuple(
        t for t in tuples
        if abs(w(t.b + t.x) - w_star * w(t.a + t.x)
               + lam * (t.a * f(t.a + t.x) - t.b * f(t.a + t.x + 1))) <= BINDING_TOL
    )
    return PoaReport(1.0 / w_star, w_star, lam, w_star, binding, "lp")


def build_design_lp(w: WelfareBasis, n: int) -> LinearProgram:
    """Mechanism-design program over variables (f(1..n), mu)."""
    tuples = enumerate_index_set(n)
    rows = np.zeros((len(tuples), n + 1))
    rhs = np.zeros(len(tuples))
    for i, (a, x, b) in enumerate(tuples):
        if 1 <= a + x <= n:
            rows[i, a + x - 1] += a
        if 1 <= a + x + 1 <= n:
            rows[i, a + x] -= b
        rows[i, n] = -w(a + x)
        rhs[i] = -w(b + x)
    c = np.zeros(n + 1)
    c[n] = 1.0
    bounds = (1.0,) + (None,) * n
    return LinearProgram(c, rows, rhs, bounds)


def _design_report(
    lp: LinearProgram, sol: LpSolution, n: int, label: str
) -> tuple[Mechanism, PoaReport]:
    if sol.status != simplex.OPTIMAL:
        raise InternalSolverError(f"design program terminated {sol.status}")
    f_star = Mechanism(n, tuple(sol.x[:n]), label)
    mu = float(sol.x[n])
    residuals = lp.a @ sol.x - lp.b
    binding = tuple(
        IndexTuple(*t) for t, r in zip(enumerate_index_set(n), residuals)
        if abs(r) <= BINDING_TOL
    )
    return f_star, PoaReport(1.0 / mu, mu, None, mu, binding, "lp")


def design_optimal_mechanism(w: WelfareBasis, n: int) -> tuple[Mechanism, PoaReport]:
    """Mechanism maximizing the price of anarchy on the class (w, n)."""
    if w.n != n:
        raise InvalidParameterError("basis must be defined on [1, n]")
    lp = build_design_lp(w, n)
    return _design_report(lp, solve_lp(lp), n, "optimal")


def build_design_lp_submodular(w: WelfareBasis, n: int) -> LinearProgram:
    """Shape-restricted design program for concave non-decreasing bases.

    Constraints are generated in the split form (j + l <= n and j + l >= n)
    over l <= j, with the admissible set restricted to mechanisms that are
    non-increasing and dominate the marginal contribution.
    """
    f_mc = marginal_contribution(w)
    rows, rhs = [], []
    for j in range(1, n + 1):
        for l in range(0, j + 1):
            if 1 <= j + l <= n:
                row = np.zeros(n + 1)
                row[j - 1] += j
                if l and j + 1 <= n:
                    row[j] -= l
                row[n] = -w(j)
                rows.append(row)
                rhs.append(-w(l))
            if j + l >= n:
                row = np.zeros(n + 1)
                row[j - 1] += n - l
                if j + 1 <= n:
                    row[j] -= n - j
                row[n] = -w(j)
                rows.append(row)
                rhs.append(-w(l))
    for j in range(1, n + 1):  # f(j) >= f_MC(j)
        row = np.zeros(n + 1)
        row[j - 1] = -1.0
        rows.append(row)
        rhs.append(-f_mc(j))
    for j in range(1, n + 1):  # f(j+1) <= f(j), with f(n+1) = 0
        row = np.zeros(n + 1)
        row[j - 1] = -1.0
        if j + 1 <= n:
            row[j] = 1.0
        rows.append(row)
        rhs.append(0.0)
    c = np.zeros(n + 1)
    c[n] = 1.0
    return LinearProgram(c, np.array(rows), np.array(rhs), (1.0,) + (None,) * n)


def design_optimal_mechanism_submodular(
    w: WelfareBasis, n: int
) -> tuple[Mechanism, PoaReport]:
    """Best mechanism among the non-increasing ones dominating f_MC."""
    if w.n != n:
        raise InvalidParameterError("basis must be defined on [1, n]")
    ok, bad = check_assumption(w, "submodular")
    if not ok:
        raise InvalidParameterError(
            f"basis is not non-decreasing concave (violations at {bad})"
        )
    lp = build_design_lp_submodular(w, n)
    sol = solve_lp(lp)
    if sol.status != simplex.OPTIMAL:
        raise InternalSolverError(f"design program terminated {sol.status}")
    f_star = Mechanism(n, tuple(sol.x[:n]), "optimal_submodular")
    mu = float(sol.x[n])
    return f_star, PoaReport(1.0 / mu, mu, None, mu, (), "lp")
