"""Dense two-phase simplex on equality standard form.

Solves  min c'x  s.t.  Ax = b, x >= 0  on a dense numpy tableau with
Bland's anti-cycling pivot rule.  Problem sizes here are at most a few
hundred basic variables, so a dense tableau is adequate and keeps the
package dependency-free beyond numpy.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InternalSolverError

FEAS_TOL = 1e-9
OPT_TOL = 1e-9
PIVOT_TOL = 1e-10

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


@dataclass
class CanonicalResult:
    status: str
    x: np.ndarray | None
    value: float | None
    # Multipliers of the equality rows (w.r.t. the rows as given);
    # y[i] prices row i so that reduced costs are c - A' y at optimality.
    multipliers: np.ndarray | None


def _pivot(tableau: np.ndarray, zrow: np.ndarray, row: int, col: int) -> None:
    piv = tableau[row, col]
    tableau[row] /= piv
    factors = tableau[:, col].copy()
    factors[row] = 0.0
    tableau -= np.outer(factors, tableau[row])
    zrow -= zrow[col] * tableau[row]


def _run_simplex(
    tableau: np.ndarray,
    zrow: np.ndarray,
    basis: np.ndarray,
    allowed: np.ndarray,
    max_iter: int,
) -> str:
    """Iterate to optimality with Bland's rule; mutates arguments."""
    m = tableau.shape[0]
    for _ in range(max_iter):
        candidates = np.nonzero((zrow[:-1] < -OPT_TOL) & allowed)[0]
        if candidates.size == 0:
            return OPTIMAL
        col = int(candidates[0])  # Bland: lowest eligible index enters
        ratios = np.full(m, np.inf)
        pos = tableau[:, col] > PIVOT_TOL
        ratios[pos] = tableau[pos, -1] / tableau[pos, col]
        best = ratios.min()
        if not np.isfinite(best):
            return UNBOUNDED
        ties = np.nonzero(ratios <= best + 1e-12)[0]
        row = int(ties[np.argmin(basis[ties])])  # Bland: lowest basic index leaves
        _pivot(tableau, zrow, row, col)
        basis[row] = col
        rhs = tableau[:, -1]
        rhs[(rhs < 0.0) & (rhs > -1e-11)] = 0.0
    raise InternalSolverError("simplex iteration limit exceeded")


def solve_canonical(c, a, b, max_iter: int | None = None) -> CanonicalResult:
    """Two-phase simplex for min c'x s.t. Ax = b, x >= 0."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float).copy()
    c = np.asarray(c, dtype=float)
    m, nv = a.shape
    if max_iter is None:
        max_iter = 2000 + 50 * (m + nv)

    signs = np.where(b < 0.0, -1.0, 1.0)
    a = a * signs[:, None]
    b = b * signs

    # Tableau columns: structural | artificial | rhs.
    tableau = np.zeros((m, nv + m + 1))
    tableau[:, :nv] = a
    tableau[:, nv : nv + m] = np.eye(m)
    tableau[:, -1] = b
    basis = np.arange(nv, nv + m)

    # Phase 1: minimize the sum of artificials.
    zrow = np.zeros(nv + m + 1)
    zrow[:nv] = -tableau[:, :nv].sum(axis=0)
    zrow[-1] = -tableau[:, -1].sum()
    allowed = np.ones(nv + m, dtype=bool)
    status = _run_simplex(tableau, zrow, basis, allowed, max_iter)
    if status != OPTIMAL:
        raise InternalSolverError("phase 1 terminated " + status)
    if -zrow[-1] > FEAS_TOL * (1.0 + abs(b).max(initial=0.0)):
        return CanonicalResult(INFEASIBLE, None, None, None)

    # Drive out any artificial still basic at zero level.
    for row in np.nonzero(basis >= nv)[0]:
        structural = np.nonzero(np.abs(tableau[row, :nv]) > PIVOT_TOL)[0]
        if structural.size:
            _pivot(tableau, zrow, int(row), int(structural[0]))
            basis[row] = int(structural[0])

    # Phase 2 objective row rebuilt from scratch; artificials stay priced at
    # zero but are barred from re-entering the basis.
    allowed[nv:] = False
    c_ext = np.zeros(nv + m)
    c_ext[:nv] = c
    zrow = np.concatenate([c_ext, [0.0]])
    zrow -= c_ext[basis] @ tableau
    status = _run_simplex(tableau, zrow, basis, allowed, max_iter)
    if status == UNBOUNDED:
        return CanonicalResult(UNBOUNDED, None, None, None)

    x = np.zeros(nv)
    in_struct = basis < nv
    x[basis[in_struct]] = tableau[in_struct, -1]
    # Reduced cost of artificial i is -y_i (its phase-2 cost is zero), and
    # row flips made for b >= 0 flip the corresponding multiplier back.
    y = -zrow[nv : nv + m] * signs
    return CanonicalResult(OPTIMAL, x, float(c @ x), y)
