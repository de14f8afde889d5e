"""Closed-form price-of-anarchy expressions.

Each expression is an exhaustive scan over O(n) or O(n^2) candidates; the
validity preconditions are enforced as hard errors because applying a
closed form outside its domain would silently return garbage.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import InvalidParameterError, PreconditionError
from .lp import PoaReport
from .mechanisms import (
    Mechanism,
    SHAPE_TOL,
    WelfareBasis,
    check_assumption,
    curvature,
    marginal_contribution,
)


def _check_sizes(f: Mechanism | None, w: WelfareBasis | None, n: int) -> None:
    if w is not None and w.n != n:
        raise InvalidParameterError(f"basis defined on [1, {w.n}], expected [1, {n}]")
    if f is not None and f.n != n:
        raise InvalidParameterError(f"mechanism defined on [1, {f.n}], expected [1, {n}]")


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise PreconditionError(message)


def _require_concave(w: WelfareBasis) -> None:
    ok, bad = check_assumption(w, "submodular")
    _require(ok, f"basis is not non-decreasing concave (violations at j={bad})")


@dataclass(frozen=True)
class BetaProfile:
    """beta(j) = (j/(j+1)) * (w(j+1)/w(j)); beta(n) = 0 via the boundary."""

    n: int
    values: tuple[float, ...]


def beta_profile(w: WelfareBasis) -> BetaProfile:
    return BetaProfile(
        w.n, tuple((j / (j + 1)) * (w(j + 1) / w(j)) for j in range(1, w.n + 1))
    )


def poa_submodular(f: Mechanism, w: WelfareBasis, n: int) -> PoaReport:
    """Exact PoA for concave non-decreasing w and a non-increasing mechanism
    with f(1) = 1 dominating the marginal contribution.

    W* = max over l <= j of  w(l)/w(j) + min(j, n-l) f(j)/w(j)
                                       - min(l, n-j) f(j+1)/w(j).
    """
    _check_sizes(f, w, n)
    _require_concave(w)
    _require(abs(f(1) - 1.0) <= SHAPE_TOL, f"f(1) must equal 1, got {f(1)}")
    for j in range(1, n):
        _require(f(j + 1) <= f(j) + SHAPE_TOL,
                 f"mechanism must be non-increasing (violated at j={j})")
    for j in range(1, n + 1):
        _require(f(j) >= w(j) - w(j - 1) - SHAPE_TOL,
                 f"mechanism must dominate the marginal contribution (violated at j={j})")

    best, arg = -math.inf, (1, 1)
    for j in range(1, n + 1):
        wj = w(j)
        for l in range(1, j + 1):
            cand = (w(l) + min(j, n - l) * f(j) - min(l, n - j) * f(j + 1)) / wj
            if cand > best:
                best, arg = cand, (l, j)
    return PoaReport(1.0 / best, best, 1.0, best, (arg,), "closed_form_submodular")


def poa_shapley_submodular(w: WelfareBasis, n: int) -> PoaReport:
    """Exact PoA of the Shapley value mechanism on a concave basis."""
    _check_sizes(None, w, n)
    _require_concave(w)
    best, arg = -math.inf, (1, 1)
    for j in range(1, n + 1):
        for l in range(1, j + 1):
            cand = (
                w(l) / w(j)
                + min(j, n - l) / j
                - min(l, n - j) * w(j + 1) / ((j + 1) * w(j))
            )
            if cand > best:
                best, arg = cand, (l, j)
    return PoaReport(1.0 / best, best, 1.0, best, (arg,), "closed_form_submodular")


def poa_shapley_reformulated(w: WelfareBasis, n: int) -> PoaReport:
    """Equivalent rewriting of the Shapley value PoA through beta(j)."""
    _check_sizes(None, w, n)
    _require_concave(w)
    beta = beta_profile(w).values
    best, arg = -math.inf, (1, 1)
    for j in range(1, n + 1):
        for l in range(1, j + 1):
            cand = w(l) / w(j) - (
                max(j + l - n, 0) + min(l, n - j) * beta[j - 1]
            ) / j
            if cand > best:
                best, arg = cand, (l, j)
    w_star = 1.0 + best
    return PoaReport(1.0 / w_star, w_star, 1.0, w_star, (arg,), "closed_form_submodular")


def poa_marginal_submodular(w: WelfareBasis, n: int) -> PoaReport:
    """Exact PoA of the marginal contribution mechanism on a concave basis.

    W* = 1 + max over j of min(j, n-j) [2w(j) - w(j-1) - w(j+1)] / w(j);
    the j = n candidate vanishes through min(n, 0) = 0.
    """
    _check_sizes(None, w, n)
    _require_concave(w)
    best, arg = -math.inf, (1,)
    for j in range(1, n + 1):
        cand = min(j, n - j) * (2 * w(j) - w(j - 1) - w(j + 1)) / w(j)
        if cand > best:
            best, arg = cand, (j,)
    w_star = 1.0 + best
    return PoaReport(1.0 / w_star, w_star, 1.0, w_star, (arg,), "closed_form_submodular")


def poa_covering(f: Mechanism, n: int) -> PoaReport:
    """Exact covering PoA for any non-negative mechanism with f(1) = 1.

    W* = 1 + max over j in [n-1] of
         {(j+1)f(j+1) - 1,  j f(j) - f(j+1),  j f(j+1)}.
    """
    _check_sizes(f, None, n)
    _require(abs(f(1) - 1.0) <= SHAPE_TOL, f"f(1) must equal 1, got {f(1)}")
    _require(f.is_nonnegative(), "mechanism must be non-negative")
    best, arg = 0.0, ("", 0)
    for j in range(1, n):
        for term, cand in (
            ("join", (j + 1) * f(j + 1) - 1.0),
            ("stay", j * f(j) - f(j + 1)),
            ("swap", j * f(j + 1)),
        ):
            if cand > best:
                best, arg = cand, (term, j)
    w_star = 1.0 + best
    binding = (arg,) if arg[1] else ()
    return PoaReport(1.0 / w_star, w_star, 1.0, w_star, binding, "closed_form_covering")


def poa_covering_nonincreasing(f: Mechanism, n: int) -> PoaReport:
    """Reduced covering PoA for non-increasing mechanisms.

    W* = 1 + max{ max_j (j f(j) - f(j+1)),  (n-1) f(n) }.
    """
    _check_sizes(f, None, n)
    _require(abs(f(1) - 1.0) <= SHAPE_TOL, f"f(1) must equal 1, got {f(1)}")
    _require(f.is_nonnegative(), "mechanism must be non-negative")
    _require(f.is_nonincreasing(), "mechanism must be non-increasing")
    best, arg = 0.0, ("", 0)
    for j in range(1, n):
        cand = j * f(j) - f(j + 1)
        if cand > best:
            best, arg = cand, ("stay", j)
    tail = (n - 1) * f(n)
    if tail > best:
        best, arg = tail, ("tail", n)
    w_star = 1.0 + best
    binding = (arg,) if arg[1] else ()
    return PoaReport(1.0 / w_star, w_star, 1.0, w_star, binding, "closed_form_covering")


def poa_supermodular(f: Mechanism, w: WelfareBasis, n: int) -> PoaReport:
    """Exact PoA for convex non-decreasing w and f with f(1)=1, f >= 1.

    PoA = (n/w(n)) / max_j (j f(j) / w(j)).
    """
    _check_sizes(f, w, n)
    ok, bad = check_assumption(w, "supermodular")
    _require(ok, f"basis is not non-decreasing convex (violations at j={bad})")
    _require(abs(f(1) - 1.0) <= SHAPE_TOL, f"f(1) must equal 1, got {f(1)}")
    for j in range(1, n + 1):
        _require(f(j) >= 1.0 - SHAPE_TOL, f"f(j) must be >= 1 (violated at j={j})")
    best, arg = -math.inf, (1,)
    for j in range(1, n + 1):
        cand = j * f(j) / w(j)
        if cand > best:
            best, arg = cand, (j,)
    lam = w(n) / n
    w_star = lam * best
    return PoaReport(1.0 / w_star, w_star, lam, w_star, (arg,), "closed_form_supermodular")


def approximation_ratio_curvature(w: WelfareBasis, n: int) -> float:
    """Polynomial-time approximation baseline 1 - c/e from the curvature."""
    _check_sizes(None, w, n)
    return 1.0 - curvature(w) / math.e


def poa_closed_auto(f: Mechanism, w: WelfareBasis, n: int) -> PoaReport:
    """Dispatch to the closed form matching the basis shape.

    Positive mechanisms are rescaled to f(1) = 1 first (the price of
    anarchy is invariant under positive scaling).  Raises PreconditionError
    when no closed form applies.
    """
    _check_sizes(f, w, n)
    if f(1) > 0.0 and abs(f(1) - 1.0) > SHAPE_TOL:
        f = f.scaled(1.0 / f(1))
    if w.is_covering:
        return poa_covering(f, n)
    if w.is_convex:
        return poa_supermodular(f, w, n)
    if w.is_concave:
        return poa_submodular(f, w, n)
    raise PreconditionError("basis is neither concave, convex, nor covering")
