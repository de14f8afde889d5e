"""Welfare bases and utility-generating mechanisms.

A welfare basis ``w`` scales a resource's value by the number of agents
covering it; a mechanism ``f`` distributes that value into agent utilities.
Both are finite sequences on ``1..n`` extended with exact zeros at indices
``0`` and ``n+1`` so that boundary terms vanish in the closed forms.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import InvalidParameterError

# Absolute tolerance for shape predicates (monotonicity, concavity, ...).
# Bases come from closed forms, so anything beyond rounding is a real
# violation.
SHAPE_TOL = 1e-12


def _as_float_tuple(values: Iterable[float]) -> tuple[float, ...]:
    out = tuple(float(v) for v in values)
    if not out:
        raise InvalidParameterError("values must be non-empty")
    if not all(math.isfinite(v) for v in out):
        raise InvalidParameterError("values must be finite")
    return out


class _IndexedValues:
    """Shared indexing: ``self(j)`` with exact zeros at 0 and n+1."""

    values: tuple[float, ...]
    n: int

    def __call__(self, j: int) -> float:
        if j == 0 or j == self.n + 1:
            return 0.0
        if 1 <= j <= self.n:
            return self.values[j - 1]
        raise IndexError(f"index {j} outside [0, {self.n + 1}]")


@dataclass(frozen=True)
class WelfareBasis(_IndexedValues):
    """Per-congestion welfare scaling ``w(1..n)``, normalized to ``w(1)=1``.

    Construction rescales the supplied values by ``1/w(1)``; all entries
    must be strictly positive.
    """

    n: int
    values: tuple[float, ...]
    label: str = ""
    is_concave: bool = field(init=False, default=False)
    is_convex: bool = field(init=False, default=False)
    is_covering: bool = field(init=False, default=False)

    def __post_init__(self):
        values = _as_float_tuple(self.values)
        if self.n != len(values):
            raise InvalidParameterError(
                f"n={self.n} does not match {len(values)} values"
            )
        if any(v <= 0.0 for v in values):
            raise InvalidParameterError("welfare basis values must be positive")
        if values[0] != 1.0:
            values = tuple(v / values[0] for v in values)
        object.__setattr__(self, "values", values)
        ok_sub, _ = check_assumption(values, "submodular")
        ok_super, _ = check_assumption(values, "supermodular")
        ok_cov, _ = check_assumption(values, "covering")
        object.__setattr__(self, "is_concave", ok_sub)
        object.__setattr__(self, "is_convex", ok_super)
        object.__setattr__(self, "is_covering", ok_cov)

    def to_json(self) -> str:
        return json.dumps({"n": self.n, "values": list(self.values), "label": self.label})

    @staticmethod
    def from_json(text: str) -> "WelfareBasis":
        obj = json.loads(text)
        return WelfareBasis(int(obj["n"]), tuple(obj["values"]), obj.get("label", ""))


@dataclass(frozen=True)
class Mechanism(_IndexedValues):
    """Utility-generating mechanism ``f(1..n)``; stored unscaled."""

    n: int
    values: tuple[float, ...]
    label: str = ""

    def __post_init__(self):
        values = _as_float_tuple(self.values)
        if self.n != len(values):
            raise InvalidParameterError(
                f"n={self.n} does not match {len(values)} values"
            )
        object.__setattr__(self, "values", values)

    def first_positive(self) -> bool:
        return self.values[0] > 0.0

    def is_nonincreasing(self, tol: float = SHAPE_TOL) -> bool:
        return all(
            self.values[j + 1] <= self.values[j] + tol for j in range(self.n - 1)
        )

    def is_nonnegative(self, tol: float = SHAPE_TOL) -> bool:
        return all(v >= -tol for v in self.values)

    def dominates_marginal_contribution(
        self, w: WelfareBasis, tol: float = SHAPE_TOL
    ) -> bool:
        if w.n != self.n:
            raise InvalidParameterError("basis and mechanism sizes differ")
        return all(
            self.values[j] >= (w(j + 1) - w(j)) - tol for j in range(self.n)
        )

    def scaled(self, c: float) -> "Mechanism":
        return Mechanism(self.n, tuple(c * v for v in self.values), self.label)

    def to_json(self) -> str:
        return json.dumps({"n": self.n, "values": list(self.values), "label": self.label})

    @staticmethod
    def from_json(text: str) -> "Mechanism":
        obj = json.loads(text)
        return Mechanism(int(obj["n"]), tuple(obj["values"]), obj.get("label", ""))


def check_assumption(
    w: WelfareBasis | Sequence[float],
    kind: str,
    tol: float = SHAPE_TOL,
) -> tuple[bool, list[int]]:
    """Check a shape assumption on a basis; returns (ok, offending indices).

    ``submodular``: non-decreasing with non-increasing increments (the
    increment at j=1 is compared against w(1)-w(0)=1).
    ``supermodular``: non-decreasing with non-decreasing increments.
    ``covering``: identically one.
    """
    values = w.values if isinstance(w, WelfareBasis) else _as_float_tuple(w)
    n = len(values)
    ext = (0.0,) + values  # ext[j] = w(j) for j in 0..n
    bad: list[int] = []
    if kind == "covering":
        bad = [j for j in range(1, n + 1) if abs(ext[j] - 1.0) > tol]
    elif kind in ("submodular", "supermodular"):
        for j in range(1, n):
            if ext[j + 1] < ext[j] - tol:
                bad.append(j)
                continue
            d_next = ext[j + 1] - ext[j]
            d_prev = ext[j] - ext[j - 1]
            if kind == "submodular" and d_next > d_prev + tol:
                bad.append(j)
            elif kind == "supermodular" and d_next < d_prev - tol:
                bad.append(j)
    else:
        raise InvalidParameterError(f"unknown assumption kind {kind!r}")
    return (not bad, bad)


def shapley_value(w: WelfareBasis) -> Mechanism:
    """Shapley value mechanism: f(j) = w(j)/j (budget balanced)."""
    return Mechanism(w.n, tuple(w(j) / j for j in range(1, w.n + 1)), "sv")


def marginal_contribution(w: WelfareBasis) -> Mechanism:
    """Marginal contribution mechanism: f(j) = w(j) - w(j-1)."""
    return Mechanism(w.n, tuple(w(j) - w(j - 1) for j in range(1, w.n + 1)), "mc")


def gairing_optimal_covering(n: int) -> Mechanism:
    """The covering mechanism maximizing the price of anarchy.

    f*(j) = (j-1)! * (T + sum_{i=j}^{n-1} 1/i!) / (T + sum_{i=1}^{n-1} 1/i!)
    with T = 1/((n-1)(n-1)!).  Evaluated through the stable recurrence
    N(1) = T + sum_{i=1}^{n-1} 1/i!,  N(j+1) = j*N(j) - 1,  f*(j) = N(j)/N(1),
    which keeps every intermediate in (0, N(1)] instead of forming factorials
    (those overflow doubles past n ~ 170; T itself is evaluated in the log
    domain and underflows to zero harmlessly for large n).
    """
    if n < 2:
        raise InvalidParameterError("covering design mechanism needs n >= 2")
    log_t = -(math.log(n - 1) + math.lgamma(n))  # log 1/((n-1)(n-1)!)
    t = math.exp(log_t) if log_t > -745.0 else 0.0
    s1 = 0.0
    term = 1.0
    for i in range(1, n):
        term /= i
        s1 += term
    values = [1.0] * n
    nj = t + s1
    n1 = nj
    for j in range(1, n):
        nj = j * nj - 1.0
        values[j] = nj / n1
    return Mechanism(n, tuple(values), "gairing")


def vehicle_target_basis(p: float, n: int) -> WelfareBasis:
    """Normalized joint-success basis w(j) = (1 - (1-p)^j) / p.

    ``p`` is the per-agent success probability; the basis is non-decreasing
    and concave for every p in (0, 1].
    """
    if not (0.0 < p <= 1.0):
        raise InvalidParameterError(f"success probability must be in (0,1], got {p}")
    if p == 1.0:
        values = (1.0,) * n
    else:
        log_q = math.log1p(-p)
        values = tuple(-math.expm1(j * log_q) / p for j in range(1, n + 1))
    return WelfareBasis(n, values, f"vehicle:p={p:g}")


def power_basis(d: float, n: int) -> WelfareBasis:
    """Monomial basis w(j) = j^d; concave for d <= 1, convex for d >= 1."""
    if d < 0.0:
        raise InvalidParameterError(f"exponent must be non-negative, got {d}")
    return WelfareBasis(n, tuple(float(j) ** d for j in range(1, n + 1)), f"power:d={d:g}")


def covering_basis(n: int) -> WelfareBasis:
    """Set-covering basis w == 1."""
    return WelfareBasis(n, (1.0,) * n, "covering")


def curvature(w: WelfareBasis) -> float:
    """Curvature c = 1 + w(n-1) - w(n); in [0,1] for concave normalized w."""
    if w.n < 2:
        raise InvalidParameterError("curvature needs n >= 2")
    return 1.0 + w(w.n - 1) - w(w.n)
