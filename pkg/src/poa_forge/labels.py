"""Parsing of basis/mechanism labels used in files and on the CLI.

Grammar: ``covering``, ``power:d=<real>``, ``vehicle:p=<real>`` for bases;
``sv``, ``mc``, ``gairing``, ``optimal``, ``optimal_submodular`` for
mechanisms (the optimal ones are produced by the design programs).
"""

from __future__ import annotations

from .errors import InvalidParameterError
from .mechanisms import (
    Mechanism,
    WelfareBasis,
    covering_basis,
    gairing_optimal_covering,
    marginal_contribution,
    power_basis,
    shapley_value,
    vehicle_target_basis,
)


def resolve_basis(label: str, n: int) -> WelfareBasis:
    if label == "covering":
        return covering_basis(n)
    if label.startswith("power:"):
        return power_basis(_param(label, "d"), n)
    if label.startswith("vehicle:"):
        return vehicle_target_basis(_param(label, "p"), n)
    raise InvalidParameterError(f"unknown basis label {label!r}")


def resolve_mechanism(label: str, w: WelfareBasis) -> Mechanism:
    if label == "sv":
        return shapley_value(w)
    if label == "mc":
        return marginal_contribution(w)
    if label == "gairing":
        return gairing_optimal_covering(w.n)
    if label == "optimal":
        from .lp import design_optimal_mechanism

        return design_optimal_mechanism(w, w.n)[0]
    if label == "optimal_submodular":
        from .lp import design_optimal_mechanism_submodular

        return design_optimal_mechanism_submodular(w, w.n)[0]
    raise InvalidParameterError(f"unknown mechanism label {label!r}")


def _param(label: str, name: str) -> float:
    _, _, spec = label.partition(":")
    key, _, value = spec.partition("=")
    if key != name or not value:
        raise InvalidParameterError(f"malformed label {label!r}; expected {name}=<real>")
    try:
        return float(value)
    except ValueError as exc:
        raise InvalidParameterError(f"malformed label {label!r}") from exc
