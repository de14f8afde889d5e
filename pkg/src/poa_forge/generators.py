"""Seeded random generators for the two application families.

Both generators are pure functions of (config, seed): the same config
serializes to the same instance bytes.  Batches assign seed+index streams
so instances can be produced independently and in parallel.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, asdict

import numpy as np

from .errors import InvalidParameterError
from .games import GameInstance, StructuredActionSet
from .labels import resolve_mechanism
from .mechanisms import Mechanism, covering_basis, vehicle_target_basis


@dataclass(frozen=True)
class VehicleTargetConfig:
    """Random vehicle-target assignment instances: n agents, n+1 valued
    targets, two distinct singleton actions per agent."""

    agents: int = 10
    resources: int = 11
    p: float = 0.8
    seed: int = 0
    mechanism: str = "sv"

    def __post_init__(self):
        if self.agents < 1 or self.resources < 2:
            raise InvalidParameterError("need at least one agent and two resources")
        if not (0.0 < self.p <= 1.0):
            raise InvalidParameterError("p must be in (0, 1]")

    def to_json(self) -> str:
        return json.dumps(asdict(self))


@dataclass(frozen=True)
class ContentDistributionConfig:
    """Random content-caching instances on an nx x ny bin grid.

    Items get Zipf query rates 1/rank^alpha and a request disk of radius
    ``radius`` (scalar shared by all items, or one value per item); a node
    may cache an item only if it sits inside the item's disk, and stores at
    most ``cap`` items.
    """

    nx: int = 100
    ny: int = 100
    nodes: int = 20
    items: int = 100
    alpha: float = 0.7
    radius: float | tuple[float, ...] = 25.0
    cap: int = 3
    seed: int = 0
    mechanism: str = "sv"

    def __post_init__(self):
        if min(self.nx, self.ny, self.nodes, self.items) < 1:
            raise InvalidParameterError("grid, node and item counts must be >= 1")
        if self.alpha < 0:
            raise InvalidParameterError("alpha must be >= 0")
        if self.cap < 1:
            raise InvalidParameterError("cap must be >= 1")
        radius = self.radius
        if not np.isscalar(radius):
            radius = tuple(float(r) for r in radius)
            if len(radius) != self.items:
                raise InvalidParameterError("need one radius per item")
            object.__setattr__(self, "radius", radius)

    def radii(self) -> np.ndarray:
        if np.isscalar(self.radius):
            return np.full(self.items, float(self.radius))
        return np.array(self.radius, dtype=float)

    def to_json(self) -> str:
        return json.dumps(asdict(self))


def _mechanism_for(label_or_mech, basis) -> Mechanism:
    if isinstance(label_or_mech, Mechanism):
        return label_or_mech
    return resolve_mechanism(label_or_mech, basis)


def gen_vehicle_target(cfg: VehicleTargetConfig) -> GameInstance:
    """One seeded instance: values i.i.d. uniform on [0,1], two distinct
    singleton actions per agent.  Degenerate draws with no positive-value
    covered target are rejected and redrawn."""
    rng = np.random.Generator(np.random.PCG64(cfg.seed))
    basis = vehicle_target_basis(cfg.p, cfg.agents)
    mech = _mechanism_for(cfg.mechanism, basis)
    for _ in range(1000):
        values = rng.uniform(0.0, 1.0, size=cfg.resources)
        actions = tuple(
            tuple((int(r),) for r in rng.choice(cfg.resources, size=2, replace=False))
            for _ in range(cfg.agents)
        )
        covered = {r for acts in actions for (r,) in acts}
        if max(values[sorted(covered)]) > 0.0:
            break
    else:  # pragma: no cover - probability zero under the uniform draw
        raise InvalidParameterError("could not draw a non-degenerate instance")
    return GameInstance(
        tuple(f"t{r}" for r in range(cfg.resources)),
        tuple(values),
        actions,
        basis,
        mech,
    )


def gen_content_distribution(cfg: ContentDistributionConfig) -> GameInstance:
    """One seeded caching instance: positions uniform on the integer bin
    grid, feasibility by the closed-ball distance rule, covering welfare."""
    rng = np.random.Generator(np.random.PCG64(cfg.seed))
    basis = covering_basis(cfg.nodes)
    mech = _mechanism_for(cfg.mechanism, basis)
    item_pos = np.column_stack(
        [rng.integers(0, cfg.nx, size=cfg.items), rng.integers(0, cfg.ny, size=cfg.items)]
    )
    node_pos = np.column_stack(
        [rng.integers(0, cfg.nx, size=cfg.nodes), rng.integers(0, cfg.ny, size=cfg.nodes)]
    )
    values = zipf_query_rates(cfg.items, cfg.alpha)
    radii = cfg.radii()
    actions = []
    for i in range(cfg.nodes):
        dist = np.sqrt(((item_pos - node_pos[i]) ** 2).sum(axis=1))
        feasible = tuple(int(r) for r in np.nonzero(dist <= radii)[0])
        actions.append(StructuredActionSet(feasible, cfg.cap))
    return GameInstance(
        tuple(f"item{r + 1}" for r in range(cfg.items)),
        tuple(float(v) for v in values),
        tuple(actions),
        basis,
        mech,
    )


def zipf_query_rates(items: int, alpha: float) -> np.ndarray:
    """Query rates 1/rank^alpha, rank starting at 1 (so q_1 = 1)."""
    ranks = np.arange(1, items + 1, dtype=float)
    return ranks ** (-alpha)


def total_query_mass(source) -> float:
    """Sum of all query rates; upper-bounds the covering optimum."""
    if isinstance(source, ContentDistributionConfig):
        return float(zipf_query_rates(source.items, source.alpha).sum())
    if isinstance(source, GameInstance):
        return float(sum(source.values))
    raise InvalidParameterError("expected a content config or a game instance")
