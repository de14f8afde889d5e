"""Congestion-game engine: welfare/utility evaluation, best-response
dynamics with potential tracking, Nash verification, an exhaustive
equilibrium oracle and matroid support.

Every game here is a congestion game regardless of the mechanism, so the
path-independent potential  Phi(a) = sum_r v_r sum_{k<=|a|_r} f(k)  exists
and unilateral deviations change it by exactly the deviator's utility
change; the oracle and the dynamics both lean on that.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import _kernels
from .errors import (
    DegenerateInstanceError,
    InfeasibleAllocationError,
    InternalSolverError,
    InvalidParameterError,
    SizeCapError,
)
from .labels import resolve_basis, resolve_mechanism
from .mechanisms import Mechanism, WelfareBasis

Action = tuple[int, ...]

ORACLE_CAP = 2**20


def _canon_action(resources: Iterable[int]) -> Action:
    out = tuple(sorted(set(int(r) for r in resources)))
    return out


@dataclass(frozen=True)
class StructuredActionSet:
    """All subsets of ``feasible`` with at most ``cap`` elements."""

    feasible: Action
    cap: int

    def __post_init__(self):
        object.__setattr__(self, "feasible", _canon_action(self.feasible))
        if self.cap < 0:
            raise InvalidParameterError("cardinality cap must be >= 0")

    def contains(self, action: Action) -> bool:
        return len(action) <= self.cap and set(action) <= set(self.feasible)

    def count(self) -> int:
        k = min(self.cap, len(self.feasible))
        return sum(math.comb(len(self.feasible), s) for s in range(k + 1))

    def expand(self) -> tuple[Action, ...]:
        k = min(self.cap, len(self.feasible))
        return tuple(
            itertools.chain.from_iterable(
                itertools.combinations(self.feasible, s) for s in range(k + 1)
            )
        )

    def rank(self) -> int:
        return min(self.cap, len(self.feasible))


@dataclass(frozen=True)
class GameInstance:
    """A resource-allocation game (agents, valued resources, action sets,
    welfare basis and mechanism).  Immutable; safe to share across threads."""

    resource_ids: tuple[str, ...]
    values: tuple[float, ...]
    actions: tuple  # per agent: tuple[Action, ...] or StructuredActionSet
    basis: WelfareBasis
    mechanism: Mechanism

    def __post_init__(self):
        if len(self.resource_ids) != len(self.values):
            raise InvalidParameterError("one value per resource required")
        if any(v < 0 for v in self.values):
            raise InvalidParameterError("resource values must be >= 0")
        if self.basis.n != self.mechanism.n:
            raise InvalidParameterError("basis and mechanism sizes differ")
        if len(self.actions) > self.basis.n:
            raise InvalidParameterError(
                f"{len(self.actions)} agents exceed the class bound n={self.basis.n}"
            )
        m = len(self.values)
        canon = []
        for i, acts in enumerate(self.actions):
            if isinstance(acts, StructuredActionSet):
                if acts.feasible and max(acts.feasible) >= m:
                    raise InvalidParameterError(f"agent {i} references unknown resources")
                canon.append(acts)
                continue
            acts = tuple(_canon_action(a) for a in acts)
            if not acts:
                raise InvalidParameterError(f"agent {i} has an empty action set")
            for a in acts:
                if a and max(a) >= m:
                    raise InvalidParameterError(f"agent {i} references unknown resources")
            canon.append(acts)
        object.__setattr__(self, "actions", tuple(canon))
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        object.__setattr__(self, "resource_ids", tuple(self.resource_ids))

    @property
    def n_agents(self) -> int:
        return len(self.actions)

    @property
    def n_resources(self) -> int:
        return len(self.values)

    def action_set_contains(self, i: int, action: Action) -> bool:
        acts = self.actions[i]
        if isinstance(acts, StructuredActionSet):
            return acts.contains(action)
        return action in acts

    def first_action(self, i: int) -> Action:
        acts = self.actions[i]
        if isinstance(acts, StructuredActionSet):
            return ()
        return min(acts)

    def matroid_move_bound(self) -> int:
        """Best-response move bound n'^2 * m * max_i rank for matroid-like
        action sets (structured sets and fixed-size explicit sets)."""
        ranks = []
        for acts in self.actions:
            if isinstance(acts, StructuredActionSet):
                ranks.append(acts.rank())
            else:
                ranks.append(max(len(a) for a in acts))
        return self.n_agents**2 * self.n_resources * max(ranks, default=0)

    def to_json(self) -> str:
        def encode_actions(acts):
            if isinstance(acts, StructuredActionSet):
                return {
                    "feasible": [self.resource_ids[r] for r in acts.feasible],
                    "cap": acts.cap,
                }
            return [[self.resource_ids[r] for r in a] for a in acts]

        # A bare label is rebuilt with n = agent count on load, so it is only
        # usable when the class size matches; otherwise emit explicit values.
        basis = self.basis.label if (
            self.basis.label and self.basis.n == self.n_agents
        ) else {"n": self.basis.n, "values": list(self.basis.values)}
        mech = self.mechanism.label if (
            self.mechanism.label in ("sv", "mc", "gairing")
            and self.mechanism.n == self.n_agents
        ) else {"n": self.mechanism.n, "values": list(self.mechanism.values)}
        return json.dumps(
            {
                "n": self.n_agents,
                "resources": [
                    {"id": rid, "value": v}
                    for rid, v in zip(self.resource_ids, self.values)
                ],
                "actions": [encode_actions(acts) for acts in self.actions],
                "basis": basis,
                "mechanism": mech,
            }
        )

    @staticmethod
    def from_json(text: str) -> "GameInstance":
        obj = json.loads(text)
        ids = tuple(str(r["id"]) for r in obj["resources"])
        values = tuple(float(r["value"]) for r in obj["resources"])
        index = {rid: k for k, rid in enumerate(ids)}
        n_agents = int(obj["n"])

        raw_basis = obj["basis"]
        if isinstance(raw_basis, str):
            basis = resolve_basis(raw_basis, n_agents)
        else:
            basis = WelfareBasis(
                int(raw_basis["n"]), tuple(raw_basis["values"]),
                raw_basis.get("label", ""),
            )
        raw_mech = obj["mechanism"]
        if isinstance(raw_mech, str):
            mech = resolve_mechanism(raw_mech, basis)
        else:
            mech = Mechanism(
                int(raw_mech["n"]), tuple(raw_mech["values"]),
                raw_mech.get("label", ""),
            )

        actions = []
        for acts in obj["actions"]:
            if isinstance(acts, dict):
                actions.append(
                    StructuredActionSet(
                        tuple(index[r] for r in acts["feasible"]), int(acts["cap"])
                    )
                )
            else:
                actions.append(tuple(tuple(index[r] for r in a) for a in acts))
        if len(actions) != n_agents:
            raise InvalidParameterError("agent count does not match action sets")
        return GameInstance(ids, values, tuple(actions), basis, mech)


@dataclass(frozen=True)
class Allocation:
    """One chosen action per agent."""

    choices: tuple[Action, ...]

    def __post_init__(self):
        object.__setattr__(
            self, "choices", tuple(_canon_action(a) for a in self.choices)
        )

    def counts(self, m: int) -> list[int]:
        out = [0] * m
        for a in self.choices:
            for r in a:
                out[r] += 1
        return out

    def replace(self, i: int, action: Action) -> "Allocation":
        choices = list(self.choices)
        choices[i] = action
        return Allocation(tuple(choices))


def _check_feasible(g: GameInstance, a: Allocation) -> None:
    if len(a.choices) != g.n_agents:
        raise InfeasibleAllocationError(
            f"allocation has {len(a.choices)} choices for {g.n_agents} agents"
        )
    for i, act in enumerate(a.choices):
        if not g.action_set_contains(i, act):
            raise InfeasibleAllocationError(f"agent {i} plays an action outside its set")


def default_start(g: GameInstance) -> Allocation:
    """Each agent's lexicographically first action."""
    return Allocation(tuple(g.first_action(i) for i in range(g.n_agents)))


def evaluate_welfare(g: GameInstance, a: Allocation) -> float:
    _check_feasible(g, a)
    counts = a.counts(g.n_resources)
    return sum(
        v * g.basis(c) for v, c in zip(g.values, counts) if c
    )


def evaluate_utility(g: GameInstance, a: Allocation, i: int) -> float:
    _check_feasible(g, a)
    counts = a.counts(g.n_resources)
    f = g.mechanism
    return sum(g.values[r] * f(counts[r]) for r in a.choices[i])


def potential(g: GameInstance, a: Allocation) -> float:
    """Path-independent potential; unilateral deviations change it by
    exactly the deviator's utility change."""
    _check_feasible(g, a)
    counts = a.counts(g.n_resources)
    f = g.mechanism
    cum = [0.0] * (g.basis.n + 1)
    for k in range(1, g.basis.n + 1):
        cum[k] = cum[k - 1] + f(k)
    return sum(g.values[r] * cum[c] for r, c in enumerate(counts) if c)


def _default_eps(g: GameInstance) -> float:
    return 1e-9 * max(g.values, default=1.0)


def _best_response_scored(g, counts_minus, i, current: Action):
    """Best action of agent i against fixed opponents.

    Returns (action, utility, current_utility).  Ties prefer the current
    action; explicit sets then take the lexicographically smallest optimal
    action, structured sets rank items by (score desc, id asc) and keep
    only strictly valuable ones.
    """
    f = g.mechanism
    values = g.values
    acts = g.actions[i]
    if isinstance(acts, StructuredActionSet):
        scores = {r: values[r] * f(counts_minus[r] + 1) for r in acts.feasible}
        ranked = sorted(acts.feasible, key=lambda r: (-scores[r], r))
        chosen = tuple(r for r in ranked[: acts.cap] if scores[r] > 0.0)
        best = _canon_action(chosen)
        best_u = sum(scores[r] for r in best)
        cur_u = sum(scores[r] for r in current)
        if cur_u == best_u:
            return current, cur_u, cur_u
        return best, best_u, cur_u

    best, best_u = None, -math.inf
    cur_u = -math.inf
    for act in acts:
        u = sum(values[r] * f(counts_minus[r] + 1) for r in act)
        if act == current:
            cur_u = u
        if u > best_u or (u == best_u and act < best):
            best, best_u = act, u
    if cur_u == best_u:
        return current, cur_u, cur_u
    return best, best_u, cur_u


def best_response(g: GameInstance, a: Allocation, i: int) -> Action:
    _check_feasible(g, a)
    counts = a.counts(g.n_resources)
    for r in a.choices[i]:
        counts[r] -= 1
    action, _, _ = _best_response_scored(g, counts, i, a.choices[i])
    return action


def is_nash(g: GameInstance, a: Allocation, eps: float | None = None):
    """True iff no agent can improve by more than eps; also returns the most
    profitable deviation as (agent, action, gain), or None."""
    _check_feasible(g, a)
    if eps is None:
        eps = _default_eps(g)
    counts = a.counts(g.n_resources)
    best_dev, best_gain = None, 0.0
    for i in range(g.n_agents):
        for r in a.choices[i]:
            counts[r] -= 1
        action, u_best, u_cur = _best_response_scored(g, counts, i, a.choices[i])
        gain = u_best - u_cur
        if gain > best_gain:
            best_dev, best_gain = (i, action, gain), gain
        for r in a.choices[i]:
            counts[r] += 1
    if best_gain > eps:
        return False, best_dev
    return True, None


@dataclass
class TraceStep:
    step: int
    agent: int
    old_action: Action
    new_action: Action
    gain: float
    potential: float


@dataclass
class DynamicsTrace:
    """Record of one best-response run, sufficient for bit-exact replay."""

    steps: list[TraceStep] = field(default_factory=list)
    converged: bool = False
    rounds_total: int = 0
    rounds_active: int = 0
    accepted_moves: int = 0
    br_queries: int = 0
    schedule: str = "round_robin"
    seed: int | None = None
    rng_algorithm: str | None = None
    epsilon: float = 0.0
    start: Allocation | None = None

    def to_csv(self) -> str:
        lines = ["step,agent,gain,potential"]
        for s in self.steps:
            lines.append(f"{s.step},{s.agent},{s.gain:.12g},{s.potential:.12g}")
        return "\n".join(lines) + "\n"


def run_best_response_dynamics(
    g: GameInstance,
    start: Allocation | None = None,
    schedule: str = "round_robin",
    eps: float | None = None,
    max_rounds: int = 10_000,
    seed: int = 0,
) -> tuple[Allocation, DynamicsTrace]:
    """Iterate best responses until no agent can gain more than eps.

    Moves are accepted only on a strict gain above eps, so the potential
    increases strictly along the run; the fixed point is an eps-Nash
    equilibrium.  ``rounds_active`` counts passes containing at least one
    accepted move.  A run that hits max_rounds is returned with
    converged=False rather than raised.
    """
    if start is None:
        start = default_start(g)
    _check_feasible(g, start)
    if eps is None:
        eps = _default_eps(g)
    if eps <= 0:
        raise InvalidParameterError("eps must be positive")
    if schedule not in ("round_robin", "random"):
        raise InvalidParameterError(f"unknown schedule {schedule!r}")

    trace = DynamicsTrace(schedule=schedule, epsilon=eps, start=start)
    current = list(start.choices)
    counts = start.counts(g.n_resources)
    n = g.n_agents
    step = 0

    def attempt(i: int) -> float:
        """Query agent i's best response; move if it gains more than eps."""
        nonlocal step
        trace.br_queries += 1
        for r in current[i]:
            counts[r] -= 1
        action, u_best, u_cur = _best_response_scored(g, counts, i, current[i])
        gain = u_best - u_cur
        if gain > eps and action != current[i]:
            old = current[i]
            current[i] = action
            for r in current[i]:
                counts[r] += 1
            step += 1
            trace.accepted_moves += 1
            trace.steps.append(
                TraceStep(step, i, old, action,
                          gain, potential(g, Allocation(tuple(current))))
            )
            return gain
        for r in current[i]:
            counts[r] += 1
        return 0.0

    if schedule == "round_robin":
        for _ in range(max_rounds):
            trace.rounds_total += 1
            moved = False
            for i in range(n):
                if attempt(i) > 0.0:
                    moved = True
            if moved:
                trace.rounds_active += 1
            else:
                trace.converged = True
                break
    else:
        rng = np.random.Generator(np.random.PCG64(seed))
        trace.seed = seed
        trace.rng_algorithm = "pcg64"
        pending = set(range(n))
        draws = 0
        active_this_round = False
        while pending and draws < max_rounds * n:
            i = int(rng.integers(0, n))
            draws += 1
            if i in pending:
                if attempt(i) > 0.0:
                    pending = set(range(n)) - {i}
                    active_this_round = True
                else:
                    pending.discard(i)
            if draws % n == 0:
                trace.rounds_total += 1
                if active_this_round:
                    trace.rounds_active += 1
                active_this_round = False
        if draws % n:
            trace.rounds_total += 1
            if active_this_round:
                trace.rounds_active += 1
        trace.converged = not pending

    return Allocation(tuple(current)), trace


# ---------------------------------------------------------------------------
# Exhaustive oracle
# ---------------------------------------------------------------------------

@dataclass
class OracleReport:
    optimum_value: float
    optimum: Allocation
    equilibria: tuple[Allocation, ...]
    equilibrium_values: tuple[float, ...]
    worst_value: float
    worst: Allocation
    efficiency: float
    total_allocations: int

    def to_dict(self) -> dict:
        return {
            "optimum_value": self.optimum_value,
            "optimum": [list(a) for a in self.optimum.choices],
            "equilibria": [
                [list(a) for a in e.choices] for e in self.equilibria
            ],
            "equilibrium_values": list(self.equilibrium_values),
            "worst_value": self.worst_value,
            "worst": [list(a) for a in self.worst.choices],
            "efficiency": self.efficiency,
            "total_allocations": self.total_allocations,
        }


def _explicit_action_lists(g: GameInstance, cap: int) -> list[tuple[Action, ...]]:
    total = 1
    lists = []
    for acts in g.actions:
        if isinstance(acts, StructuredActionSet):
            total *= acts.count()
        else:
            total *= len(acts)
        if total > cap:
            raise SizeCapError(
                f"{total}+ allocations exceed the enumeration cap {cap}"
            )
    for acts in g.actions:
        lists.append(acts.expand() if isinstance(acts, StructuredActionSet) else acts)
    return lists


def exhaustive_oracle(
    g: GameInstance, cap: int = ORACLE_CAP, tol: float | None = None
) -> OracleReport:
    """Enumerate every allocation: exact optimum, all pure equilibria, and
    the efficiency ratio (worst equilibrium welfare / optimum welfare)."""
    lists = _explicit_action_lists(g, cap)
    if tol is None:
        tol = 1e-12 * max(1.0, max(g.values, default=1.0))

    radices = np.array([len(acts) for acts in lists], dtype=np.int64)
    agent_base = np.concatenate([[0], np.cumsum(radices)[:-1]])
    flat_actions = [a for acts in lists for a in acts]
    act_offsets = np.concatenate(
        [[0], np.cumsum([len(a) for a in flat_actions])]
    ).astype(np.int64)
    act_items = np.array(
        [r for a in flat_actions for r in a], dtype=np.int64
    )
    n = g.basis.n
    w_ext = np.array([g.basis(j) for j in range(n + 2)])
    f_ext = np.array([g.mechanism(j) for j in range(n + 2)])
    values = np.array(g.values, dtype=float)

    welfare, ne_mask = _kernels.scan_allocations(
        radices, act_offsets, act_items, agent_base, values, f_ext, w_ext, tol
    )

    def decode(t: int) -> Allocation:
        out = []
        for i in range(g.n_agents - 1, -1, -1):
            t, d = divmod(t, int(radices[i]))
            out.append(lists[i][d])
        return Allocation(tuple(reversed(out)))

    t_opt = int(np.argmax(welfare))
    w_opt = float(welfare[t_opt])
    if w_opt <= 0.0:
        raise DegenerateInstanceError(
            "no allocation attains positive welfare; the instance is degenerate"
        )
    ne_idx = np.nonzero(ne_mask)[0]
    if ne_idx.size == 0:  # a potential maximizer is always an equilibrium
        raise InternalSolverError("deviation scan found no pure equilibrium")
    ne_values = welfare[ne_idx]
    k_worst = int(np.argmin(ne_values))
    worst_t = int(ne_idx[k_worst])
    worst_value = float(ne_values[k_worst])
    return OracleReport(
        optimum_value=w_opt,
        optimum=decode(t_opt),
        equilibria=tuple(decode(int(t)) for t in ne_idx),
        equilibrium_values=tuple(float(v) for v in ne_values),
        worst_value=worst_value,
        worst=decode(worst_t),
        efficiency=worst_value / w_opt,
        total_allocations=int(len(welfare)),
    )


# ---------------------------------------------------------------------------
# Matroids
# ---------------------------------------------------------------------------

@dataclass
class MatroidCheckResult:
    is_matroid: bool
    counterexample: tuple | None
    bases: tuple[frozenset, ...]
    rank: int


def matroid_check(
    family: Iterable[Iterable], ground: Sequence | None = None
) -> MatroidCheckResult:
    """Brute-force verification of the independence-system axioms.

    Checks downward closure and the exchange property; on failure the
    counterexample names the axiom and the offending sets.  Also reports
    the maximal sets (bases) and the rank.  Ground sets are limited to 12
    elements to keep the enumeration honest.
    """
    sets = {frozenset(s) for s in family}
    elems = set().union(*sets) if sets else set()
    if ground is not None:
        elems |= set(ground)
    if len(elems) > 12:
        raise InvalidParameterError("ground set larger than 12 elements")
    if not sets:
        return MatroidCheckResult(False, ("empty", None, None), (), 0)

    for b in sets:
        for size in range(len(b)):
            for sub in itertools.combinations(b, size):
                if frozenset(sub) not in sets:
                    return MatroidCheckResult(
                        False, ("downward_closure", b, frozenset(sub)), (), 0
                    )
    for a in sets:
        for b in sets:
            if len(b) <= len(a):
                continue
            if not any(a | {r} in sets for r in b - a):
                return MatroidCheckResult(False, ("exchange", a, b), (), 0)

    bases = tuple(
        sorted(
            (s for s in sets if not any(s | {r} in sets for r in elems - s)),
            key=lambda s: sorted(s),
        )
    )
    rank = max(len(b) for b in bases)
    return MatroidCheckResult(True, None, bases, rank)


def uniform_matroid_family(ground: Sequence, k: int) -> list[frozenset]:
    """All subsets of the ground set with at most k elements."""
    ground = list(ground)
    return [
        frozenset(c)
        for s in range(min(k, len(ground)) + 1)
        for c in itertools.combinations(ground, s)
    ]
