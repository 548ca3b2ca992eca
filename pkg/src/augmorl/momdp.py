"""Finite multi-objective MDPs with vector rewards and augmented observations.

Environments are finite and fully explicit: probabilistic transitions plus a
finite discrete distribution over reward vectors per (state, action,
next-state) triple, with one reward component per objective.  Explicit
distributions keep exact enumeration and dynamic programming available
alongside sampled rollouts.

Instances are immutable after construction and safe to share across
concurrent workers.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass
from functools import cached_property

Vector = tuple[float, ...]

#: decimal places used when accumulated rewards become table keys
#: (9 decimals = a 1e-9 grid; integer-valued rewards are unaffected)
DECIMALS = 9

#: tolerance for probability-mass checks
PROB_TOL = 1e-9


def vec(values) -> Vector:
    return tuple(float(x) for x in values)


def zeros(d: int) -> Vector:
    return (0.0,) * d


def quantize(v, decimals: int = DECIMALS) -> Vector:
    """Round vector components onto the key grid (10**-decimals)."""
    return tuple(round(float(x), decimals) for x in v)


def accumulate(acc: Vector, r: Vector, gamma: float, t: int) -> Vector:
    """Discounted running sum of rewards: returns acc + gamma**t * r."""
    if t < 0:
        raise ValueError(f"step index must be non-negative, got {t}")
    scale = gamma**t
    return tuple(a + scale * x for a, x in zip(acc, r, strict=True))


@dataclass(frozen=True)
class AugmentedState:
    """An environment state paired with the reward accumulated so far.

    The step index is carried along because the discount applied to future
    rewards depends on episode depth.
    """

    state: str
    acc: Vector
    step: int

    def key(self, decimals: int = DECIMALS) -> tuple:
        """Hashable table key with acc components quantized to the grid."""
        return (self.state, quantize(self.acc, decimals), self.step)


class InvalidMomdpError(ValueError):
    """An environment failed its structural invariants."""

    def __init__(self, violations: list[str]):
        self.violations = list(violations)
        msg = "invalid MOMDP:\n" + "\n".join(f"  - {v}" for v in self.violations)
        super().__init__(msg)


@dataclass(frozen=True)
class Momdp:
    """Finite multi-objective MDP.

    Attributes:
        states: state ids in index order (index order breaks ties everywhere).
        terminal: ids of absorbing end states (no outgoing transitions).
        actions: per-state action ids in index order; empty for terminals.
        transitions: (state, action) -> ((next_state, prob), ...).
        rewards: (state, action, next_state) -> ((vector, prob), ...).
        gamma: discount factor in [0, 1].
        mu: ((state, prob), ...) distribution over initial states.
        d: number of objectives (reward vector dimension).
        horizon: maximum episode length; every trajectory must reach a
            terminal state within this many steps.
    """

    states: tuple[str, ...]
    terminal: frozenset[str]
    actions: dict[str, tuple[str, ...]]
    transitions: dict[tuple[str, str], tuple[tuple[str, float], ...]]
    rewards: dict[tuple[str, str, str], tuple[tuple[Vector, float], ...]]
    gamma: float
    mu: tuple[tuple[str, float], ...]
    d: int
    horizon: int

    def is_terminal(self, state: str) -> bool:
        return state in self.terminal

    def legal_actions(self, state: str) -> tuple[str, ...]:
        return self.actions.get(state, ())

    def transition_pairs(self, state: str, action: str) -> tuple[tuple[str, float], ...]:
        return self.transitions[(state, action)]

    def reward_pairs(self, state: str, action: str, next_state: str) -> tuple[tuple[Vector, float], ...]:
        return self.rewards[(state, action, next_state)]

    @cached_property
    def index(self) -> dict[str, int]:
        return {s: i for i, s in enumerate(self.states)}

    def to_dict(self) -> dict:
        """Canonical plain-data form (the on-disk schema)."""
        trans = []
        rew = []
        for s in self.states:
            for a in self.actions.get(s, ()):
                for s2, p in self.transitions.get((s, a), ()):
                    trans.append({"from": s, "action": a, "to": s2, "prob": p})
                    outcomes = self.rewards.get((s, a, s2))
                    if outcomes is not None:
                        rew.append(
                            {
                                "from": s,
                                "action": a,
                                "to": s2,
                                "outcomes": [{"vector": list(v), "prob": q} for v, q in outcomes],
                            }
                        )
        return {
            "d": self.d,
            "gamma": self.gamma,
            "horizon": self.horizon,
            "states": [{"id": s, "terminal": s in self.terminal} for s in self.states],
            "mu": {s: p for s, p in self.mu},
            "transitions": trans,
            "rewards": rew,
        }

    @cached_property
    def identity(self) -> str:
        """Content hash, used to pair reports with the environment they ran on."""
        blob = json.dumps(self.to_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


def make_momdp(
    *,
    d: int,
    gamma: float,
    horizon: int,
    states: list[tuple[str, bool]],
    mu: dict[str, float],
    transitions: list[tuple[str, str, str, float]],
    rewards: list[tuple[str, str, str, list[tuple[Vector, float]]]],
) -> Momdp:
    """Assemble a Momdp from row-oriented data.

    Construction is permissive (invariants are checked by validate(), not
    here) so that deliberately broken instances can be built and inspected.
    Action order per state follows first appearance in the transitions list.
    """
    action_order: dict[str, list[str]] = {}
    trans: dict[tuple[str, str], list[tuple[str, float]]] = {}
    for frm, action, to, prob in transitions:
        acts = action_order.setdefault(frm, [])
        if action not in acts:
            acts.append(action)
        trans.setdefault((frm, action), []).append((to, float(prob)))

    rew: dict[tuple[str, str, str], tuple[tuple[Vector, float], ...]] = {}
    for frm, action, to, outcomes in rewards:
        rew[(frm, action, to)] = tuple((vec(v), float(p)) for v, p in outcomes)

    return Momdp(
        states=tuple(s for s, _ in states),
        terminal=frozenset(s for s, term in states if term),
        actions={s: tuple(a) for s, a in ((s, action_order.get(s, [])) for s, _ in states)},
        transitions={k: tuple(v) for k, v in trans.items()},
        rewards=rew,
        gamma=float(gamma),
        mu=tuple((s, float(p)) for s, p in mu.items()),
        d=int(d),
        horizon=int(horizon),
    )


def augment(momdp: Momdp, state: str, acc: Vector, step: int) -> AugmentedState:
    """Pack a state and its accumulated reward into an augmented observation."""
    if state not in momdp.index:
        raise ValueError(f"unknown state id {state!r}")
    if len(acc) != momdp.d:
        raise ValueError(f"accumulated reward dimension {len(acc)} != {momdp.d}")
    if not 0 <= step <= momdp.horizon:
        raise ValueError(f"step {step} outside [0, {momdp.horizon}]")
    return AugmentedState(state=state, acc=vec(acc), step=step)


def validate(momdp: Momdp) -> list[str]:
    """Check all structural invariants; returns violations (empty iff valid).

    Violations are data, not exceptions: each entry names the offending
    state/action/distribution.
    """
    v: list[str] = []
    known = set(momdp.states)

    if momdp.d < 1:
        v.append(f"objective count {momdp.d} < 1")
    if momdp.horizon < 1:
        v.append(f"horizon {momdp.horizon} < 1")
    if not 0.0 <= momdp.gamma <= 1.0:
        v.append(f"gamma {momdp.gamma:g} outside [0, 1]")

    mass = sum(p for _, p in momdp.mu)
    if abs(mass - 1.0) > PROB_TOL:
        v.append(f"initial distribution mass {mass:g} != 1")
    for s, p in momdp.mu:
        if s not in known:
            v.append(f"initial distribution names unknown state {s!r}")
        elif p > 0 and momdp.is_terminal(s):
            v.append(f"initial mass {p:g} on terminal state {s}")
        if p < 0:
            v.append(f"negative initial probability {p:g} for state {s}")

    for s in momdp.states:
        acts = momdp.legal_actions(s)
        if momdp.is_terminal(s):
            if acts:
                v.append(f"terminal state {s} has outgoing transitions")
            continue
        if not acts:
            v.append(f"state {s} has no actions")
        for a in acts:
            pairs = momdp.transitions.get((s, a))
            if not pairs:
                v.append(f"missing transition distribution for ({s}, {a})")
                continue
            mass = sum(p for _, p in pairs)
            if abs(mass - 1.0) > PROB_TOL:
                v.append(f"transition mass {mass:g} != 1 for ({s}, {a})")
            for s2, p in pairs:
                if p < 0:
                    v.append(f"negative transition probability {p:g} for ({s}, {a}, {s2})")
                if s2 not in known:
                    v.append(f"transition to unknown state {s2!r} from ({s}, {a})")
                    continue
                if p <= 0:
                    continue
                outcomes = momdp.rewards.get((s, a, s2))
                if not outcomes:
                    v.append(f"missing reward distribution for ({s}, {a}, {s2})")
                    continue
                rmass = sum(q for _, q in outcomes)
                if abs(rmass - 1.0) > PROB_TOL:
                    v.append(f"reward mass {rmass:g} != 1 for ({s}, {a}, {s2})")
                for r, q in outcomes:
                    if len(r) != momdp.d:
                        v.append(f"reward dimension {len(r)} != {momdp.d} for ({s}, {a}, {s2})")
                    if q < 0:
                        v.append(f"negative reward probability {q:g} for ({s}, {a}, {s2})")
                    if any(not math.isfinite(x) for x in r):
                        v.append(f"non-finite reward vector {r} for ({s}, {a}, {s2})")

    v.extend(_check_termination(momdp))
    return v


def _check_termination(momdp: Momdp) -> list[str]:
    """Reachability scan: every trajectory must end within the horizon."""
    frontier = {s for s, p in momdp.mu if p > 0 and s in momdp.index}
    for depth in range(momdp.horizon):
        nxt: set[str] = set()
        for s in frontier:
            if momdp.is_terminal(s):
                continue
            for a in momdp.legal_actions(s):
                for s2, p in momdp.transitions.get((s, a), ()):
                    if p > 0 and s2 in momdp.index:
                        nxt.add(s2)
        frontier = nxt
        if not frontier:
            return []
    stuck = sorted(s for s in frontier if not momdp.is_terminal(s))
    return [f"non-terminal state {s} reachable at step {momdp.horizon} (horizon)" for s in stuck]


def check_valid(momdp: Momdp) -> Momdp:
    """Raise InvalidMomdpError unless the environment is structurally sound."""
    violations = validate(momdp)
    if violations:
        raise InvalidMomdpError(violations)
    return momdp
