"""Deterministic policies keyed by Markov or reward-augmented observations."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

from .momdp import DECIMALS, AugmentedState, Momdp, quantize

OBSERVATION_KINDS = ("markov", "true-augmented", "proxy-augmented")

#: fallback sentinel: use the lowest-indexed legal action of the state
FIRST = "first"


class MissingObservationError(KeyError):
    """A policy was queried on an observation it does not cover."""


def observation_key(kind: str, state: str, acc=None, step=None, decimals: int = DECIMALS):
    if kind == "markov":
        return state
    return (state, quantize(acc, decimals), int(step))


@dataclass(frozen=True)
class Policy:
    """Deterministic action map over one observation kind.

    Table keys are state ids (markov) or (state, quantized acc, step)
    triples (augmented kinds).  `fallback` makes the policy total: an
    explicit action id, the FIRST sentinel, or None to fail on misses.
    Immutable after construction.
    """

    observation_kind: str
    table: dict = field(default_factory=dict)
    fallback: str | None = None
    decimals: int = DECIMALS

    def __post_init__(self):
        if self.observation_kind not in OBSERVATION_KINDS:
            raise ValueError(f"unknown observation kind {self.observation_kind!r}")

    def lookup_key(self, obs):
        if self.observation_kind == "markov":
            return obs.state if isinstance(obs, AugmentedState) else obs
        if not isinstance(obs, AugmentedState):
            raise ValueError(
                f"{self.observation_kind} policy needs an augmented observation, got {obs!r}"
            )
        return obs.key(self.decimals)

    def action_for(self, obs, momdp: Momdp) -> str:
        """Resolve the action for an observation, applying the fallback on misses."""
        key = self.lookup_key(obs)
        state = key if self.observation_kind == "markov" else key[0]
        legal = momdp.legal_actions(state)
        action = self.table.get(key)
        if action is not None:
            if action not in legal:
                raise ValueError(f"policy maps {key!r} to illegal action {action!r}")
            return action
        if self.fallback is None:
            raise MissingObservationError(f"no action for observation {key!r} and no fallback")
        if self.fallback == FIRST:
            if not legal:
                raise MissingObservationError(f"state {state} has no legal actions")
            return legal[0]
        if self.fallback not in legal:
            raise MissingObservationError(
                f"fallback action {self.fallback!r} is illegal in state {state}"
            )
        return self.fallback

    def entries(self) -> list[dict]:
        """Plain-data rows for serialization, in a canonical sorted order."""
        rows = []
        for key, action in self.table.items():
            if self.observation_kind == "markov":
                rows.append({"state": key, "acc": None, "step": None, "action": action})
            else:
                state, acc, step = key
                rows.append({"state": state, "acc": list(acc), "step": step, "action": action})
        rows.sort(key=lambda r: (r["state"], r["step"] if r["step"] is not None else -1, r["acc"] or []))
        return rows

    def identity(self) -> str:
        blob = json.dumps(
            {
                "observation_kind": self.observation_kind,
                "fallback": self.fallback,
                "decimals": self.decimals,
                "entries": self.entries(),
            },
            sort_keys=True,
        ).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


def markov_policy(mapping: dict[str, str], fallback: str | None = None) -> Policy:
    """Convenience constructor for a state-keyed policy."""
    return Policy(observation_kind="markov", table=dict(mapping), fallback=fallback)
