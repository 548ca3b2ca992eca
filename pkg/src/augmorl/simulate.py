"""Seeded episode rollouts under true/proxy/absent reward observability.

A regime decides which reward signal feeds the accumulated component of the
agent's observation:

- ``true``: the sampled environment rewards (full observability),
- ``proxy``: a reward model's expected rewards per transition,
- ``none``: nothing; the accumulated component stays frozen at zero,
- ``markov``: the policy sees the bare state, so no accumulation at all.

True sampled rewards are always recorded in the trajectory: the environment
pays real utility whether or not the agent can observe it.
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass

from .momdp import AugmentedState, Momdp, Vector, accumulate, quantize, zeros
from .policy import Policy

REGIMES = ("markov", "true", "proxy", "none")

_DEFAULT_REGIME = {"markov": "markov", "true-augmented": "true", "proxy-augmented": "proxy"}


def stream(*parts) -> random.Random:
    """Deterministic RNG stream derived by hashing the key parts.

    sha256-based so streams are stable across platforms and processes, and
    per-episode streams are independent of rollout order.
    """
    token = ":".join(str(p) for p in parts)
    digest = hashlib.sha256(token.encode("utf-8")).digest()
    return random.Random(int.from_bytes(digest[:16], "big"))


def draw(pairs, rng: random.Random):
    """Sample from ((item, prob), ...); last item absorbs float slack."""
    x = rng.random()
    cum = 0.0
    for item, p in pairs:
        cum += p
        if x < cum:
            return item
    return pairs[-1][0]


@dataclass(frozen=True)
class Step:
    state: str
    action: str
    next_state: str
    reward: Vector


@dataclass(frozen=True)
class Trajectory:
    """One episode: the sampled steps plus both accumulation traces.

    true_accs holds the discounted sum of sampled rewards after each step;
    cond_accs holds whatever the regime fed to the policy's observation.
    """

    initial_state: str
    seed: object
    regime: str
    steps: tuple[Step, ...]
    true_accs: tuple[Vector, ...]
    cond_accs: tuple[Vector, ...]

    @property
    def true_return(self) -> Vector:
        return self.true_accs[-1]

    @property
    def final_state(self) -> str:
        return self.steps[-1].next_state


def resolve_regime(policy: Policy, regime: str | None, reward_model, strict_none: bool = False) -> str:
    """Validate and default the regime for a policy/model combination."""
    if regime is None:
        regime = _DEFAULT_REGIME[policy.observation_kind]
    if regime not in REGIMES:
        raise ValueError(f"unknown regime {regime!r} (expected one of {REGIMES})")
    if regime == "proxy" and reward_model is None:
        raise ValueError("proxy regime requires a reward model")
    if regime == "none" and strict_none:
        raise ValueError("reward signal unavailable and strict mode is on")
    if regime == "markov" and policy.observation_kind != "markov":
        raise ValueError(f"markov regime cannot drive a {policy.observation_kind} policy")
    return regime


def simulate_episode(
    momdp: Momdp,
    policy: Policy,
    regime: str | None = None,
    reward_model=None,
    seed=0,
    strict_none: bool = False,
) -> Trajectory:
    """Roll one episode; bitwise-identical for identical arguments.

    The observation handed to the policy is the bare state for markov
    policies and an AugmentedState carrying the regime's accumulated reward
    otherwise.
    """
    regime = resolve_regime(policy, regime, reward_model, strict_none)
    rng = stream("episode", seed)

    state = draw(momdp.mu, rng)
    true_acc = zeros(momdp.d)
    cond_acc = zeros(momdp.d)
    t = 0
    steps: list[Step] = []
    true_accs: list[Vector] = []
    cond_accs: list[Vector] = []

    while not momdp.is_terminal(state):
        if t >= momdp.horizon:
            raise RuntimeError(f"episode exceeded horizon {momdp.horizon} without terminating")
        if policy.observation_kind == "markov":
            obs = state
        else:
            obs = AugmentedState(state=state, acc=cond_acc, step=t)
        action = policy.action_for(obs, momdp)
        next_state = draw(momdp.transition_pairs(state, action), rng)
        reward = draw(momdp.reward_pairs(state, action, next_state), rng)

        true_acc = accumulate(true_acc, reward, momdp.gamma, t)
        # the conditioning trace chains on the policy's key grid (matches the
        # exact evaluator and solver closures key for key)
        if regime == "true":
            cond_acc = quantize(accumulate(cond_acc, reward, momdp.gamma, t), policy.decimals)
        elif regime == "proxy":
            predicted = reward_model.predict(state, action, next_state)
            cond_acc = quantize(accumulate(cond_acc, predicted, momdp.gamma, t), policy.decimals)
        # none/markov: cond_acc stays frozen at zero

        steps.append(Step(state, action, next_state, reward))
        true_accs.append(true_acc)
        cond_accs.append(cond_acc)
        state = next_state
        t += 1

    return Trajectory(
        initial_state=steps[0].state if steps else state,
        seed=seed,
        regime=regime,
        steps=tuple(steps),
        true_accs=tuple(true_accs),
        cond_accs=tuple(cond_accs),
    )
