"""Built-in example environments and a seeded random instance generator.

fig1 is the minimal environment where accumulated-reward conditioning
matters: a stochastic first reward decides which second action completes a
balanced return.  fig2 adds a deterministic detour whose value sits between
the augmented optimum and the best reward-blind play, which makes it the
minimal example where the optimal policy changes when rewards stop being
observable.

The generator builds layered DAGs (transitions only move to strictly deeper
layers), so every trajectory terminates within the horizon by construction.
"""

from __future__ import annotations

from dataclasses import dataclass

from .momdp import Momdp, check_valid, make_momdp
from .simulate import stream


def fig1() -> Momdp:
    """Two-step chain: random (4,0)/(0,4) first, complementary picks second."""
    return make_momdp(
        d=2,
        gamma=1.0,
        horizon=2,
        states=[("s0", False), ("s1", False), ("T", True)],
        mu={"s0": 1.0},
        transitions=[
            ("s0", "a1", "s1", 1.0),
            ("s1", "aL", "T", 1.0),
            ("s1", "aR", "T", 1.0),
        ],
        rewards=[
            ("s0", "a1", "s1", [((4.0, 0.0), 0.5), ((0.0, 4.0), 0.5)]),
            ("s1", "aL", "T", [((0.0, 4.0), 1.0)]),
            ("s1", "aR", "T", [((4.0, 0.0), 1.0)]),
        ],
    )


def fig2() -> Momdp:
    """fig1 plus a deterministic (3,3) detour via a2/s2."""
    return make_momdp(
        d=2,
        gamma=1.0,
        horizon=2,
        states=[("s0", False), ("s1", False), ("s2", False), ("T", True)],
        mu={"s0": 1.0},
        transitions=[
            ("s0", "a1", "s1", 1.0),
            ("s0", "a2", "s2", 1.0),
            ("s1", "aL", "T", 1.0),
            ("s1", "aR", "T", 1.0),
            ("s2", "a1", "T", 1.0),
        ],
        rewards=[
            ("s0", "a1", "s1", [((4.0, 0.0), 0.5), ((0.0, 4.0), 0.5)]),
            ("s0", "a2", "s2", [((0.0, 0.0), 1.0)]),
            ("s1", "aL", "T", [((0.0, 4.0), 1.0)]),
            ("s1", "aR", "T", [((4.0, 0.0), 1.0)]),
            ("s2", "a1", "T", [((3.0, 3.0), 1.0)]),
        ],
    )


BUILTINS = {"fig1": fig1, "fig2": fig2}


def builtin(name: str) -> Momdp:
    if name not in BUILTINS:
        raise ValueError(f"unknown builtin environment {name!r} (have: {', '.join(BUILTINS)})")
    return BUILTINS[name]()


@dataclass(frozen=True)
class GeneratorConfig:
    """Ranges for random episodic MOMDPs (all ranges inclusive).

    n_states counts non-terminal states.  deterministic makes transitions,
    rewards, and the initial state all deterministic; terminal_only_rewards
    zeroes every reward vector except on transitions into terminal states.
    Construction is always a layered DAG, which guarantees termination;
    ensure_termination only toggles the post-construction validation check.
    """

    n_states: tuple[int, int] = (2, 4)
    n_terminals: tuple[int, int] = (1, 2)
    n_actions: tuple[int, int] = (1, 3)
    n_outcomes: tuple[int, int] = (1, 2)
    n_support: tuple[int, int] = (1, 2)
    d: int = 2
    reward_range: tuple[int, int] = (0, 3)
    gamma: float = 1.0
    horizon: int = 3
    deterministic: bool = False
    terminal_only_rewards: bool = False
    ensure_termination: bool = True
    seed: int = 0


def _weights(rng, n: int, deterministic: bool) -> list[float]:
    if deterministic or n == 1:
        return [1.0] + [0.0] * (n - 1)
    w = [rng.randint(1, 9) for _ in range(n)]
    total = sum(w)
    return [x / total for x in w]


def generate(config: GeneratorConfig) -> Momdp:
    """Build a random valid episodic MOMDP; identical for identical configs."""
    for name in ("n_states", "n_terminals", "n_actions", "n_outcomes", "n_support", "reward_range"):
        lo, hi = getattr(config, name)
        if lo > hi or (name != "reward_range" and lo < 1):
            raise ValueError(f"empty {name} range ({lo}, {hi})")
    if config.horizon < 1:
        raise ValueError(f"horizon must be positive, got {config.horizon}")

    rng = stream("generate", config.seed)
    lo, hi = config.n_states
    n_states = rng.randint(lo, hi)
    n_terminals = rng.randint(*config.n_terminals)
    names = [f"s{i}" for i in range(n_states)]
    terminals = [f"T{i}" for i in range(n_terminals)]

    # layered depths: s0 starts at 0, others anywhere before the horizon
    depth = {names[0]: 0}
    for s in names[1:]:
        depth[s] = rng.randint(0, config.horizon - 1)
    start_states = [s for s in names if depth[s] == 0]

    transitions = []
    rewards = []
    for s in names:
        n_actions = rng.randint(*config.n_actions)
        for j in range(n_actions):
            action = f"a{j}"
            deeper = [x for x in names if depth[x] > depth[s]] + terminals
            k = 1 if config.deterministic else min(rng.randint(*config.n_support), len(deeper))
            support = rng.sample(deeper, k)
            probs = _weights(rng, k, config.deterministic)
            for s2, p in zip(support, probs):
                transitions.append((s, action, s2, p))
                n_outcomes = 1 if config.deterministic else rng.randint(*config.n_outcomes)
                if config.terminal_only_rewards and s2 not in terminals:
                    outcomes = [((0.0,) * config.d, 1.0)]
                else:
                    vectors = [
                        tuple(float(rng.randint(*config.reward_range)) for _ in range(config.d))
                        for _ in range(n_outcomes)
                    ]
                    outcome_probs = _weights(rng, n_outcomes, config.deterministic)
                    outcomes = list(zip(vectors, outcome_probs))
                rewards.append((s, action, s2, outcomes))

    if config.deterministic:
        mu = {start_states[0]: 1.0}
    else:
        probs = _weights(rng, len(start_states), False)
        mu = {s: p for s, p in zip(start_states, probs)}

    momdp = make_momdp(
        d=config.d,
        gamma=config.gamma,
        horizon=config.horizon,
        states=[(s, False) for s in names] + [(t, True) for t in terminals],
        mu=mu,
        transitions=transitions,
        rewards=rewards,
    )
    if config.ensure_termination:
        check_valid(momdp)
    return momdp
