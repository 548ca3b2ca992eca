"""Exact policy evaluation by exhaustive branch enumeration.

Every stochastic choice (initial state, transition, reward outcome) is
expanded into a weighted branch, so the result is the full distribution of
episode returns under a deterministic policy.  The utility can then be
applied inside the expectation (per-episode trade-offs) or outside it
(average trade-offs over many episodes).

Proxy/none regimes keep two running sums per branch: the conditioning
accumulator the policy observes, and the true return that scores the branch.
"""

from __future__ import annotations

from dataclasses import dataclass

from .momdp import PROB_TOL, AugmentedState, Momdp, Vector, accumulate, quantize, zeros
from .policy import Policy
from .simulate import resolve_regime
from .utility import UtilityFunction

#: default branch-count guard for enumeration
BRANCH_CAP = 10_000_000

Branch = tuple[float, Vector]


class CapExceededError(RuntimeError):
    """An exact computation would exceed its configured resource cap."""


@dataclass(frozen=True)
class ExactValue:
    """An exactly-computed policy value.

    expected_return is the probability-weighted mean return vector (the
    inner quantity for SER); trajectory_count is the number of enumerated
    outcome branches.
    """

    value: float
    expected_return: Vector
    trajectory_count: int


def enumerate_outcomes(
    momdp: Momdp,
    policy: Policy,
    reward_model=None,
    regime: str | None = None,
    branch_cap: int = BRANCH_CAP,
) -> list[Branch]:
    """All (probability, true return) branches of the policy's episode tree."""
    regime = resolve_regime(policy, regime, reward_model)
    branches: list[Branch] = []
    z = zeros(momdp.d)
    nodes = 0
    stack = [(s, z, z, 0, p) for s, p in momdp.mu if p > 0]

    while stack:
        state, true_acc, cond_acc, t, prob = stack.pop()
        if momdp.is_terminal(state):
            branches.append((prob, true_acc))
            continue
        if t >= momdp.horizon:
            raise RuntimeError(f"branch exceeded horizon {momdp.horizon} without terminating")
        if policy.observation_kind == "markov":
            obs = state
        else:
            obs = AugmentedState(state=state, acc=cond_acc, step=t)
        action = policy.action_for(obs, momdp)
        for next_state, p1 in momdp.transition_pairs(state, action):
            if p1 <= 0:
                continue
            # conditioning accumulators chain on the policy's key grid so the
            # branch tree visits exactly the observations a table can hold
            if regime == "proxy":
                predicted = reward_model.predict(state, action, next_state)
                step_cond = quantize(accumulate(cond_acc, predicted, momdp.gamma, t), policy.decimals)
            else:
                step_cond = cond_acc
            for reward, p2 in momdp.reward_pairs(state, action, next_state):
                if p2 <= 0:
                    continue
                next_true = accumulate(true_acc, reward, momdp.gamma, t)
                if regime == "true":
                    next_cond = quantize(accumulate(cond_acc, reward, momdp.gamma, t), policy.decimals)
                else:
                    next_cond = step_cond
                nodes += 1
                if nodes > branch_cap:
                    raise CapExceededError(
                        f"too large for exact enumeration: more than {branch_cap} branches"
                    )
                stack.append((next_state, next_true, next_cond, t + 1, prob * p1 * p2))

    mass = sum(p for p, _ in branches)
    if abs(mass - 1.0) > PROB_TOL:
        raise RuntimeError(f"enumerated branch mass {mass:g} != 1 (invalid environment?)")
    return branches


def _expected_return(branches: list[Branch], d: int) -> Vector:
    total = [0.0] * d
    for p, g in branches:
        for i, x in enumerate(g):
            total[i] += p * x
    return tuple(total)


def esr_evaluate(
    momdp: Momdp,
    policy: Policy,
    utility: UtilityFunction,
    reward_model=None,
    regime: str | None = None,
    branch_cap: int = BRANCH_CAP,
) -> ExactValue:
    """Expected scalarised return E[u(return)]: utility inside the expectation."""
    branches = enumerate_outcomes(momdp, policy, reward_model, regime, branch_cap)
    value = sum(p * utility(g) for p, g in branches)
    return ExactValue(float(value), _expected_return(branches, momdp.d), len(branches))


def ser_evaluate(
    momdp: Momdp,
    policy: Policy,
    utility: UtilityFunction,
    reward_model=None,
    regime: str | None = None,
    branch_cap: int = BRANCH_CAP,
) -> ExactValue:
    """Scalarised expected return u(E[return]): utility outside the expectation."""
    branches = enumerate_outcomes(momdp, policy, reward_model, regime, branch_cap)
    expected = _expected_return(branches, momdp.d)
    return ExactValue(float(utility(expected)), expected, len(branches))
