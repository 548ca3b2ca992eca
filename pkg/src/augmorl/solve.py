"""Exact solvers for finite-horizon multi-objective control.

Two independent routes to an optimum:

- BackwardInductionSolver: dynamic programming over the reachable
  reward-augmented state space (utility applied at episode end).
- PolicyEnumerationSolver: brute-force evaluation of every deterministic
  policy for a given observation kind. Slower, but it serves as an oracle
  for the dynamic-programming route and covers observation kinds (markov,
  proxy-augmented) where the augmented Bellman recursion does not apply.

Both follow the sklearn estimator protocol: hyperparameters at
construction, learned attributes (policy_, value_) after fit().
"""

from __future__ import annotations

from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .exact import BRANCH_CAP, CapExceededError, esr_evaluate, ser_evaluate
from .momdp import DECIMALS, Momdp, accumulate, check_valid, quantize, zeros
from .policy import FIRST, OBSERVATION_KINDS, Policy

CRITERIA = ("esr", "ser")

#: value ties closer than this are broken lexicographically
TIE_EPS = 1e-12

_REGIME_FOR_KIND = {"markov": "markov", "true-augmented": "true", "proxy-augmented": "proxy"}


class BackwardInductionSolver(BaseEstimator):
    """Optimal deterministic policy over true-reward-augmented observations.

    Works backwards from episode end over every reachable (state, accumulated
    reward, step) triple: terminal observations are worth u(acc), and each
    earlier observation takes the action maximising the expected value of its
    successors.  Because the utility lands entirely at termination, this
    maximises the expected scalarised (per-episode) return.

    Accumulated rewards are tracked at key-grid resolution (10**-decimals),
    the same rule the exact evaluator and simulator apply to the observations
    a policy table can hold; integer-valued rewards are unaffected.

    Attributes after fit: policy_, value_, reachable_ (observation count).
    """

    def __init__(self, utility, *, state_cap: int = 1_000_000, decimals: int = DECIMALS):
        self.utility = utility
        self.state_cap = state_cap
        self.decimals = decimals

    def fit(self, momdp: Momdp, y=None):
        check_valid(momdp)
        z = quantize(zeros(momdp.d), self.decimals)
        starts = [(s, z, 0) for s, p in momdp.mu if p > 0]

        closure = set(starts)
        frontier = list(starts)
        while frontier:
            state, acc, t = frontier.pop()
            if momdp.is_terminal(state):
                continue
            for action in momdp.legal_actions(state):
                for next_state, p1 in momdp.transition_pairs(state, action):
                    if p1 <= 0:
                        continue
                    for reward, p2 in momdp.reward_pairs(state, action, next_state):
                        if p2 <= 0:
                            continue
                        nxt = (
                            next_state,
                            quantize(accumulate(acc, reward, momdp.gamma, t), self.decimals),
                            t + 1,
                        )
                        if nxt not in closure:
                            closure.add(nxt)
                            if len(closure) > self.state_cap:
                                raise CapExceededError(
                                    f"reachable augmented-state count exceeds cap {self.state_cap}"
                                )
                            frontier.append(nxt)

        values: dict[tuple, float] = {}
        table: dict[tuple, str] = {}
        for key in sorted(closure, key=lambda k: -k[2]):
            state, acc, t = key
            if momdp.is_terminal(state):
                values[key] = float(self.utility(acc))
                continue
            best_value = None
            best_action = None
            for action in momdp.legal_actions(state):
                total = 0.0
                for next_state, p1 in momdp.transition_pairs(state, action):
                    if p1 <= 0:
                        continue
                    for reward, p2 in momdp.reward_pairs(state, action, next_state):
                        if p2 <= 0:
                            continue
                        nxt = (
                            next_state,
                            quantize(accumulate(acc, reward, momdp.gamma, t), self.decimals),
                            t + 1,
                        )
                        total += p1 * p2 * values[nxt]
                if best_value is None or total > best_value:
                    best_value = total
                    best_action = action
            values[key] = best_value
            table[key] = best_action

        self.momdp_ = momdp
        self.reachable_ = len(closure)
        self.value_ = float(sum(p * values[(s, z, 0)] for s, p in momdp.mu if p > 0))
        self.policy_ = Policy(
            observation_kind="true-augmented",
            table=table,
            fallback=FIRST,
            decimals=self.decimals,
        )
        return self

    def predict(self, obs) -> str:
        check_is_fitted(self, "policy_")
        return self.policy_.action_for(obs, self.momdp_)


class PolicyEnumerationSolver(BaseEstimator):
    """Brute-force argmax over deterministic policies of one observation kind.

    Enumerates decision trees: a policy only needs actions at observations it
    can reach under its own choices, so candidates are grown by repeatedly
    assigning an action to the first uncovered reachable observation.  Every
    complete candidate is scored exactly (ESR or SER); ties are broken by the
    lexicographically smallest table (observations in canonical order, action
    indices as values).

    Attributes after fit: policy_, value_, exact_, n_policies_.
    """

    def __init__(
        self,
        utility,
        observation_kind: str = "markov",
        *,
        criterion: str = "esr",
        reward_model=None,
        policy_cap: int = 1_000_000,
        branch_cap: int = BRANCH_CAP,
        decimals: int = DECIMALS,
    ):
        self.utility = utility
        self.observation_kind = observation_kind
        self.criterion = criterion
        self.reward_model = reward_model
        self.policy_cap = policy_cap
        self.branch_cap = branch_cap
        self.decimals = decimals

    def fit(self, momdp: Momdp, y=None):
        if self.observation_kind not in OBSERVATION_KINDS:
            raise ValueError(f"unknown observation kind {self.observation_kind!r}")
        if self.criterion not in CRITERIA:
            raise ValueError(f"unknown criterion {self.criterion!r} (expected esr or ser)")
        if self.observation_kind == "proxy-augmented" and self.reward_model is None:
            raise ValueError("proxy-augmented enumeration requires a reward model")
        check_valid(momdp)

        kind = self.observation_kind
        regime = _REGIME_FOR_KIND[kind]
        evaluate = esr_evaluate if self.criterion == "esr" else ser_evaluate
        if kind == "markov":
            initial = [s for s, p in momdp.mu if p > 0]
        else:
            z = quantize(zeros(momdp.d), self.decimals)
            initial = [(s, z, 0) for s, p in momdp.mu if p > 0]

        def sort_key(key):
            if kind == "markov":
                return (momdp.index[key],)
            state, acc, t = key
            return (momdp.index[state], t, acc)

        def successors(key, action):
            if kind == "markov":
                return [s2 for s2, p in momdp.transition_pairs(key, action) if p > 0]
            state, acc, t = key
            out = []
            for next_state, p1 in momdp.transition_pairs(state, action):
                if p1 <= 0:
                    continue
                if kind == "proxy-augmented":
                    r = self.reward_model.predict(state, action, next_state)
                    out.append((next_state, quantize(accumulate(acc, r, momdp.gamma, t), self.decimals), t + 1))
                else:
                    for reward, p2 in momdp.reward_pairs(state, action, next_state):
                        if p2 > 0:
                            out.append(
                                (next_state, quantize(accumulate(acc, reward, momdp.gamma, t), self.decimals), t + 1)
                            )
            return out

        def next_undecided(table):
            seen = set()
            frontier = list(initial)
            missing = []
            while frontier:
                key = frontier.pop()
                if key in seen:
                    continue
                seen.add(key)
                state = key if kind == "markov" else key[0]
                if momdp.is_terminal(state):
                    continue
                action = table.get(key)
                if action is None:
                    missing.append(key)
                    continue
                frontier.extend(successors(key, action))
            if not missing:
                return None
            return min(missing, key=sort_key)

        def canonical(table):
            rows = []
            for key, action in table.items():
                state = key if kind == "markov" else key[0]
                rows.append((sort_key(key), momdp.legal_actions(state).index(action)))
            rows.sort()
            return tuple(rows)

        best: dict = {"value": None, "table": None, "canon": None, "exact": None}
        count = 0

        def search(table):
            nonlocal count
            key = next_undecided(table)
            if key is None:
                count += 1
                if count > self.policy_cap:
                    raise CapExceededError(f"deterministic policy count exceeds cap {self.policy_cap}")
                candidate = Policy(observation_kind=kind, table=dict(table), decimals=self.decimals)
                exact = evaluate(momdp, candidate, self.utility, self.reward_model, regime, self.branch_cap)
                canon = canonical(table)
                if (
                    best["value"] is None
                    or exact.value > best["value"] + TIE_EPS
                    or (abs(exact.value - best["value"]) <= TIE_EPS and canon < best["canon"])
                ):
                    best.update(value=exact.value, table=dict(table), canon=canon, exact=exact)
                return
            state = key if kind == "markov" else key[0]
            for action in momdp.legal_actions(state):
                table[key] = action
                search(table)
                del table[key]

        search({})

        self.momdp_ = momdp
        self.n_policies_ = count
        self.exact_ = best["exact"]
        self.value_ = float(best["value"])
        self.policy_ = Policy(
            observation_kind=kind,
            table=best["table"],
            fallback=FIRST,
            decimals=self.decimals,
        )
        return self

    def predict(self, obs) -> str:
        check_is_fitted(self, "policy_")
        return self.policy_.action_for(obs, self.momdp_)
