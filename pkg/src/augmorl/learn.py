"""Learning components: a supervised reward model and tabular Q-learning.

The reward model is a per-(state, action, next-state) running mean of
observed reward vectors: the supervised proxy that stands in for the true
reward signal when it is unavailable after deployment.

The Q-learner works over reward-augmented observations and supports three
training modes for the accumulated component:

- ``true-rewards``: condition on sampled rewards (requires the true signal
  at execution time, forever).
- ``full-proxy``: condition on model-expected rewards and use the
  model-based accumulator in the terminal utility target too.
- ``asymmetric-proxy``: condition on model-expected rewards but score the
  terminal target with the true accumulator (true rewards exist during
  training by assumption).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .exact import esr_evaluate
from .momdp import DECIMALS, AugmentedState, Momdp, Vector, accumulate, check_valid, quantize, vec, zeros
from .policy import FIRST, Policy
from .simulate import draw, stream

TRAINING_MODES = ("true-rewards", "full-proxy", "asymmetric-proxy")

Transition = tuple[str, str, str, Vector]


class UnseenTransitionError(KeyError):
    """A strict reward model was asked about a transition it never observed."""


def sample_transitions(momdp: Momdp, n: int, seed=0, behavior: Policy | None = None) -> list[Transition]:
    """Collect n (state, action, next_state, reward) samples from rollouts.

    Behavior defaults to uniform-random over legal actions; a policy may be
    supplied instead (augmented behaviors observe true rewards; sampling
    happens at training time, when the signal is available).  Episodes use
    per-index streams, so sampling could be sharded and merged.
    """
    if n <= 0:
        raise ValueError(f"sample count must be positive, got {n}")
    out: list[Transition] = []
    grid = behavior.decimals if behavior is not None else DECIMALS
    episode = 0
    while len(out) < n:
        rng = stream("transitions", seed, episode)
        episode += 1
        state = draw(momdp.mu, rng)
        acc = zeros(momdp.d)
        t = 0
        while not momdp.is_terminal(state) and len(out) < n:
            if behavior is None:
                legal = momdp.legal_actions(state)
                action = legal[rng.randrange(len(legal))]
            else:
                obs = state if behavior.observation_kind == "markov" else AugmentedState(state, acc, t)
                action = behavior.action_for(obs, momdp)
            next_state = draw(momdp.transition_pairs(state, action), rng)
            reward = draw(momdp.reward_pairs(state, action, next_state), rng)
            out.append((state, action, next_state, reward))
            acc = quantize(accumulate(acc, reward, momdp.gamma, t), grid)
            state = next_state
            t += 1
    return out


class RewardModel(BaseEstimator):
    """Running-mean estimator of the expected reward vector per transition.

    fit() consumes a list of observed (state, action, next_state, reward)
    samples; predict() returns the stored mean.  Unseen transitions raise in
    strict mode and return a zero vector (with a warning) otherwise.
    Immutable once fitted.
    """

    def __init__(self, strict: bool = False):
        self.strict = strict

    def fit(self, transitions: list[Transition], y=None):
        means: dict[tuple[str, str, str], Vector] = {}
        counts: dict[tuple[str, str, str], int] = {}
        for state, action, next_state, reward in transitions:
            key = (state, action, next_state)
            n = counts.get(key, 0) + 1
            counts[key] = n
            if n == 1:
                means[key] = vec(reward)
            else:
                means[key] = tuple(m + (x - m) / n for m, x in zip(means[key], reward, strict=True))
        if not means:
            raise ValueError("no transitions to fit on")
        self.means_ = means
        self.counts_ = counts
        self.d_ = len(next(iter(means.values())))
        return self

    def predict(self, state: str, action: str, next_state: str) -> Vector:
        check_is_fitted(self, "means_")
        key = (state, action, next_state)
        mean = self.means_.get(key)
        if mean is not None:
            return mean
        if self.strict:
            raise UnseenTransitionError(f"no reward samples for transition {key!r}")
        warnings.warn(f"no reward samples for transition {key!r}; predicting zeros", stacklevel=2)
        return zeros(self.d_)


def fit_reward_model(
    momdp: Momdp,
    samples: int = 10_000,
    seed=0,
    behavior: Policy | None = None,
    strict: bool = False,
) -> RewardModel:
    """Sample transitions and fit a RewardModel in one call."""
    return RewardModel(strict=strict).fit(sample_transitions(momdp, samples, seed, behavior))


@dataclass
class QTable:
    """Tabular action values keyed by quantized augmented observations.

    entries maps (state, acc key, step) to per-action values in the state's
    action order; visits counts updates per entry.
    """

    observation_kind: str
    decimals: int = DECIMALS
    entries: dict[tuple, list[float]] = field(default_factory=dict)
    visits: dict[tuple, list[int]] = field(default_factory=dict)

    def greedy_policy(self, momdp: Momdp, fallback: str | None = FIRST) -> Policy:
        """Extract the greedy deterministic policy (lowest action index on ties)."""
        table = {}
        for key, values in self.entries.items():
            actions = momdp.legal_actions(key[0])
            best = max(range(len(values)), key=lambda i: (values[i], -i))
            table[key] = actions[best]
        return Policy(
            observation_kind=self.observation_kind,
            table=table,
            fallback=fallback,
            decimals=self.decimals,
        )


class QLearner(BaseEstimator):
    """Epsilon-greedy tabular Q-learning over augmented observations.

    The utility lands entirely at episode end, so non-terminal targets carry
    no immediate reward: Q(s_t^A, a) is trained toward max_a' Q(s_{t+1}^A, a')
    and terminal transitions toward u(final accumulated reward).  Epsilon
    decays linearly over ``epsilon_decay`` episodes (defaults to the full
    run); alpha stays constant.

    Deterministic given identical parameters including seed; updates are
    order-dependent, so one run is single-threaded (runs with different
    seeds can execute concurrently).  Attributes after fit: q_table_,
    policy_, curve_ (list of (episode, exact greedy value, epsilon) rows).
    """

    def __init__(
        self,
        utility,
        *,
        episodes: int = 50_000,
        alpha: float = 0.1,
        epsilon_start: float = 1.0,
        epsilon_final: float = 0.01,
        epsilon_decay: int | None = None,
        mode: str = "true-rewards",
        reward_model=None,
        seed=0,
        eval_every: int = 1000,
        decimals: int = DECIMALS,
        warm_start: bool = False,
    ):
        self.utility = utility
        self.episodes = episodes
        self.alpha = alpha
        self.epsilon_start = epsilon_start
        self.epsilon_final = epsilon_final
        self.epsilon_decay = epsilon_decay
        self.mode = mode
        self.reward_model = reward_model
        self.seed = seed
        self.eval_every = eval_every
        self.decimals = decimals
        self.warm_start = warm_start

    def _check_params(self):
        if self.mode not in TRAINING_MODES:
            raise ValueError(f"unknown training mode {self.mode!r} (expected one of {TRAINING_MODES})")
        if self.mode != "true-rewards" and self.reward_model is None:
            raise ValueError(f"{self.mode} mode requires a fitted reward model")
        if not 0 < self.alpha <= 1:
            raise ValueError(f"alpha must be in (0, 1], got {self.alpha}")
        if self.episodes < 1:
            raise ValueError(f"episodes must be positive, got {self.episodes}")
        if self.eval_every < 1:
            raise ValueError(f"eval_every must be positive, got {self.eval_every}")
        for name in ("epsilon_start", "epsilon_final"):
            eps = getattr(self, name)
            if not 0 <= eps <= 1:
                raise ValueError(f"{name} must be in [0, 1], got {eps}")

    def fit(self, momdp: Momdp, y=None):
        self._check_params()
        check_valid(momdp)
        kind = "true-augmented" if self.mode == "true-rewards" else "proxy-augmented"
        regime = "true" if self.mode == "true-rewards" else "proxy"

        if self.warm_start and hasattr(self, "q_table_") and self.q_table_.observation_kind == kind:
            q = self.q_table_
        else:
            q = QTable(observation_kind=kind, decimals=self.decimals)

        # warm-start continuations draw a fresh stream instead of replaying the first
        self.fits_ = getattr(self, "fits_", 0) + 1 if self.warm_start else 1
        rng = stream("train", self.seed, self.fits_)
        decay = self.epsilon_decay if self.epsilon_decay is not None else self.episodes
        curve: list[tuple[int, float, float]] = []
        eps = self.epsilon_start

        for episode in range(self.episodes):
            frac = min(1.0, episode / decay) if decay > 0 else 1.0
            eps = self.epsilon_start + (self.epsilon_final - self.epsilon_start) * frac

            state = draw(momdp.mu, rng)
            true_acc = zeros(momdp.d)
            cond_acc = zeros(momdp.d)
            t = 0
            while not momdp.is_terminal(state):
                actions = momdp.legal_actions(state)
                key = (state, quantize(cond_acc, self.decimals), t)
                row = q.entries.get(key)
                if row is None:
                    row = [0.0] * len(actions)
                    q.entries[key] = row
                    q.visits[key] = [0] * len(actions)
                if rng.random() < eps:
                    a_idx = rng.randrange(len(actions))
                else:
                    a_idx = max(range(len(row)), key=lambda i: (row[i], -i))
                action = actions[a_idx]

                next_state = draw(momdp.transition_pairs(state, action), rng)
                reward = draw(momdp.reward_pairs(state, action, next_state), rng)
                cond_r = reward if self.mode == "true-rewards" else self.reward_model.predict(state, action, next_state)
                true_acc = accumulate(true_acc, reward, momdp.gamma, t)
                cond_acc = quantize(accumulate(cond_acc, cond_r, momdp.gamma, t), self.decimals)

                if momdp.is_terminal(next_state):
                    final = cond_acc if self.mode == "full-proxy" else true_acc
                    target = float(self.utility(final))
                else:
                    next_key = (next_state, cond_acc, t + 1)
                    next_row = q.entries.get(next_key)
                    target = max(next_row) if next_row is not None else 0.0

                row[a_idx] += self.alpha * (target - row[a_idx])
                q.visits[key][a_idx] += 1
                state = next_state
                t += 1

            if (episode + 1) % self.eval_every == 0 or episode + 1 == self.episodes:
                greedy = q.greedy_policy(momdp)
                value = esr_evaluate(momdp, greedy, self.utility, self.reward_model, regime).value
                curve.append((episode + 1, value, eps))

        self.momdp_ = momdp
        self.q_table_ = q
        self.policy_ = q.greedy_policy(momdp)
        self.curve_ = curve
        return self

    def predict(self, obs) -> str:
        check_is_fitted(self, "policy_")
        return self.policy_.action_for(obs, self.momdp_)
