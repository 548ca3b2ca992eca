"""Augmented-state multi-objective reinforcement learning on finite MOMDPs.

Policies optimal under a non-linear utility must condition on the reward
accumulated so far, which means they need a reward signal (true or proxy)
whenever they run, including after deployment.  This package provides the
environment formalism, exact solvers, tabular learners, reward-model
proxies, and deployment-regime analysis to measure that requirement.
"""

__version__ = "0.1.0"

from .deploy import DeploymentReport, GapRow, GapTable, deploy, gap_report
from .envs import BUILTINS, GeneratorConfig, builtin, fig1, fig2, generate
from .exact import (
    BRANCH_CAP,
    Branch,
    CapExceededError,
    ExactValue,
    enumerate_outcomes,
    esr_evaluate,
    ser_evaluate,
)
from .learn import (
    TRAINING_MODES,
    QLearner,
    QTable,
    RewardModel,
    UnseenTransitionError,
    fit_reward_model,
    sample_transitions,
)
from .momdp import (
    DECIMALS,
    AugmentedState,
    InvalidMomdpError,
    Momdp,
    Vector,
    accumulate,
    augment,
    check_valid,
    make_momdp,
    quantize,
    validate,
    vec,
    zeros,
)
from .policy import FIRST, OBSERVATION_KINDS, MissingObservationError, Policy, markov_policy
from .simulate import REGIMES, Step, Trajectory, simulate_episode, stream
from .solve import BackwardInductionSolver, PolicyEnumerationSolver
from .utility import (
    LinearUtility,
    MinUtility,
    TabulatedUtility,
    UtilityFunction,
    parse_utility,
)

__all__ = [
    "AugmentedState",
    "BackwardInductionSolver",
    "BRANCH_CAP",
    "Branch",
    "BUILTINS",
    "builtin",
    "CapExceededError",
    "check_valid",
    "DECIMALS",
    "deploy",
    "DeploymentReport",
    "enumerate_outcomes",
    "esr_evaluate",
    "ExactValue",
    "fig1",
    "fig2",
    "FIRST",
    "fit_reward_model",
    "gap_report",
    "GapRow",
    "GapTable",
    "generate",
    "GeneratorConfig",
    "InvalidMomdpError",
    "LinearUtility",
    "make_momdp",
    "markov_policy",
    "MinUtility",
    "MissingObservationError",
    "Momdp",
    "OBSERVATION_KINDS",
    "parse_utility",
    "Policy",
    "PolicyEnumerationSolver",
    "QLearner",
    "QTable",
    "quantize",
    "REGIMES",
    "RewardModel",
    "sample_transitions",
    "ser_evaluate",
    "simulate_episode",
    "Step",
    "stream",
    "TabulatedUtility",
    "Trajectory",
    "TRAINING_MODES",
    "UnseenTransitionError",
    "UtilityFunction",
    "validate",
    "vec",
    "Vector",
    "zeros",
    "accumulate",
    "augment",
    "__version__",
]
