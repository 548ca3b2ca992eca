"""Frozen-policy execution under reward-observability regimes.

Deployment never updates the policy; it meters the utility the environment
actually pays (true sampled rewards) while the agent observes whatever the
regime provides.  The gap between regimes is the cost of losing the reward
signal after deployment.
"""

from __future__ import annotations

import math
import statistics
from collections import Counter
from dataclasses import dataclass

from .exact import CapExceededError, esr_evaluate
from .momdp import Momdp, quantize
from .policy import Policy
from .simulate import resolve_regime, simulate_episode
from .utility import UtilityFunction


@dataclass(frozen=True)
class DeploymentReport:
    """Monte-Carlo and exact value of one (policy, regime) deployment.

    within_3se flags (not fails) when the Monte-Carlo mean strays more than
    three standard errors from the exact value; None when no exact value is
    available.  histogram maps per-episode utility to episode count.
    """

    label: str
    regime: str
    episodes: int
    mean: float
    stderr: float
    exact: float | None
    within_3se: bool | None
    histogram: tuple[tuple[float, int], ...]
    policy_hash: str
    momdp_hash: str
    utility_spec: str
    seed: object

    def row(self) -> dict:
        return {
            "label": self.label,
            "regime": self.regime,
            "episodes": self.episodes,
            "mean": self.mean,
            "stderr": self.stderr,
            "exact": self.exact,
            "within_3se": self.within_3se,
            "policy_hash": self.policy_hash,
            "momdp_hash": self.momdp_hash,
            "utility": self.utility_spec,
            "seed": str(self.seed),
        }


def deploy(
    momdp: Momdp,
    policy: Policy,
    utility: UtilityFunction,
    regime: str | None = None,
    reward_model=None,
    episodes: int = 10_000,
    seed=0,
    label: str = "policy",
    compute_exact: bool = True,
    strict_none: bool = False,
) -> DeploymentReport:
    """Run seeded rollouts of a frozen policy and report the achieved utility.

    Per-episode seeds derive from (seed, episode index), so runs are
    order-independent and reproducible.  The exact value comes from branch
    enumeration when it fits under the cap.
    """
    if episodes < 1:
        raise ValueError(f"episodes must be positive, got {episodes}")
    regime = resolve_regime(policy, regime, reward_model, strict_none)

    utilities = []
    for i in range(episodes):
        traj = simulate_episode(
            momdp, policy, regime=regime, reward_model=reward_model, seed=(seed, i), strict_none=strict_none
        )
        utilities.append(float(utility(traj.true_return)))

    mean = statistics.fmean(utilities)
    stderr = statistics.stdev(utilities) / math.sqrt(episodes) if episodes > 1 else 0.0

    exact = None
    if compute_exact:
        try:
            exact = esr_evaluate(momdp, policy, utility, reward_model, regime).value
        except CapExceededError:
            exact = None

    within = None
    if exact is not None:
        within = abs(mean - exact) <= 3.0 * stderr + 1e-12

    hist = Counter(quantize([u])[0] for u in utilities)
    return DeploymentReport(
        label=label,
        regime=regime,
        episodes=episodes,
        mean=mean,
        stderr=stderr,
        exact=exact,
        within_3se=within,
        histogram=tuple(sorted(hist.items())),
        policy_hash=policy.identity(),
        momdp_hash=momdp.identity,
        utility_spec=utility.spec,
        seed=seed,
    )


@dataclass(frozen=True)
class GapRow:
    label: str
    regime: str
    exact: float | None
    mean: float
    gap_vs_best: float | None


@dataclass(frozen=True)
class GapTable:
    """Deployment comparison, sorted by exact value (best first)."""

    rows: tuple[GapRow, ...]

    def to_text(self) -> str:
        lines = [f"{'policy/regime':<32} {'exact':>12} {'monte-carlo':>12} {'gap-vs-best':>12}"]
        for r in self.rows:
            exact = f"{r.exact:.6g}" if r.exact is not None else "n/a"
            gap = f"{r.gap_vs_best:.6g}" if r.gap_vs_best is not None else "n/a"
            lines.append(f"{r.label + '/' + r.regime:<32} {exact:>12} {r.mean:>12.6g} {gap:>12}")
        return "\n".join(lines)


def gap_report(momdp: Momdp, utility: UtilityFunction, reports: list[DeploymentReport]) -> GapTable:
    """Compare deployments of the same environment/utility across regimes."""
    if len(reports) < 2:
        raise ValueError(f"need at least 2 reports to compare, got {len(reports)}")
    for r in reports:
        if r.momdp_hash != momdp.identity:
            raise ValueError(f"report {r.label!r} was produced on a different environment")
        if r.utility_spec != utility.spec:
            raise ValueError(
                f"report {r.label!r} used utility {r.utility_spec!r}, expected {utility.spec!r}"
            )
    exacts = [r.exact for r in reports if r.exact is not None]
    best = max(exacts) if exacts else None
    rows = [
        GapRow(
            label=r.label,
            regime=r.regime,
            exact=r.exact,
            mean=r.mean,
            gap_vs_best=(best - r.exact) if (best is not None and r.exact is not None) else None,
        )
        for r in reports
    ]
    rows.sort(key=lambda r: -(r.exact if r.exact is not None else r.mean))
    return GapTable(rows=tuple(rows))
