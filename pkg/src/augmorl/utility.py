"""Utility functions mapping vector returns to scalar values.

All utilities are monotonically increasing: u(x) >= u(y) whenever x >= y
componentwise.  The min-component utility encodes fairness across
objectives; linear utilities reduce the problem to ordinary scalar RL.
"""

from __future__ import annotations

import hashlib
import json
import random

from .momdp import PROB_TOL, Vector, quantize, vec


class UtilityFunction:
    """Callable scalarisation with a parseable identity string (`spec`)."""

    kind: str = ""
    spec: str = ""

    def __call__(self, v: Vector) -> float:
        raise NotImplementedError


class MinUtility(UtilityFunction):
    """Smallest component: the fairness-oriented trade-off."""

    kind = "min"
    spec = "min"

    def __call__(self, v: Vector) -> float:
        return float(min(v))


class LinearUtility(UtilityFunction):
    """Weighted sum with non-negative weights summing to 1."""

    kind = "linear"

    def __init__(self, weights):
        w = vec(weights)
        if not w:
            raise ValueError("linear utility needs at least one weight")
        if any(x < 0 for x in w):
            raise ValueError(f"linear utility weights must be non-negative, got {w}")
        if abs(sum(w) - 1.0) > PROB_TOL:
            raise ValueError(f"linear utility weights must sum to 1, got {sum(w):g}")
        self.weights = w
        self.spec = "linear:" + ",".join(f"{x:g}" for x in w)

    def __call__(self, v: Vector) -> float:
        return float(sum(w * x for w, x in zip(self.weights, v, strict=True)))


class TabulatedUtility(UtilityFunction):
    """Explicit table over reward vectors, checked for monotonicity.

    The check compares componentwise-ordered key pairs: all pairs when the
    table is small, otherwise a seeded sample of 1000 pairs.
    """

    kind = "custom"

    def __init__(self, table: dict, check_pairs: int = 1000, seed: int = 0):
        if not table:
            raise ValueError("tabulated utility needs at least one entry")
        self.table = {quantize(k): float(u) for k, u in table.items()}
        keys = list(self.table)
        pairs = []
        if len(keys) * len(keys) <= check_pairs:
            pairs = [(x, y) for x in keys for y in keys]
        else:
            rng = random.Random(seed)
            pairs = [(rng.choice(keys), rng.choice(keys)) for _ in range(check_pairs)]
        for x, y in pairs:
            if all(a >= b for a, b in zip(x, y)) and self.table[x] < self.table[y]:
                raise ValueError(f"utility table is not monotone: u({x}) < u({y})")
        blob = json.dumps(sorted(self.table.items())).encode()
        self.spec = "custom:" + hashlib.sha256(blob).hexdigest()[:12]

    def __call__(self, v: Vector) -> float:
        key = quantize(v)
        if key not in self.table:
            raise KeyError(f"utility table has no entry for {key}")
        return self.table[key]


def parse_utility(spec: str) -> UtilityFunction:
    """Parse "min" or "linear:w1,w2,..." into a utility function."""
    if spec == "min":
        return MinUtility()
    if spec.startswith("linear:"):
        weights = [float(x) for x in spec.split(":", 1)[1].split(",")]
        return LinearUtility(weights)
    raise ValueError(f"unknown utility spec {spec!r} (expected 'min' or 'linear:w1,w2,...')")
