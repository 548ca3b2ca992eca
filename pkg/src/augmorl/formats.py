"""On-disk formats: JSON for structured objects, CSV for curves and tables.

Everything is textual and timestamp-free so reports diff cleanly and
identical runs produce identical bytes.
"""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path

from .deploy import DeploymentReport, GapTable
from .learn import QTable, RewardModel
from .momdp import DECIMALS, Momdp, check_valid, make_momdp, quantize, vec
from .policy import Policy, observation_key


def _write(path, text: str) -> None:
    Path(path).write_text(text, encoding="utf-8")


def _dump(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


# -- environments ------------------------------------------------------------


def momdp_from_dict(data: dict, check: bool = True) -> Momdp:
    momdp = make_momdp(
        d=data["d"],
        gamma=data["gamma"],
        horizon=data["horizon"],
        states=[(row["id"], bool(row["terminal"])) for row in data["states"]],
        mu={s: float(p) for s, p in data["mu"].items()},
        transitions=[(r["from"], r["action"], r["to"], float(r["prob"])) for r in data["transitions"]],
        rewards=[
            (
                r["from"],
                r["action"],
                r["to"],
                [(vec(o["vector"]), float(o["prob"])) for o in r["outcomes"]],
            )
            for r in data["rewards"]
        ],
    )
    return check_valid(momdp) if check else momdp


def save_momdp(momdp: Momdp, path) -> None:
    _write(path, _dump(momdp.to_dict()))


def load_momdp(path, check: bool = True) -> Momdp:
    """Load an environment; check=False defers invariant checking to the caller."""
    p = Path(path)
    if not p.exists():
        raise FileNotFoundError(f"file not found: {p}")
    return momdp_from_dict(json.loads(p.read_text(encoding="utf-8")), check=check)


# -- policies ----------------------------------------------------------------


def policy_to_dict(policy: Policy) -> dict:
    return {
        "observation_kind": policy.observation_kind,
        "fallback": policy.fallback,
        "decimals": policy.decimals,
        "entries": policy.entries(),
    }


def policy_from_dict(data: dict) -> Policy:
    kind = data["observation_kind"]
    decimals = int(data.get("decimals", DECIMALS))
    table = {}
    for row in data["entries"]:
        key = observation_key(kind, row["state"], row.get("acc"), row.get("step"), decimals)
        table[key] = row["action"]
    return Policy(observation_kind=kind, table=table, fallback=data.get("fallback"), decimals=decimals)


def save_policy(policy: Policy, path) -> None:
    _write(path, _dump(policy_to_dict(policy)))


def load_policy(path) -> Policy:
    p = Path(path)
    if not p.exists():
        raise FileNotFoundError(f"file not found: {p}")
    return policy_from_dict(json.loads(p.read_text(encoding="utf-8")))


# -- reward models -----------------------------------------------------------


def reward_model_to_dict(model: RewardModel) -> dict:
    entries = [
        {"from": s, "action": a, "to": s2, "mean": list(mean), "count": model.counts_[(s, a, s2)]}
        for (s, a, s2), mean in sorted(model.means_.items())
    ]
    return {"strict": model.strict, "d": model.d_, "entries": entries}


def reward_model_from_dict(data: dict) -> RewardModel:
    model = RewardModel(strict=bool(data["strict"]))
    model.means_ = {(r["from"], r["action"], r["to"]): vec(r["mean"]) for r in data["entries"]}
    model.counts_ = {(r["from"], r["action"], r["to"]): int(r["count"]) for r in data["entries"]}
    model.d_ = int(data["d"])
    return model


def save_reward_model(model: RewardModel, path) -> None:
    _write(path, _dump(reward_model_to_dict(model)))


def load_reward_model(path) -> RewardModel:
    p = Path(path)
    if not p.exists():
        raise FileNotFoundError(f"file not found: {p}")
    return reward_model_from_dict(json.loads(p.read_text(encoding="utf-8")))


# -- Q tables ----------------------------------------------------------------


def qtable_to_dict(q: QTable, momdp: Momdp) -> dict:
    entries = []
    for key, values in q.entries.items():
        state, acc, step = key
        actions = momdp.legal_actions(state)
        for i, action in enumerate(actions):
            entries.append(
                {
                    "state": state,
                    "acc": list(acc),
                    "step": step,
                    "action": action,
                    "q": values[i],
                    "visits": q.visits[key][i],
                }
            )
    return {"observation_kind": q.observation_kind, "decimals": q.decimals, "entries": entries}


def qtable_from_dict(data: dict, momdp: Momdp) -> QTable:
    q = QTable(observation_kind=data["observation_kind"], decimals=int(data["decimals"]))
    for row in data["entries"]:
        key = (row["state"], quantize(row["acc"], q.decimals), int(row["step"]))
        actions = momdp.legal_actions(row["state"])
        if key not in q.entries:
            q.entries[key] = [0.0] * len(actions)
            q.visits[key] = [0] * len(actions)
        i = actions.index(row["action"])
        q.entries[key][i] = float(row["q"])
        q.visits[key][i] = int(row["visits"])
    return q


def save_qtable(q: QTable, momdp: Momdp, path) -> None:
    _write(path, _dump(qtable_to_dict(q, momdp)))


def load_qtable(path, momdp: Momdp) -> QTable:
    p = Path(path)
    if not p.exists():
        raise FileNotFoundError(f"file not found: {p}")
    return qtable_from_dict(json.loads(p.read_text(encoding="utf-8")), momdp)


# -- curves and reports ------------------------------------------------------


def curve_to_csv(curve) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["episode", "exact_value", "epsilon"])
    for episode, value, eps in curve:
        writer.writerow([episode, repr(float(value)), repr(float(eps))])
    return buf.getvalue()


def save_curve(curve, path) -> None:
    _write(path, curve_to_csv(curve))


def report_to_csv(reports: list[DeploymentReport]) -> str:
    buf = io.StringIO()
    fields = [
        "label", "regime", "episodes", "mean", "stderr", "exact",
        "within_3se", "policy_hash", "momdp_hash", "utility", "seed",
    ]
    writer = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    writer.writeheader()
    for r in reports:
        writer.writerow(r.row())
    return buf.getvalue()


def report_to_text(report: DeploymentReport) -> str:
    lines = [
        f"policy {report.label} ({report.policy_hash}) under regime {report.regime}",
        f"  environment {report.momdp_hash}, utility {report.utility_spec}, seed {report.seed}",
        f"  episodes     {report.episodes}",
        f"  mean utility {report.mean:.6g} +/- {report.stderr:.3g} (stderr)",
        f"  exact value  {report.exact:.6g}" if report.exact is not None else "  exact value  n/a",
    ]
    if report.within_3se is not None:
        lines.append(f"  mean within 3 stderr of exact: {'yes' if report.within_3se else 'NO'}")
    lines.append("  utility histogram:")
    for value, count in report.histogram:
        lines.append(f"    {value:>10.6g}: {count}")
    return "\n".join(lines) + "\n"


def gap_to_csv(table: GapTable) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["label", "regime", "exact", "monte_carlo", "gap_vs_best"])
    for r in table.rows:
        writer.writerow([r.label, r.regime, r.exact, r.mean, r.gap_vs_best])
    return buf.getvalue()
