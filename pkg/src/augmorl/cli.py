"""Experiment command line: validate, solve, train, deploy, compare, generate.

Exit codes: 0 success, 1 usage/config error, 2 resource cap exceeded,
3 declared expectation violated.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from pathlib import Path

from . import __version__
from .deploy import deploy, gap_report
from .envs import BUILTINS, GeneratorConfig, builtin, generate
from .exact import CapExceededError
from .formats import (
    gap_to_csv,
    load_momdp,
    load_policy,
    load_reward_model,
    report_to_csv,
    report_to_text,
    save_curve,
    save_momdp,
    save_policy,
    save_qtable,
    save_reward_model,
)
from .learn import QLearner, fit_reward_model
from .momdp import InvalidMomdpError, validate
from .policy import MissingObservationError
from .solve import BackwardInductionSolver, PolicyEnumerationSolver
from .utility import parse_utility

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_CAP = 2
EXIT_EXPECTATION = 3


class UsageError(Exception):
    pass


class ExpectationError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse defaults to exit code 2; we reserve that for caps
        raise UsageError(message)


def _load_env(ref: str, check: bool = True):
    if ref is None:
        raise UsageError("--env is required")
    if ref.startswith("builtin:"):
        return builtin(ref.split(":", 1)[1])
    return load_momdp(ref, check=check)


def _check_horizon(momdp, args):
    if args.horizon_cap is not None and momdp.horizon > args.horizon_cap:
        raise CapExceededError(f"environment horizon {momdp.horizon} exceeds cap {args.horizon_cap}")


def _resolve_model(args, momdp, required: bool):
    if getattr(args, "model", None):
        return load_reward_model(args.model)
    if getattr(args, "model_samples", None):
        return fit_reward_model(momdp, samples=args.model_samples, seed=args.seed)
    if required:
        raise UsageError("a reward model is required: pass --model FILE or --model-samples N")
    return None


def _outdir(args) -> Path | None:
    if not args.out:
        return None
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _echo_config(args, out: Path | None, command: str):
    if out is None:
        return
    effective = {k: v for k, v in vars(args).items() if k != "func"}
    blob = {"command": command, "version": __version__, "config": effective}
    (out / "config.json").write_text(json.dumps(blob, indent=2, default=str) + "\n", encoding="utf-8")


def cmd_validate(args) -> int:
    momdp = _load_env(args.env, check=False)  # report violations as data, not as a load failure
    violations = validate(momdp)
    if violations:
        for v in violations:
            print(f"violation: {v}")
        return EXIT_USAGE
    print("valid")
    if args.out:  # export the canonical file form (e.g. of a builtin)
        save_momdp(momdp, args.out)
        print(f"wrote {args.out}")
    return EXIT_OK


def cmd_solve(args) -> int:
    momdp = _load_env(args.env)
    _check_horizon(momdp, args)
    utility = parse_utility(args.utility)
    kinds = [k.strip() for k in args.obs.split(",") if k.strip()]
    if not kinds:
        raise UsageError("--obs needs at least one observation kind")
    model = _resolve_model(args, momdp, required="proxy-augmented" in kinds)
    out = _outdir(args)

    caps = {}
    if args.enum_cap is not None:
        caps = {"policy_cap": args.enum_cap, "branch_cap": args.enum_cap}

    results = {}
    for kind in kinds:
        if kind == "true-augmented" and args.criterion == "esr" and args.solver in ("auto", "backward"):
            solver = BackwardInductionSolver(
                utility, **({"state_cap": args.enum_cap} if args.enum_cap is not None else {})
            )
        else:
            if args.solver == "backward":
                raise UsageError(f"backward induction only solves true-augmented ESR, not {kind}/{args.criterion}")
            solver = PolicyEnumerationSolver(
                utility, kind, criterion=args.criterion, reward_model=model, **caps
            )
        solver.fit(momdp)
        results[kind] = solver.value_
        print(f"{kind} {args.criterion} value: {solver.value_:.9g}")
        if out is not None:
            save_policy(solver.policy_, out / f"policy-{kind}.json")

    if out is not None:
        (out / "solve.json").write_text(
            json.dumps({"criterion": args.criterion, "values": results}, indent=2) + "\n", encoding="utf-8"
        )
        if model is not None:
            save_reward_model(model, out / "model.json")
        _echo_config(args, out, "solve")
    return EXIT_OK


def cmd_train(args) -> int:
    momdp = _load_env(args.env)
    _check_horizon(momdp, args)
    utility = parse_utility(args.utility)
    out = _outdir(args)
    if out is None:
        raise UsageError("train writes artifacts; pass --out DIR")
    model = _resolve_model(args, momdp, required=args.mode != "true-rewards")

    learner = QLearner(
        utility,
        episodes=args.episodes if args.episodes is not None else 50_000,
        alpha=args.alpha,
        epsilon_start=args.eps_start,
        epsilon_final=args.eps_final,
        epsilon_decay=args.eps_decay,
        mode=args.mode,
        reward_model=model,
        seed=args.seed,
        eval_every=args.eval_every,
    )
    learner.fit(momdp)
    final = learner.curve_[-1]
    print(f"trained {args.mode} for {learner.episodes} episodes; greedy exact value: {final[1]:.9g}")

    save_policy(learner.policy_, out / "policy.json")
    save_qtable(learner.q_table_, momdp, out / "qtable.json")
    save_curve(learner.curve_, out / "curve.csv")
    if model is not None:
        save_reward_model(model, out / "model.json")
    _echo_config(args, out, "train")
    return EXIT_OK


def cmd_deploy(args) -> int:
    momdp = _load_env(args.env)
    _check_horizon(momdp, args)
    utility = parse_utility(args.utility)
    policy = load_policy(args.policy)
    model = _resolve_model(args, momdp, required=args.regime == "proxy")
    report = deploy(
        momdp,
        policy,
        utility,
        regime=args.regime,
        reward_model=model,
        episodes=args.episodes if args.episodes is not None else 10_000,
        seed=args.seed,
        label=args.label,
    )
    print(report_to_text(report), end="")
    out = _outdir(args)
    if out is not None:
        (out / "report.csv").write_text(report_to_csv([report]), encoding="utf-8")
        (out / "report.txt").write_text(report_to_text(report), encoding="utf-8")
        _echo_config(args, out, "deploy")
    return EXIT_OK


_EXPECT_RE = re.compile(r"^\s*(.+?)\s*/\s*(\S+)\s*>\s*(.+?)\s*/\s*(\S+)\s*$")


def cmd_compare(args) -> int:
    momdp = _load_env(args.env)
    _check_horizon(momdp, args)
    utility = parse_utility(args.utility)
    if not args.pair:
        raise UsageError("compare needs at least one --pair NAME/REGIME")

    policies = {}
    for item in args.policy or []:
        name, _, path = item.partition("=")
        if not path:
            raise UsageError(f"--policy expects NAME=PATH, got {item!r}")
        policies[name] = load_policy(path)

    pairs = []
    for item in args.pair:
        name, _, regime = item.partition("/")
        if not regime:
            raise UsageError(f"--pair expects NAME/REGIME, got {item!r}")
        if name not in policies:
            raise UsageError(f"--pair names unknown policy {name!r}; declare it with --policy {name}=PATH")
        pairs.append((name, regime))

    model = _resolve_model(args, momdp, required=any(r == "proxy" for _, r in pairs))

    reports = []
    for i, (name, regime) in enumerate(pairs):
        reports.append(
            deploy(
                momdp,
                policies[name],
                utility,
                regime=regime,
                reward_model=model,
                episodes=args.episodes if args.episodes is not None else 10_000,
                seed=(args.seed, i),
                label=name,
            )
        )

    table = gap_report(momdp, utility, reports)
    print(table.to_text())
    out = _outdir(args)
    if out is not None:
        (out / "gap.csv").write_text(gap_to_csv(table), encoding="utf-8")
        (out / "gap.txt").write_text(table.to_text() + "\n", encoding="utf-8")
        (out / "reports.csv").write_text(report_to_csv(reports), encoding="utf-8")
        _echo_config(args, out, "compare")

    exact_of = {f"{r.label}/{r.regime}": r.exact for r in reports}
    for expectation in args.expect or []:
        m = _EXPECT_RE.match(expectation)
        if not m:
            raise UsageError(f"--expect expects 'NAME/REGIME > NAME/REGIME', got {expectation!r}")
        lhs = f"{m.group(1)}/{m.group(2)}"
        rhs = f"{m.group(3)}/{m.group(4)}"
        for side in (lhs, rhs):
            if side not in exact_of:
                raise UsageError(f"--expect references {side!r}, which is not among the deployed pairs")
            if exact_of[side] is None:
                raise UsageError(f"--expect needs an exact value for {side!r} (enumeration was infeasible)")
        if not exact_of[lhs] > exact_of[rhs]:
            raise ExpectationError(
                f"expectation violated: {lhs} ({exact_of[lhs]:g}) > {rhs} ({exact_of[rhs]:g}) does not hold"
            )
        print(f"expectation holds: {lhs} ({exact_of[lhs]:g}) > {rhs} ({exact_of[rhs]:g})")
    return EXIT_OK


def cmd_generate(args) -> int:
    config = GeneratorConfig(
        n_states=tuple(args.states),
        n_terminals=tuple(args.terminals),
        n_actions=tuple(args.actions),
        n_outcomes=tuple(args.outcomes),
        n_support=tuple(args.support),
        d=args.d,
        reward_range=tuple(args.reward_range),
        gamma=args.gamma,
        horizon=args.horizon,
        deterministic=args.deterministic,
        terminal_only_rewards=args.terminal_only_rewards,
        seed=args.seed,
    )
    momdp = generate(config)
    if args.out:
        save_momdp(momdp, args.out)
        print(f"wrote {args.out} ({len(momdp.states)} states, horizon {momdp.horizon})")
    else:
        print(json.dumps(momdp.to_dict(), indent=2))
    return EXIT_OK


def build_parser() -> _Parser:
    shared = _Parser(add_help=False)
    shared.add_argument("--env", help=f"builtin:NAME ({', '.join(BUILTINS)}) or a MOMDP file path")
    shared.add_argument("--utility", default="min", help="min | linear:w1,w2,... (default: min)")
    shared.add_argument("--criterion", default="esr", choices=["esr", "ser"])
    shared.add_argument("--seed", type=int, default=0)
    shared.add_argument("--out", help="output directory (file path for generate)")
    shared.add_argument("--episodes", type=int, default=None)
    shared.add_argument("--horizon-cap", type=int, default=None)
    shared.add_argument("--enum-cap", type=int, default=None)

    parser = _Parser(prog="augmorl", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", parents=[shared], help="check environment invariants")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("solve", parents=[shared], help="exact solve for observation kinds")
    p.add_argument("--obs", default="true-augmented", help="comma-separated observation kinds")
    p.add_argument("--solver", default="auto", choices=["auto", "backward", "enumeration"])
    p.add_argument("--model", help="reward model file")
    p.add_argument("--model-samples", type=int, default=None)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("train", parents=[shared], help="tabular Q-learning")
    p.add_argument("--mode", default="true-rewards", choices=["true-rewards", "full-proxy", "asymmetric-proxy"])
    p.add_argument("--alpha", type=float, default=0.1)
    p.add_argument("--eps-start", type=float, default=1.0)
    p.add_argument("--eps-final", type=float, default=0.01)
    p.add_argument("--eps-decay", type=int, default=None)
    p.add_argument("--eval-every", type=int, default=1000)
    p.add_argument("--model", help="reward model file")
    p.add_argument("--model-samples", type=int, default=None)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("deploy", parents=[shared], help="run a frozen policy under a regime")
    p.add_argument("--policy", required=True, help="policy file")
    p.add_argument("--regime", required=True, choices=["markov", "true", "proxy", "none"])
    p.add_argument("--label", default="policy")
    p.add_argument("--model", help="reward model file")
    p.add_argument("--model-samples", type=int, default=None)
    p.set_defaults(func=cmd_deploy)

    p = sub.add_parser("compare", parents=[shared], help="deploy pairs and tabulate the gaps")
    p.add_argument("--policy", action="append", help="NAME=PATH (repeatable)")
    p.add_argument("--pair", action="append", help="NAME/REGIME to deploy (repeatable)")
    p.add_argument("--expect", action="append", help="'NAME/REGIME > NAME/REGIME' exact-value assertion")
    p.add_argument("--model", help="reward model file")
    p.add_argument("--model-samples", type=int, default=None)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("generate", parents=[shared], help="generate a random episodic MOMDP")
    p.add_argument("--states", type=int, nargs=2, default=[2, 4], metavar=("LO", "HI"))
    p.add_argument("--terminals", type=int, nargs=2, default=[1, 2], metavar=("LO", "HI"))
    p.add_argument("--actions", type=int, nargs=2, default=[1, 3], metavar=("LO", "HI"))
    p.add_argument("--outcomes", type=int, nargs=2, default=[1, 2], metavar=("LO", "HI"))
    p.add_argument("--support", type=int, nargs=2, default=[1, 2], metavar=("LO", "HI"))
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--reward-range", type=int, nargs=2, default=[0, 3], metavar=("LO", "HI"))
    p.add_argument("--gamma", type=float, default=1.0)
    p.add_argument("--horizon", type=int, default=3)
    p.add_argument("--deterministic", action="store_true")
    p.add_argument("--terminal-only-rewards", action="store_true")
    p.set_defaults(func=cmd_generate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except CapExceededError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CAP
    except ExpectationError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_EXPECTATION
    except (InvalidMomdpError, MissingObservationError, FileNotFoundError, ValueError, KeyError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as e:  # argparse --help/--version
        return int(e.code or 0)


def main_entry() -> None:
    sys.exit(main())
