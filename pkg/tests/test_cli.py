import json

import augmorl as m
from augmorl.cli import main
from augmorl.formats import load_momdp, load_policy, save_policy


def read_all_bytes(root):
    return {p.name: p.read_bytes() for p in sorted(root.iterdir())}


def test_validate_builtin(capsys):
    assert main(["validate", "--env", "builtin:fig1"]) == 0
    assert "valid" in capsys.readouterr().out


def test_validate_reports_violations(tmp_path, capsys, fig1):
    data = fig1.to_dict()
    data["transitions"][0]["prob"] = 0.9
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(data))
    # validate lists violations as data instead of refusing to load
    rc = main(["validate", "--env", str(bad)])
    assert rc == 1
    out = capsys.readouterr().out
    assert "violation: transition mass 0.9 != 1" in out


def test_missing_env_file_exits_1(capsys):
    assert main(["solve", "--env", "missing.momdp"]) == 1
    assert "file not found" in capsys.readouterr().err


def test_bad_utility_spec_exits_1(capsys):
    assert main(["solve", "--env", "builtin:fig1", "--utility", "median"]) == 1
    assert "utility" in capsys.readouterr().err


def test_missing_env_flag_exits_1(capsys):
    assert main(["solve"]) == 1
    assert "--env is required" in capsys.readouterr().err


def test_solve_fig1_both_kinds(tmp_path, capsys):
    out = tmp_path / "solve"
    rc = main([
        "solve", "--env", "builtin:fig1", "--utility", "min", "--criterion", "esr",
        "--obs", "true-augmented,markov", "--out", str(out),
    ])
    assert rc == 0
    printed = capsys.readouterr().out
    assert "true-augmented esr value: 4" in printed
    assert "markov esr value: 2" in printed
    values = json.loads((out / "solve.json").read_text())["values"]
    assert values == {"true-augmented": 4.0, "markov": 2.0}
    policy = load_policy(out / "policy-true-augmented.json")
    assert policy.observation_kind == "true-augmented"


def test_solve_fig2_proxy_with_model_samples(capsys):
    rc = main([
        "solve", "--env", "builtin:fig2", "--utility", "min",
        "--obs", "proxy-augmented", "--model-samples", "10000",
    ])
    assert rc == 0
    assert "proxy-augmented esr value: 3" in capsys.readouterr().out


def test_solve_proxy_without_model_exits_1(capsys):
    rc = main(["solve", "--env", "builtin:fig2", "--obs", "proxy-augmented"])
    assert rc == 1
    assert "reward model" in capsys.readouterr().err


def test_solve_enum_cap_exits_2(capsys):
    rc = main(["solve", "--env", "builtin:fig1", "--obs", "markov", "--enum-cap", "1"])
    assert rc == 2


def test_solve_unknown_obs_kind_exits_1(capsys):
    rc = main(["solve", "--env", "builtin:fig1", "--obs", "oracle"])
    assert rc == 1
    assert "observation kind" in capsys.readouterr().err


def test_config_echo_embeds_version_and_seed(tmp_path):
    out = tmp_path / "solve"
    assert main(["solve", "--env", "builtin:fig1", "--obs", "markov", "--seed", "5", "--out", str(out)]) == 0
    blob = json.loads((out / "config.json").read_text())
    assert blob["version"] == m.__version__
    assert blob["command"] == "solve"
    assert blob["config"]["seed"] == 5
    assert blob["config"]["utility"] == "min"


def test_horizon_cap_exits_2():
    assert main(["solve", "--env", "builtin:fig1", "--horizon-cap", "1"]) == 2


def test_train_is_byte_reproducible(tmp_path):
    args = [
        "train", "--env", "builtin:fig1", "--mode", "true-rewards",
        "--episodes", "2000", "--seed", "7", "--eval-every", "500",
    ]
    out1, out2 = tmp_path / "run1", tmp_path / "run2"
    assert main(args + ["--out", str(out1)]) == 0
    assert main(args + ["--out", str(out2)]) == 0
    files1, files2 = read_all_bytes(out1), read_all_bytes(out2)
    # config echoes differ only in the --out path itself
    assert set(files1) == {"policy.json", "qtable.json", "curve.csv", "config.json"}
    for name in ("policy.json", "qtable.json", "curve.csv"):
        assert files1[name] == files2[name]


def test_train_full_proxy_picks_detour(tmp_path):
    out = tmp_path / "train"
    rc = main([
        "train", "--env", "builtin:fig2", "--mode", "full-proxy", "--episodes", "12000",
        "--model-samples", "10000", "--seed", "5", "--eval-every", "12000", "--out", str(out),
    ])
    assert rc == 0
    policy = load_policy(out / "policy.json")
    assert policy.table[("s0", (0.0, 0.0), 0)] == "a2"
    assert (out / "model.json").exists()
    assert (out / "curve.csv").read_text().startswith("episode,exact_value,epsilon")


def test_train_proxy_without_model_exits_1(tmp_path, capsys):
    rc = main([
        "train", "--env", "builtin:fig2", "--mode", "full-proxy",
        "--episodes", "100", "--out", str(tmp_path / "x"),
    ])
    assert rc == 1
    assert "reward model" in capsys.readouterr().err


def test_train_requires_out(capsys):
    rc = main(["train", "--env", "builtin:fig1", "--episodes", "100"])
    assert rc == 1


def test_deploy_command(tmp_path, capsys, fig1_solved):
    _, bi, _ = fig1_solved
    ppath = tmp_path / "policy.json"
    save_policy(bi.policy_, ppath)
    rc = main([
        "deploy", "--env", "builtin:fig1", "--policy", str(ppath), "--regime", "true",
        "--episodes", "200", "--label", "optimal", "--out", str(tmp_path / "dep"),
    ])
    assert rc == 0
    out = capsys.readouterr().out
    assert "mean utility 4" in out
    assert (tmp_path / "dep" / "report.csv").exists()


def test_deploy_proxy_fits_model_from_samples(tmp_path, capsys, fig2_solved):
    env, bi, _ = fig2_solved
    ppath = tmp_path / "policy.json"
    save_policy(bi.policy_, ppath)
    rc = main([
        "deploy", "--env", "builtin:fig2", "--policy", str(ppath), "--regime", "proxy",
        "--model-samples", "10000", "--episodes", "500",
    ])
    assert rc == 0
    assert "exact value  2" in capsys.readouterr().out


def test_deploy_proxy_without_model_exits_1(tmp_path, capsys, fig2_solved):
    _, bi, _ = fig2_solved
    ppath = tmp_path / "policy.json"
    save_policy(bi.policy_, ppath)
    rc = main(["deploy", "--env", "builtin:fig2", "--policy", str(ppath), "--regime", "proxy"])
    assert rc == 1
    assert "reward model" in capsys.readouterr().err


def test_deploy_reports_are_byte_reproducible(tmp_path, fig1_solved):
    _, bi, _ = fig1_solved
    ppath = tmp_path / "policy.json"
    save_policy(bi.policy_, ppath)
    args = [
        "deploy", "--env", "builtin:fig1", "--policy", str(ppath), "--regime", "none",
        "--episodes", "300", "--seed", "6",
    ]
    assert main(args + ["--out", str(tmp_path / "d1")]) == 0
    assert main(args + ["--out", str(tmp_path / "d2")]) == 0
    for name in ("report.csv", "report.txt"):
        assert (tmp_path / "d1" / name).read_bytes() == (tmp_path / "d2" / name).read_bytes()


def test_compare_trio_with_expectations(tmp_path, capsys):
    solve_out = tmp_path / "solve"
    assert main([
        "solve", "--env", "builtin:fig2", "--obs", "true-augmented,proxy-augmented",
        "--model-samples", "10000", "--out", str(solve_out),
    ]) == 0
    rc = main([
        "compare", "--env", "builtin:fig2",
        "--policy", f"true-trained={solve_out}/policy-true-augmented.json",
        "--policy", f"proxy-trained={solve_out}/policy-proxy-augmented.json",
        "--pair", "true-trained/true", "--pair", "true-trained/proxy", "--pair", "proxy-trained/proxy",
        "--model", str(solve_out / "model.json"), "--episodes", "500",
        "--expect", "proxy-trained/proxy > true-trained/proxy",
        "--out", str(tmp_path / "gap"),
    ])
    assert rc == 0
    out = capsys.readouterr().out
    assert "expectation holds" in out
    gap = (tmp_path / "gap" / "gap.csv").read_text().splitlines()
    assert gap[1].startswith("true-trained,true,4.0")
    assert gap[2].startswith("proxy-trained,proxy,3.0")
    assert gap[3].startswith("true-trained,proxy,2.0")


def test_compare_violated_expectation_exits_3(tmp_path, capsys, fig1_solved):
    _, bi, markov = fig1_solved
    save_policy(bi.policy_, tmp_path / "aug.json")
    save_policy(markov.policy_, tmp_path / "mk.json")
    rc = main([
        "compare", "--env", "builtin:fig1",
        "--policy", f"augmented={tmp_path}/aug.json", "--policy", f"markov={tmp_path}/mk.json",
        "--pair", "augmented/true", "--pair", "markov/markov", "--episodes", "100",
        "--expect", "markov/markov > augmented/true",
    ])
    assert rc == 3
    assert "expectation violated" in capsys.readouterr().err


def test_compare_without_pairs_exits_1(capsys):
    assert main(["compare", "--env", "builtin:fig2"]) == 1
    assert "--pair" in capsys.readouterr().err


def test_validate_exports_builtin_to_file(tmp_path):
    path = tmp_path / "fig1.json"
    assert main(["validate", "--env", "builtin:fig1", "--out", str(path)]) == 0
    assert load_momdp(path).identity == m.fig1().identity


def test_generate_writes_valid_momdp(tmp_path):
    path = tmp_path / "random.json"
    rc = main(["generate", "--seed", "21", "--out", str(path)])
    assert rc == 0
    assert m.validate(load_momdp(path)) == []


def test_generated_file_solves_like_builtin(tmp_path, capsys):
    path = tmp_path / "random.json"
    assert main(["generate", "--seed", "3", "--out", str(path)]) == 0
    assert main(["solve", "--env", str(path), "--obs", "true-augmented,markov"]) == 0
    assert "true-augmented esr value" in capsys.readouterr().out
