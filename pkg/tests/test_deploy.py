import pytest

import augmorl as m


def test_true_regime_deployment_of_optimal_policy(fig1_solved, u_min):
    env, bi, _ = fig1_solved
    report = m.deploy(env, bi.policy_, u_min, regime="true", episodes=2000, seed=1)
    assert report.exact == pytest.approx(4.0, abs=1e-9)
    assert report.mean == 4.0  # constant utility, so the mean is exact
    assert report.stderr == 0.0
    assert report.within_3se is True
    assert report.histogram == ((4.0, 2000),)


def test_proxy_regime_collapses_true_trained_policy(fig2_solved, fig2_model, u_min):
    env, bi, _ = fig2_solved
    report = m.deploy(env, bi.policy_, u_min, regime="proxy", reward_model=fig2_model, episodes=10_000, seed=2)
    assert report.exact == pytest.approx(2.0, abs=1e-9)
    assert abs(report.mean - 2.0) < 0.05
    assert report.within_3se is True
    # the blind pick at s1 is wrong half the time: episodes score 0 or 4
    hist = dict(report.histogram)
    assert set(hist) == {0.0, 4.0}
    assert abs(hist[0.0] - hist[4.0]) < 300


def test_none_regime_freezes_acc_and_halves_value(fig1_solved, u_min):
    # hand-enumerated: frozen-zero observation at s1 misses the table, the
    # fallback picks one fixed action, wrong half the time -> exact 2
    env, bi, _ = fig1_solved
    report = m.deploy(env, bi.policy_, u_min, regime="none", episodes=4000, seed=3)
    assert report.exact == pytest.approx(2.0, abs=1e-9)
    assert abs(report.mean - 2.0) < 0.15


def test_true_regime_reproduces_training_time_greedy_value(fig1, u_min):
    learner = m.QLearner(u_min, episodes=6000, seed=9, eval_every=6000).fit(fig1)
    trained_value = learner.curve_[-1][1]
    report = m.deploy(fig1, learner.policy_, u_min, regime="true", episodes=100, seed=0)
    assert report.exact == trained_value


def test_deploy_is_deterministic(fig1_solved, u_min):
    env, bi, _ = fig1_solved
    a = m.deploy(env, bi.policy_, u_min, regime="true", episodes=500, seed=4)
    b = m.deploy(env, bi.policy_, u_min, regime="true", episodes=500, seed=4)
    assert a == b


def test_gap_report_fig2_trio(fig2_solved, fig2_model, u_min):
    env, bi, proxy = fig2_solved
    reports = [
        m.deploy(env, bi.policy_, u_min, regime="true", episodes=300, seed=0, label="true-trained"),
        m.deploy(env, bi.policy_, u_min, regime="proxy", reward_model=fig2_model, episodes=300, seed=0, label="true-trained"),
        m.deploy(env, proxy.policy_, u_min, regime="proxy", reward_model=fig2_model, episodes=300, seed=0, label="proxy-trained"),
    ]
    table = m.gap_report(env, u_min, reports)
    assert [r.exact for r in table.rows] == [4.0, 3.0, 2.0]
    assert [r.gap_vs_best for r in table.rows] == [0.0, 1.0, 2.0]
    # the central ordering: proxy-trained beats true-trained when rewards are proxied
    by_key = {(r.label, r.regime): r.exact for r in table.rows}
    assert by_key[("proxy-trained", "proxy")] > by_key[("true-trained", "proxy")]


def test_gap_report_fig1_markov_gap(fig1_solved, u_min):
    env, bi, markov = fig1_solved
    reports = [
        m.deploy(env, bi.policy_, u_min, regime="true", episodes=200, seed=1, label="augmented"),
        m.deploy(env, markov.policy_, u_min, regime="markov", episodes=200, seed=1, label="markov"),
    ]
    table = m.gap_report(env, u_min, reports)
    assert [r.exact for r in table.rows] == [4.0, 2.0]
    assert table.rows[1].gap_vs_best == 2.0


def test_gap_report_duplicate_has_zero_gap(fig1_solved, u_min):
    env, bi, _ = fig1_solved
    r = m.deploy(env, bi.policy_, u_min, regime="true", episodes=100, seed=1)
    table = m.gap_report(env, u_min, [r, r])
    assert all(row.gap_vs_best == 0.0 for row in table.rows)


def test_gap_report_rejects_mismatched_environment(fig1_solved, fig2_solved, u_min):
    env1, bi1, _ = fig1_solved
    env2, bi2, _ = fig2_solved
    r1 = m.deploy(env1, bi1.policy_, u_min, regime="true", episodes=50, seed=0)
    r2 = m.deploy(env2, bi2.policy_, u_min, regime="true", episodes=50, seed=0)
    with pytest.raises(ValueError, match="different environment"):
        m.gap_report(env1, u_min, [r1, r2])


def test_gap_report_rejects_mismatched_utility(fig1_solved, u_min):
    env, bi, _ = fig1_solved
    r = m.deploy(env, bi.policy_, u_min, regime="true", episodes=50, seed=0)
    with pytest.raises(ValueError, match="utility"):
        m.gap_report(env, m.LinearUtility((0.5, 0.5)), [r, r])


def test_gap_report_needs_two_reports(fig1_solved, u_min):
    env, bi, _ = fig1_solved
    r = m.deploy(env, bi.policy_, u_min, regime="true", episodes=50, seed=0)
    with pytest.raises(ValueError, match="at least 2"):
        m.gap_report(env, u_min, [r])
