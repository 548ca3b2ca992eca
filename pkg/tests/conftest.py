import pytest

import augmorl as m


@pytest.fixture(scope="session")
def u_min():
    return m.MinUtility()


@pytest.fixture()
def fig1():
    return m.fig1()


@pytest.fixture()
def fig2():
    return m.fig2()


@pytest.fixture(scope="session")
def fig2_model():
    # fitted once; immutable after fit, safe to share across tests
    return m.fit_reward_model(m.fig2(), samples=10_000, seed=0)


@pytest.fixture(scope="session")
def fig1_solved(u_min):
    env = m.fig1()
    bi = m.BackwardInductionSolver(u_min).fit(env)
    markov = m.PolicyEnumerationSolver(u_min, "markov").fit(env)
    return env, bi, markov


@pytest.fixture(scope="session")
def fig2_solved(u_min, fig2_model):
    env = m.fig2()
    bi = m.BackwardInductionSolver(u_min).fit(env)
    proxy = m.PolicyEnumerationSolver(u_min, "proxy-augmented", reward_model=fig2_model).fit(env)
    return env, bi, proxy
