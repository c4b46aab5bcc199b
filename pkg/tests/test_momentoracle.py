import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sgdreg.momentoracle import (
    OracleBudgetError,
    bias_sq,
    enumerate_mse,
    init_moments,
    mse,
    run_moments,
    step_moments,
    variance,
)
from sgdreg.solvers import StepSchedule, sgd_batch


def random_case(seed, n=3, m=3, noisy=True):
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((n, m)) * 0.5
    x1 = rng.standard_normal(m)
    x_dag = rng.standard_normal(m)
    xi = rng.standard_normal(n) * 0.05 if noisy else np.zeros(n)
    return a, x1, x_dag, xi


def test_init_moments_deterministic_state():
    a, x1, x_dag, _ = random_case(0)
    st0 = init_moments(x1, x_dag)
    assert st0.k == 1
    assert mse(st0) == pytest.approx(np.sum((x1 - x_dag) ** 2))
    assert variance(st0) == pytest.approx(0.0, abs=1e-12)


@settings(max_examples=15, deadline=None)
@given(seed=st.integers(0, 10_000), k=st.integers(2, 7),
       alpha=st.sampled_from([0.0, 0.3, 0.6]))
def test_oracle_matches_path_enumeration(seed, k, alpha):
    a, x1, x_dag, xi = random_case(seed)
    sched = StepSchedule(0.3, alpha)
    states = run_moments(x1, x_dag, a, xi, sched, k - 1)
    exact = enumerate_mse(x1, x_dag, a, xi, sched, k - 1)
    assert mse(states[-1]) == pytest.approx(exact, rel=1e-10)


def test_variance_nonnegative():
    a, x1, x_dag, xi = random_case(5)
    states = run_moments(x1, x_dag, a, xi, StepSchedule(0.25, 0.1), 30)
    for s in states:
        assert variance(s) >= -1e-10 * max(mse(s), 1.0)


def test_moment_state_symmetry_preserved():
    a, x1, x_dag, xi = random_case(7)
    state = init_moments(x1, x_dag)
    for j in range(1, 50):
        state = step_moments(state, a, xi, 0.3 * j ** -0.5)
    assert np.allclose(state.M, state.M.T)


def test_budget_caps():
    rng = np.random.default_rng(0)
    a = rng.standard_normal((70, 70))
    with pytest.raises(OracleBudgetError):
        step_moments(init_moments(np.zeros(70), np.ones(70)), a, np.zeros(70), 0.1)
    a3, x1, x_dag, xi = random_case(1)
    with pytest.raises(OracleBudgetError):
        enumerate_mse(x1, x_dag, a3, xi, StepSchedule(0.3, 0.0), 20)


def test_monte_carlo_consistency_small():
    # MC mean over many runs should track the exact oracle value
    a, x1, x_dag, xi = random_case(9, n=5, m=5)
    sched = StepSchedule(0.2, 0.0)
    iters = 60
    states = run_moments(x1, x_dag, a, xi, sched, iters, checkpoints=[iters + 1])
    exact = mse(states[-1])
    seeds = list(range(4000))
    sq, _ = sgd_batch(a, a @ x_dag + xi, x1, x_dag, sched, [iters], seeds,
                      override_admissibility=True)
    mc = sq[:, -1].mean()
    stderr = sq[:, -1].std(ddof=1) / np.sqrt(len(seeds))
    assert abs(mc - exact) <= 5 * stderr
