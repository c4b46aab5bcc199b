"""Exact first and second moments of the SGD error.

Conditioning the row-action update on the past and averaging over the
uniform row index gives closed-form recursions for the mean ``mu_k`` of the
error and its second-moment matrix ``M_k``. These are the deterministic
ground truth against which every Monte Carlo mean-squared-error claim is
checked. Cost is O(n m^2) per step, so the oracle is for desk-scale
verification only.
"""

from dataclasses import dataclass

import numpy as np

DEFAULT_DIM_CAP = 64
DEFAULT_STEP_CAP = 10_000


class OracleBudgetError(RuntimeError):
    """Requested oracle computation exceeds the desk-scale budget."""


@dataclass(frozen=True)
class MomentState:
    """Moments of the error at iteration ``k`` (1-based, ``k=1`` is the
    deterministic initial state)."""

    k: int
    mu: np.ndarray
    M: np.ndarray

    def __post_init__(self):
        assert self.M.shape == (self.mu.size, self.mu.size)
        scale = max(np.max(np.abs(self.M)), 1e-300)
        assert np.max(np.abs(self.M - self.M.T)) <= 1e-12 * scale


def init_moments(x1, x_dag):
    """State at ``k = 1``: the error is deterministic, so ``M = mu mu^T``."""
    x1 = np.asarray(x1, dtype=float)
    x_dag = np.asarray(x_dag, dtype=float)
    if x1.shape != x_dag.shape:
        raise ValueError("x1 and x_dag must have equal length")
    mu = x1 - x_dag
    return MomentState(k=1, mu=mu, M=np.outer(mu, mu))


def step_moments(state, a, xi, eta, dim_cap=DEFAULT_DIM_CAP, step_cap=DEFAULT_STEP_CAP):
    """One exact moment update for stepsize ``eta`` and noise vector ``xi``.

    With ``P_i = I - eta a_i a_i^T`` and a uniform independent row index,

        mu' = (I - eta B) mu + eta/n A^T xi,
        M'  = mean_i [ P_i M P_i
                       + eta xi_i (P_i mu a_i^T + a_i mu^T P_i)
                       + eta^2 xi_i^2 a_i a_i^T ].

    The result is symmetrized to kill rounding drift.
    """
    a = np.asarray(a, dtype=float)
    xi = np.asarray(xi, dtype=float)
    n, m = a.shape
    if m > dim_cap or n > dim_cap:
        raise OracleBudgetError(f"dimensions {a.shape} exceed the oracle cap {dim_cap}")
    if state.k >= step_cap:
        raise OracleBudgetError(f"step count {state.k} exceeds the oracle cap {step_cap}")
    mu, M = state.mu, state.M
    b = a.T @ a / n

    mu_next = mu - eta * (b @ mu) + (eta / n) * (a.T @ xi)

    # mean_i P_i M P_i = M - eta(BM + MB) + eta^2 mean_i a_i a_i^T M a_i a_i^T
    am = a @ M            # (n, m), row i = a_i^T M
    quad = np.einsum("ij,ij->i", am, a)   # a_i^T M a_i
    term_quad = (a.T * quad) @ a / n
    m_lin = M - eta * (b @ M + M @ b.T) + eta * eta * term_quad

    # cross terms: eta xi_i (P_i mu a_i^T + transpose)
    pmu = mu[None, :] - eta * (a @ mu)[:, None] * a   # row i = P_i mu
    cross = (pmu * xi[:, None]).T @ a / n
    m_cross = eta * (cross + cross.T)

    # noise term: eta^2 xi_i^2 a_i a_i^T
    m_noise = eta * eta * (a.T * (xi * xi)) @ a / n

    m_next = m_lin + m_cross + m_noise
    m_next = 0.5 * (m_next + m_next.T)
    return MomentState(k=state.k + 1, mu=mu_next, M=m_next)


def run_moments(x1, x_dag, a, xi, sched, total_iters, checkpoints=None,
                dim_cap=DEFAULT_DIM_CAP, step_cap=DEFAULT_STEP_CAP):
    """Propagate the moments for ``total_iters`` SGD steps.

    Returns the list of states at the requested checkpoint iteration
    indices (1-based state index ``k``; ``k = total_iters + 1`` is the
    final state), or all states when ``checkpoints`` is None.
    """
    state = init_moments(x1, x_dag)
    want = None if checkpoints is None else set(int(c) for c in checkpoints)
    out = [state] if want is None or state.k in want else []
    for j in range(1, int(total_iters) + 1):
        state = step_moments(state, a, xi, float(sched.eta(j)),
                             dim_cap=dim_cap, step_cap=step_cap)
        if want is None or state.k in want:
            out.append(state)
    return out


def mse(state):
    """Exact mean squared error ``E||e_k||^2 = trace(M_k)``."""
    return float(np.trace(state.M))


def bias_sq(state):
    """Squared bias ``||E e_k||^2``."""
    return float(state.mu @ state.mu)


def variance(state):
    """``mse - bias_sq``; nonnegative up to rounding by PSD of the covariance."""
    return mse(state) - bias_sq(state)


def enumerate_mse(x1, x_dag, a, xi, sched, total_iters):
    """Brute-force ``E||e_k||^2`` by enumerating all ``n**(total_iters)``
    equally likely index paths. Exponential cost; the independent oracle
    for tests at tiny sizes.
    """
    import itertools

    a = np.asarray(a, dtype=float)
    x1 = np.asarray(x1, dtype=float)
    x_dag = np.asarray(x_dag, dtype=float)
    xi = np.asarray(xi, dtype=float)
    n = a.shape[0]
    if n ** total_iters > 2_000_000:
        raise OracleBudgetError("path enumeration too large")
    y_delta = a @ x_dag + xi
    etas = [float(sched.eta(j)) for j in range(1, total_iters + 1)]
    total = 0.0
    count = 0
    for path in itertools.product(range(n), repeat=total_iters):
        x = x1.copy()
        for j, i in enumerate(path):
            x = x - etas[j] * (a[i] @ x - y_delta[i]) * a[i]
        e = x - x_dag
        total += float(e @ e)
        count += 1
    return total / count
