import numpy as np
import pytest

from sgdreg import _kernels_py, kernels
from sgdreg.solvers import StepSchedule
from sgdreg.testproblems import make_problem, row_norm_constant

cython_kernels = pytest.importorskip("sgdreg._kernels")


def _setup(n=24, runs=7, iters=400, seed=2):
    prob = make_problem("gravity", n)
    a = np.ascontiguousarray(prob.A)
    x_dag = prob.x_e / np.max(np.abs(prob.x_e))
    y = a @ x_dag
    idx = np.random.default_rng(seed).integers(0, n, size=(runs, iters))
    x0 = np.zeros((runs, n))
    return a, y, idx, x0


@pytest.mark.parametrize("alpha", [0.0, 0.5])
def test_backends_agree(alpha):
    a, y, idx, x0 = _setup()
    sched = StepSchedule(row_norm_constant(a) / 2, alpha)
    xc = np.ascontiguousarray(x0.copy())
    xp = np.ascontiguousarray(x0.copy())
    cython_kernels.sgd_sweep(a, y, xc, idx, sched.c0, sched.alpha, 1)
    _kernels_py.sgd_sweep(a, y, xp, idx, sched.c0, sched.alpha, 1)
    np.testing.assert_allclose(xc, xp, atol=1e-12)


def test_k_start_continuation_matches_single_sweep():
    a, y, idx, x0 = _setup(iters=300)
    c0, alpha = row_norm_constant(a) / 2, 0.4
    x_once = np.ascontiguousarray(x0.copy())
    kernels.sgd_sweep(a, y, x_once, idx, c0, alpha, 1)
    x_split = np.ascontiguousarray(x0.copy())
    kernels.sgd_sweep(a, y, x_split, np.ascontiguousarray(idx[:, :100]), c0, alpha, 1)
    kernels.sgd_sweep(a, y, x_split, np.ascontiguousarray(idx[:, 100:]), c0, alpha, 101)
    np.testing.assert_allclose(x_split, x_once, atol=1e-13)


def test_backend_reported():
    assert kernels.backend() in ("cython", "python")
