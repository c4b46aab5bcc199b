"""The two iterative methods and their stopping rules.

``sgd_run``/``sgd_batch`` implement the row-action iteration with uniform
i.i.d. row sampling; ``landweber_run`` the full-gradient iteration. Both
record squared error against the true solution along the trajectory, which
is what every stopping rule here consumes.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .testproblems import row_norm_constant

DIVERGENCE_THRESHOLD = 1e12
DEFAULT_ITER_CAP = 2_000_000_000
LANDWEBER_DENSE_CHECKPOINTS = 10_000
LANDWEBER_THIN_STRIDE = 100
_CHUNK_ITERS = 1 << 20


class DivergenceError(RuntimeError):
    """Squared error crossed the divergence threshold."""


class SolverError(ValueError):
    pass


@dataclass(frozen=True)
class StepSchedule:
    """Polynomially decaying stepsize ``eta_j = c0 * j**(-alpha)``."""

    c0: float
    alpha: float

    def __post_init__(self):
        if self.c0 <= 0:
            raise SolverError(f"c0 must be positive, got {self.c0}")
        if not (0.0 <= self.alpha < 1.0):
            raise SolverError(f"alpha must lie in [0, 1), got {self.alpha}")

    def eta(self, j):
        """Stepsize at global iteration ``j`` (1-based)."""
        j = np.asarray(j, dtype=float)
        return self.c0 * j ** (-self.alpha)

    def admissibility(self, a):
        """Check the stepsize-schedule admissibility constraints against a
        concrete matrix; returns ``(ok, violated)`` with the name of the
        first violated constraint (or None)."""
        a = np.asarray(a, dtype=float)
        n = a.shape[0]
        b_norm = np.linalg.norm(a, ord=2) ** 2 / n
        if self.c0 > 1.0:
            return False, "c0 <= 1"
        if self.c0 > row_norm_constant(a) * (1 + 1e-12):
            return False, "c0 <= 1/max_i||a_i||^2"
        if self.c0 * b_norm > 1.0 / (2.0 * np.e) * (1 + 1e-12):
            return False, "c0*||B|| <= 1/(2e)"
        return True, None


@dataclass(frozen=True)
class Trajectory:
    """Checkpointed error history of one solver run."""

    method: str
    iters: np.ndarray
    epochs: np.ndarray
    sq_error: np.ndarray
    residual: np.ndarray
    schedule: StepSchedule | None = None
    seed: int | None = None
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        assert np.all(np.diff(self.iters) > 0)
        assert np.all(np.isfinite(self.sq_error))

    def to_csv(self, path):
        data = np.column_stack([self.iters, self.epochs, self.sq_error, self.residual])
        np.savetxt(path, data, delimiter=",", header="iter,epoch,sq_error,residual",
                   comments="", fmt=["%d", "%.10g", "%.10g", "%.10g"])


def epoch_checkpoints(n, max_epochs, thin_factor=None):
    """Iteration indices of the checkpoint cadence: every epoch boundary,
    optionally geometrically thinned for very long runs."""
    total = int(round(max_epochs * n))
    if total < 1:
        raise SolverError("max_epochs * n must be at least one iteration")
    epochs = np.arange(1, total // n + 1)
    if thin_factor is not None and thin_factor > 1.0 and len(epochs) > 0:
        keep = []
        nxt = 1.0
        for e in epochs:
            if e >= nxt:
                keep.append(e)
                nxt = max(e * thin_factor, e + 1)
        epochs = np.asarray(keep)
    return epochs * n


def sgd_batch(a, y, x1, x_dag, sched, checkpoint_iters, seeds,
              record_residual=False, iter_cap=DEFAULT_ITER_CAP,
              override_admissibility=False):
    """Run a batch of independently seeded SGD trajectories.

    Returns ``(sq_error, residual)`` arrays of shape (runs, checkpoints);
    ``residual`` is None unless requested. All runs share the matrix and
    data; run ``r`` draws its row indices from ``default_rng(seeds[r])``.
    """
    a = np.ascontiguousarray(a, dtype=float)
    y = np.ascontiguousarray(y, dtype=float)
    x_dag = np.asarray(x_dag, dtype=float)
    n, m = a.shape
    checkpoint_iters = np.asarray(checkpoint_iters, dtype=np.int64)
    if checkpoint_iters.size == 0 or np.any(np.diff(checkpoint_iters) <= 0):
        raise SolverError("checkpoints must be nonempty and strictly increasing")
    total = int(checkpoint_iters[-1])
    if total * len(seeds) > iter_cap:
        raise SolverError(f"iteration budget {total * len(seeds)} exceeds cap {iter_cap}")
    ok, violated = sched.admissibility(a)
    if not ok and not override_admissibility:
        raise SolverError(f"schedule violates admissibility constraint {violated!r}; "
                          "pass override_admissibility=True to run anyway")

    runs = len(seeds)
    X = np.ascontiguousarray(np.tile(np.asarray(x1, dtype=float), (runs, 1)))
    rngs = [np.random.default_rng(int(s)) for s in seeds]
    sq = np.empty((runs, checkpoint_iters.size))
    res = np.empty((runs, checkpoint_iters.size)) if record_residual else None

    done = 0
    for ci, cp in enumerate(checkpoint_iters):
        while done < cp:
            block = min(int(cp) - done, max(_CHUNK_ITERS // max(runs, 1), n))
            idx = np.empty((runs, block), dtype=np.int64)
            for r, rng in enumerate(rngs):
                idx[r] = rng.integers(0, n, size=block)
            kernels.sgd_sweep(a, y, X, idx, sched.c0, sched.alpha, done + 1)
            done += block
        err = X - x_dag
        sq[:, ci] = np.einsum("rj,rj->r", err, err)
        if record_residual:
            r_vec = X @ a.T - y
            res[:, ci] = np.sqrt(np.einsum("ri,ri->r", r_vec, r_vec))
        worst = sq[:, ci].max()
        if not np.isfinite(worst) or worst > DIVERGENCE_THRESHOLD:
            bad = int(np.argmax(sq[:, ci]))
            raise DivergenceError(
                f"squared error {worst:.3e} at iteration {int(cp)} (run {bad}) "
                f"crossed the divergence threshold {DIVERGENCE_THRESHOLD:.0e}")
    return sq, res


def sgd_run(inst, sched, max_epochs, seed, thin_factor=None,
            record_residual=True, iter_cap=DEFAULT_ITER_CAP,
            override_admissibility=False):
    """Single SGD trajectory on an instance; checkpoints at epoch boundaries.

    Deterministic in ``(seed, inst, sched)``. A fixed point (``x1 = x_dag``
    with exact data) stays at zero error up to rounding.
    """
    cps = epoch_checkpoints(inst.n, max_epochs, thin_factor)
    sq, res = sgd_batch(inst.A, inst.y_delta, inst.x1, inst.x_dag, sched, cps, [seed],
                        record_residual=record_residual, iter_cap=iter_cap,
                        override_admissibility=override_admissibility)
    residual = res[0] if res is not None else np.full(cps.size, np.nan)
    return Trajectory(method="sgd", iters=cps, epochs=cps / inst.n,
                      sq_error=sq[0], residual=residual, schedule=sched, seed=seed)


def landweber_run(inst, eta, max_iters, dense_until=LANDWEBER_DENSE_CHECKPOINTS,
                  thin_stride=LANDWEBER_THIN_STRIDE):
    """Deterministic full-gradient iteration
    ``x <- x - eta/n * A^T (A x - y)``.

    Checkpoints every iteration up to ``dense_until``, then every
    ``thin_stride`` iterations.
    """
    if eta <= 0:
        raise SolverError(f"eta must be positive, got {eta}")
    a = inst.A
    n = inst.n
    x = inst.x1.astype(float).copy()
    iters, sqs, ress = [], [], []
    step = eta / n
    for k in range(1, int(max_iters) + 1):
        r = a @ x - inst.y_delta
        x -= step * (a.T @ r)
        if k <= dense_until or k % thin_stride == 0 or k == int(max_iters):
            err = x - inst.x_dag
            sq = float(err @ err)
            if not math.isfinite(sq) or sq > DIVERGENCE_THRESHOLD:
                raise DivergenceError(
                    f"squared error {sq:.3e} at iteration {k} crossed the "
                    f"divergence threshold {DIVERGENCE_THRESHOLD:.0e}")
            iters.append(k)
            sqs.append(sq)
            ress.append(float(np.linalg.norm(a @ x - inst.y_delta)))
    iters = np.asarray(iters)
    return Trajectory(method="landweber", iters=iters, epochs=iters / n,
                      sq_error=np.asarray(sqs), residual=np.asarray(ress),
                      meta={"eta": eta})


def oracle_stop(epochs, values):
    """Argmin stopping along a recorded trajectory.

    Returns ``(k_star, e_star)``; ties break toward the smaller epoch.
    """
    epochs = np.asarray(epochs, dtype=float)
    values = np.asarray(values, dtype=float)
    if epochs.size == 0 or epochs.size != values.size:
        raise SolverError("need a nonempty series with matching epochs")
    i = int(np.argmin(values))
    return float(epochs[i]), float(values[i])


def a_priori_stop(w_norm, delta, nu, alpha, C):
    """A-priori stopping index ``ceil(C * (||w||/delta)^(2/((1+2nu)(1-alpha))))``."""
    if delta <= 0:
        raise SolverError("a priori stopping needs delta > 0")
    if w_norm <= 0 or nu <= 0.5 or not (0.0 <= alpha < 1.0) or C <= 0:
        raise SolverError("require w_norm > 0, nu > 1/2, alpha in [0,1), C > 0")
    expo = 2.0 / ((1.0 + 2.0 * nu) * (1.0 - alpha))
    return int(math.ceil(C * (w_norm / delta) ** expo))
