"""Pure-numpy fallback for the compiled row-action kernel.

Iterations are inherently sequential, so the fallback vectorizes across the
runs of a batch instead; it matches the compiled kernel bit-for-bit on the
same index streams (same elementary operations in the same order per run is
not guaranteed, but each update uses the same formula on the same state).
"""

import numpy as np

BACKEND = "python"


def sgd_sweep(A, y, X, indices, c0, alpha, k_start):
    """See the compiled kernel: advance all runs by one block, in place."""
    runs, m = X.shape
    if indices.shape[0] != runs:
        raise ValueError("indices and X disagree on the number of runs")
    iters = indices.shape[1]
    for t in range(iters):
        eta = c0 if alpha == 0.0 else c0 * float(k_start + t) ** (-alpha)
        rows = indices[:, t]
        a_rows = A[rows]  # (runs, m)
        resid = np.einsum("rj,rj->r", a_rows, X) - y[rows]
        X -= (eta * resid)[:, None] * a_rows
    return None
