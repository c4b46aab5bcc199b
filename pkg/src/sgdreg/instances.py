"""Fully specified inverse-problem instances.

Couples a system matrix with a smoothness-controlled true solution, exact
and noisy data, and the orthogonal preconditioning transform that makes the
rows of the matrix pairwise orthogonal.
"""

import json
from dataclasses import dataclass, field

import numpy as np

from .numerics import NumericsError, sym_eig

SOURCE_CUTOFF_RTOL = 1e-12
SOURCE_RESIDUAL_RTOL = 1e-6


class InstanceError(ValueError):
    """Invalid instance construction."""


@dataclass(frozen=True)
class InverseInstance:
    """One experiment: matrix, true solution, data, noise and source data.

    ``nu`` is the smoothing exponent of the true solution, ``w_norm`` the
    norm of the source element when known (nan when it is not).
    """

    A: np.ndarray
    x1: np.ndarray
    x_dag: np.ndarray
    nu: float
    y_dag: np.ndarray
    y_delta: np.ndarray
    xi: np.ndarray
    delta: float
    eps: float
    w_norm: float = float("nan")
    label: str = field(default="", compare=False)

    def __post_init__(self):
        n, m = self.A.shape
        if self.x_dag.shape != (m,) or self.y_dag.shape != (n,):
            raise InstanceError("inconsistent dimensions")
        y_ref = self.A @ self.x_dag
        scale = max(np.linalg.norm(y_ref), 1e-300)
        if np.linalg.norm(self.y_dag - y_ref) > 1e-12 * scale:
            raise InstanceError("y_dag does not equal A @ x_dag")
        if (self.eps == 0.0) != (self.delta == 0.0):
            raise InstanceError("eps and delta must vanish together")

    @property
    def n(self):
        return self.A.shape[0]

    @property
    def m(self):
        return self.A.shape[1]

    @property
    def B(self):
        return self.A.T @ self.A / self.n

    @property
    def delta_bar(self):
        """Row-normalized noise level ``delta / sqrt(n)``."""
        return self.delta / np.sqrt(self.n)


def make_true_solution(a, x_e, nu):
    """Smooth ``x_e`` by ``(A^T A)^nu`` and normalize to unit max-norm."""
    a = np.asarray(a, dtype=float)
    x_e = np.asarray(x_e, dtype=float)
    if nu < 0:
        raise InstanceError(f"nu must be >= 0, got {nu}")
    if not np.any(x_e):
        raise InstanceError("x_e must be nonzero")
    if nu == 0:
        smoothed = x_e
    else:
        lam, q = sym_eig(a.T @ a)
        smoothed = (q * lam**nu) @ (q.T @ x_e)
    peak = np.max(np.abs(smoothed))
    if peak < 1e-300:
        raise InstanceError("smoothed solution vanished numerically")
    return smoothed / peak


def synthesize_from_source(a, x1, nu, w):
    """True solution ``x1 + B^nu w`` with ``B = A^T A / n``.

    Instances built this way satisfy the power-type source condition exactly
    with known ``||w||``, which the theorem-bound audits require.
    """
    a = np.asarray(a, dtype=float)
    x1 = np.asarray(x1, dtype=float)
    w = np.asarray(w, dtype=float)
    if nu < 0:
        raise InstanceError(f"nu must be >= 0, got {nu}")
    if nu == 0:
        return x1 + w
    n = a.shape[0]
    lam, q = sym_eig(a.T @ a / n)
    return x1 + (q * lam**nu) @ (q.T @ w)


def source_element(a, x1, x_dag, nu):
    """Recover the source element ``w`` with ``B^nu w = x_dag - x1``.

    Uses the pseudo-inverse of ``B^nu`` with eigenvalue cutoff
    ``SOURCE_CUTOFF_RTOL`` relative to the largest eigenvalue. Returns
    ``(w, w_norm, residual)``; a residual above ``SOURCE_RESIDUAL_RTOL``
    relative to ``||x_dag - x1||`` raises, flagging that the source
    condition fails at this ``nu``.
    """
    a = np.asarray(a, dtype=float)
    diff = np.asarray(x_dag, dtype=float) - np.asarray(x1, dtype=float)
    n = a.shape[0]
    lam, q = sym_eig(a.T @ a / n)
    powered = lam ** float(nu) if nu > 0 else np.ones_like(lam)
    cutoff = SOURCE_CUTOFF_RTOL * max(powered.max(), 1e-300)
    inv = np.where(powered > cutoff, 1.0 / np.where(powered > cutoff, powered, 1.0), 0.0)
    w = (q * inv) @ (q.T @ diff)
    resid = np.linalg.norm((q * powered) @ (q.T @ w) - diff)
    scale = np.linalg.norm(diff)
    if scale > 0 and resid > SOURCE_RESIDUAL_RTOL * scale:
        raise InstanceError(
            f"source condition not satisfied at nu={nu}: relative residual {resid / scale:.3e}"
        )
    return w, float(np.linalg.norm(w)), float(resid)


def add_noise(y_dag, eps, seed):
    """Additive Gaussian noise scaled by ``eps * ||y_dag||_inf``.

    Returns ``(y_delta, xi, delta)`` where ``xi`` is the standard-normal
    draw and ``delta = ||y_delta - y_dag||``. Deterministic per seed.
    """
    y_dag = np.asarray(y_dag, dtype=float)
    if eps < 0:
        raise InstanceError(f"eps must be >= 0, got {eps}")
    if eps == 0.0:
        return y_dag.copy(), np.zeros_like(y_dag), 0.0
    rng = np.random.default_rng(seed)
    xi = rng.standard_normal(y_dag.shape[0])
    y_delta = y_dag + eps * np.max(np.abs(y_dag)) * xi
    return y_delta, xi, float(np.linalg.norm(y_delta - y_dag))


def precondition(a, y):
    """Rotate the data space so the system matrix has orthogonal rows.

    Returns ``(a_tilde, y_tilde)`` with ``a_tilde`` equal to the
    diagonal-times-orthonormal factor of the SVD of ``a`` and
    ``y_tilde = U^T y``. ``A^T A`` (and hence the Landweber iteration) is
    preserved exactly up to rounding.
    """
    a = np.asarray(a, dtype=float)
    y = np.asarray(y, dtype=float)
    if y.shape[0] != a.shape[0]:
        raise InstanceError("y length must match the row count of A")
    try:
        u, sigma, vt = np.linalg.svd(a, full_matrices=True)
    except np.linalg.LinAlgError as exc:
        raise NumericsError(f"SVD did not converge: {exc}") from exc
    n, m = a.shape
    sig_full = np.zeros((n, m))
    r = min(n, m)
    sig_full[:r, :r] = np.diag(sigma[:r])
    a_tilde = sig_full @ vt
    y_tilde = u.T @ y
    return a_tilde, y_tilde


def make_instance(a, x_dag, nu, eps, seed, x1=None, w_norm=float("nan"), label=""):
    """Assemble an :class:`InverseInstance` from matrix, solution and noise."""
    a = np.asarray(a, dtype=float)
    x_dag = np.asarray(x_dag, dtype=float)
    x1 = np.zeros(a.shape[1]) if x1 is None else np.asarray(x1, dtype=float)
    if x_dag.shape != (a.shape[1],) or x1.shape != x_dag.shape:
        raise InstanceError(
            f"solution length {x_dag.shape} does not match matrix {a.shape}")
    y_dag = a @ x_dag
    y_delta, _, delta = add_noise(y_dag, eps, seed)
    # The stored xi is the realized perturbation in data units, so that
    # delta == ||xi|| holds exactly as stored.
    return InverseInstance(
        A=a, x1=x1, x_dag=x_dag, nu=float(nu), y_dag=y_dag, y_delta=y_delta,
        xi=y_delta - y_dag, delta=delta, eps=float(eps), w_norm=float(w_norm), label=label,
    )


def instance_to_manifest(inst, matrix_path):
    """JSON-serializable manifest; the matrix is referenced by file path."""
    return {
        "matrix_path": str(matrix_path),
        "n": inst.n,
        "m": inst.m,
        "nu": inst.nu,
        "eps": inst.eps,
        "delta": inst.delta,
        "w_norm": None if np.isnan(inst.w_norm) else inst.w_norm,
        "label": inst.label,
        "x1": inst.x1.tolist(),
        "x_dag": inst.x_dag.tolist(),
        "y_dag": inst.y_dag.tolist(),
        "y_delta": inst.y_delta.tolist(),
        "xi": inst.xi.tolist(),
    }


def instance_from_manifest(manifest, a):
    """Rebuild an instance from a manifest dict and its matrix."""
    w_norm = manifest.get("w_norm")
    return InverseInstance(
        A=np.asarray(a, dtype=float),
        x1=np.asarray(manifest["x1"], dtype=float),
        x_dag=np.asarray(manifest["x_dag"], dtype=float),
        nu=float(manifest["nu"]),
        y_dag=np.asarray(manifest["y_dag"], dtype=float),
        y_delta=np.asarray(manifest["y_delta"], dtype=float),
        xi=np.asarray(manifest["xi"], dtype=float),
        delta=float(manifest["delta"]),
        eps=float(manifest["eps"]),
        w_norm=float("nan") if w_norm is None else float(w_norm),
        label=manifest.get("label", ""),
    )


def dump_instance(inst, json_path, matrix_path):
    np.savetxt(matrix_path, inst.A, delimiter=",")
    with open(json_path, "w") as fh:
        json.dump(instance_to_manifest(inst, matrix_path), fh, indent=2)


def load_instance(json_path):
    with open(json_path) as fh:
        manifest = json.load(fh)
    a = np.loadtxt(manifest["matrix_path"], delimiter=",", ndmin=2)
    return instance_from_manifest(manifest, a)
