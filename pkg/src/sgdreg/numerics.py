"""Dense real matrix kernels: SVD, symmetric fractional powers, spectral norms.

Everything is double precision and backed by LAPACK via numpy.linalg; the
wrappers add the validation and failure contracts the rest of the package
relies on.
"""

import numpy as np

SVD_RESIDUAL_TOL = 1e-10
ORTHONORMALITY_TOL = 1e-12
SYMMETRY_RTOL = 1e-12
EIG_CLAMP_RTOL = 1e-10


class NumericsError(Exception):
    """Raised when a dense kernel cannot meet its contract."""


def _as_matrix(a):
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.size == 0:
        raise NumericsError(f"expected a nonempty 2-d array, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise NumericsError("matrix has non-finite entries")
    return a


def svd(a):
    """Full SVD of a dense real matrix.

    Returns ``(u, sigma, v)`` with ``a = u @ diag(sigma) @ v.T`` (thin
    factors), ``sigma`` nonincreasing and nonnegative, and both factors
    column orthonormal.

    Raises
    ------
    NumericsError
        If the iterative LAPACK routine fails to converge, or the computed
        factorization misses the reconstruction/orthogonality tolerances.
    """
    a = _as_matrix(a)
    try:
        u, sigma, vt = np.linalg.svd(a, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise NumericsError(f"SVD did not converge: {exc}") from exc
    v = vt.T
    scale = 1.0 + (sigma[0] if sigma.size else 0.0)
    resid = np.linalg.norm(a - (u * sigma) @ vt, ord=2)
    if resid > SVD_RESIDUAL_TOL * scale:
        raise NumericsError(f"SVD reconstruction residual {resid:.3e} exceeds tolerance")
    for q in (u, v):
        gram_err = np.max(np.abs(q.T @ q - np.eye(q.shape[1])))
        if gram_err > ORTHONORMALITY_TOL:
            raise NumericsError(f"SVD factor not orthonormal (max error {gram_err:.3e})")
    return u, sigma, v


def spectral_norm(a):
    """Largest singular value of ``a``."""
    a = _as_matrix(a)
    if not np.any(a):
        return 0.0
    return float(np.linalg.norm(a, ord=2))


def _check_symmetric(s):
    s = _as_matrix(s)
    if s.shape[0] != s.shape[1]:
        raise NumericsError(f"matrix is not square: {s.shape}")
    scale = max(np.max(np.abs(s)), 1e-300)
    asym = np.max(np.abs(s - s.T))
    if asym > SYMMETRY_RTOL * scale:
        raise NumericsError(f"matrix is not symmetric (relative asymmetry {asym / scale:.3e})")
    return 0.5 * (s + s.T)


def sym_eig(s):
    """Eigendecomposition of a symmetric PSD matrix with rounding-level
    negative eigenvalues clamped to zero.

    Returns ``(lam, q)`` with ``s = q @ diag(lam) @ q.T``, ``lam`` ascending.
    Eigenvalues below ``-EIG_CLAMP_RTOL * ||s||`` are rejected: the matrix is
    then genuinely indefinite, not merely a rounded PSD matrix.
    """
    s = _check_symmetric(s)
    lam, q = np.linalg.eigh(s)
    norm = max(abs(lam[0]), abs(lam[-1]))
    if lam[0] < -EIG_CLAMP_RTOL * norm:
        raise NumericsError(f"matrix has a negative eigenvalue {lam[0]:.3e} beyond tolerance")
    return np.clip(lam, 0.0, None), q


def sym_power(s, p):
    """``p``-th power of a symmetric PSD matrix via its eigendecomposition.

    ``p`` must be >= 0; ``0**0`` is taken as 1 so that ``sym_power(s, 0)``
    is the identity.
    """
    if p < 0:
        raise NumericsError(f"power must be nonnegative, got {p}")
    lam, q = sym_eig(s)
    if p == 0:
        powered = np.ones_like(lam)
    else:
        powered = lam**p
    out = (q * powered) @ q.T
    return 0.5 * (out + out.T)


def power_iteration_norm(a, iters=500, seed=0):
    """Spectral-norm estimate by power iteration on ``a.T @ a``.

    Independent of :func:`svd`; used as a cross-check oracle in tests.
    """
    a = _as_matrix(a)
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(a.shape[1])
    v /= np.linalg.norm(v)
    est = 0.0
    for _ in range(iters):
        w = a.T @ (a @ v)
        nw = np.linalg.norm(w)
        if nw == 0.0:
            return 0.0
        v = w / nw
        est = nw
    return float(np.sqrt(est))
