"""Discretized Fredholm/Volterra integral test problems.

Three classic one-dimensional first-kind integral equations, discretized to
square linear systems: ``shaw`` and ``gravity`` by midpoint quadrature,
``phillips`` by a piecewise-constant Galerkin scheme with per-element Gauss
quadrature. Construction is fully deterministic.
"""

from dataclasses import dataclass

import numpy as np

from .numerics import spectral_norm

PROBLEM_NAMES = ("shaw", "gravity", "phillips")

GRAVITY_DEPTH = 0.25
PHILLIPS_GAUSS_POINTS = 32


class ProblemError(ValueError):
    """Invalid test-problem request."""


@dataclass(frozen=True)
class TestProblem:
    """A discretized integral equation with its canonical exact solution."""

    name: str
    n: int
    m: int
    A: np.ndarray
    x_e: np.ndarray
    grid: np.ndarray

    def __post_init__(self):
        assert self.A.shape == (self.n, self.m)
        assert np.all(np.isfinite(self.A))
        assert np.all(np.isfinite(self.x_e))


def _shaw(n):
    # Midpoint rule on [-pi/2, pi/2]; the kernel is symmetric in (s, t).
    h = np.pi / n
    nodes = -np.pi / 2 + (np.arange(1, n + 1) - 0.5) * h
    s = nodes[:, None]
    t = nodes[None, :]
    u = np.pi * (np.sin(s) + np.sin(t))
    with np.errstate(invalid="ignore", divide="ignore"):
        sinc = np.where(u == 0.0, 1.0, np.sin(u) / np.where(u == 0.0, 1.0, u))
    a = h * (np.cos(s) + np.cos(t)) ** 2 * sinc**2
    x_e = 2.0 * np.exp(-6.0 * (nodes - 0.8) ** 2) + np.exp(-2.0 * (nodes + 0.5) ** 2)
    return a, x_e, nodes


def _gravity(n):
    h = 1.0 / n
    nodes = (np.arange(1, n + 1) - 0.5) * h
    d = GRAVITY_DEPTH
    diff = nodes[:, None] - nodes[None, :]
    a = h * d * (d**2 + diff**2) ** (-1.5)
    x_e = np.sin(np.pi * nodes) + 0.5 * np.sin(2.0 * np.pi * nodes)
    return a, x_e, nodes


def _phillips_theta(x):
    x = np.asarray(x, dtype=float)
    return np.where(np.abs(x) < 3.0, 1.0 + np.cos(np.pi * x / 3.0), 0.0)


def _phillips(n):
    # Piecewise-constant Galerkin on [-6, 6] with orthonormal box functions.
    # The kernel theta(s - t) is even, so A is a symmetric Toeplitz matrix;
    # only the first column of element integrals is needed.
    h = 12.0 / n
    left = -6.0 + np.arange(n) * h
    nodes = left + 0.5 * h

    gp, gw = np.polynomial.legendre.leggauss(PHILLIPS_GAUSS_POINTS)
    # Map to [0, h]; the double integral over element pair (i, j) depends
    # only on the offset (i - j) * h of the two elements.
    pts = 0.5 * h * (gp + 1.0)
    wts = 0.5 * h * gw
    col = np.zeros(n)
    max_offset = int(np.ceil(3.0 / h)) + 1
    for d in range(min(n, max_offset + 1)):
        diff = d * h + pts[:, None] - pts[None, :]
        vals = _phillips_theta(diff)
        col[d] = (wts[:, None] * wts[None, :] * vals).sum() / h
    idx = np.abs(np.arange(n)[:, None] - np.arange(n)[None, :])
    a = col[idx]
    x_e = _phillips_theta(nodes)
    return a, x_e, nodes


def make_problem(name, n):
    """Build the named test problem at size ``n`` (``n = m``).

    ``phillips`` requires ``n`` divisible by 4, matching the element layout
    of its classical closed-form discretization.
    """
    if name not in PROBLEM_NAMES:
        raise ProblemError(f"unknown problem {name!r}; expected one of {PROBLEM_NAMES}")
    n = int(n)
    if n < 4:
        raise ProblemError(f"n must be >= 4, got {n}")
    if name == "shaw":
        a, x_e, grid = _shaw(n)
    elif name == "gravity":
        a, x_e, grid = _gravity(n)
    else:
        if n % 4 != 0:
            raise ProblemError(f"phillips requires n divisible by 4, got {n}")
        a, x_e, grid = _phillips(n)
    return TestProblem(name=name, n=n, m=n, A=a, x_e=x_e, grid=grid)


def row_norm_constant(a):
    """The constant ``c = 1 / max_i ||a_i||^2`` used for stepsize scaling."""
    a = np.asarray(a, dtype=float)
    mx = float(np.max(np.sum(a * a, axis=1)))
    if mx == 0.0:
        raise ProblemError("zero matrix has no meaningful stepsize constant")
    return 1.0 / mx


def admissible_c0(a, alpha):
    """Largest initial stepsize compatible with the schedule admissibility
    constraints, together with a per-constraint report.

    The constraints are ``c0 <= 1/max_i ||a_i||^2``, ``c0 <= 1`` and
    ``c0 * ||B|| <= 1/(2e)`` with ``B = A^T A / n``.
    """
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.size == 0:
        raise ProblemError("matrix must be nonempty and 2-d")
    if not (0.0 <= alpha < 1.0):
        raise ProblemError(f"alpha must lie in [0, 1), got {alpha}")
    if not np.any(a):
        raise ProblemError("zero matrix has no admissible stepsize bound")
    n = a.shape[0]
    row_bound = row_norm_constant(a)
    b_norm = spectral_norm(a) ** 2 / n
    spectral_bound = 1.0 / (2.0 * np.e * b_norm)
    c0_max = min(row_bound, 1.0, spectral_bound)
    report = {
        "row_norm_bound": row_bound,
        "unit_bound": 1.0,
        "spectral_bound": spectral_bound,
        "B_norm": b_norm,
        "alpha": float(alpha),
    }
    assert c0_max <= row_bound and c0_max <= 1.0
    assert c0_max * b_norm <= 1.0 / (2.0 * np.e) * (1 + 1e-12)
    return c0_max, report
