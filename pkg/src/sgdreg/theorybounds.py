"""Numerical audits of the error-decomposition and rate-bound inequalities.

Every operation here either enumerates a combinatorial quantity exactly or
evaluates a closed-form bound, and compares the two. Audits are only run on
configurations satisfying the stated hypotheses; inadmissible inputs are
rejected rather than silently audited.
"""

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .numerics import sym_eig

ENUMERATION_CAP = 10_000_000
ROW_ORTHO_RTOL = 1e-10
SLACK_RTOL = 1e-9


class HypothesisError(ValueError):
    """The audited inequality's hypotheses are not satisfied."""


class EnumerationBudgetError(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# Elementary partial-sum machinery


def phi(s):
    """Case-wise constant of the partial-sum bound for ``sum j**(-s)``."""
    s = float(s)
    if s < 0:
        return 2.0 ** (1.0 - s) / (1.0 - s)
    if s < 1:
        return 1.0 / (1.0 - s)
    if s == 1:
        return 2.0
    return s / (s - 1.0)


def kpow_reduced(k, s):
    """``k**max(1-s, 0)`` with the convention ``max(ln k, 1)`` at ``s == 1``."""
    k = float(k)
    if s < 1:
        return k ** (1.0 - s)
    if s == 1:
        return max(math.log(k), 1.0)
    return 1.0


def partial_sum_bound_check(s, k):
    """Exact ``sum_{j<=k} j**(-s)`` versus its closed-form bound."""
    if k < 1:
        raise HypothesisError("k must be >= 1")
    j = np.arange(1, int(k) + 1, dtype=float)
    lhs = float(np.sum(j ** (-float(s))))
    rhs = phi(s) * kpow_reduced(k, s)
    return lhs, rhs, lhs <= rhs * (1 + 1e-12)


# ---------------------------------------------------------------------------
# Index sets


@dataclass(frozen=True)
class IndexSet:
    """The family of strictly decreasing multi-indices of length ``i``
    within ``[k1, k2]``; ``members`` lists tuples ``(j1 > j2 > ... > ji)``."""

    k1: int
    k2: int
    i: int
    members: tuple

    @property
    def count(self):
        return len(self.members)


def index_tuples(k1, k2, i):
    """Iterate the members of the family as decreasing tuples.

    For ``i = 0`` the single empty tuple; for ``i`` exceeding the interval
    length the family contributes nothing to any sum (empty iteration).
    """
    if i == 0:
        yield ()
        return
    width = k2 - k1 + 1
    if i > width or i < 0 or width <= 0:
        return
    for combo in itertools.combinations(range(k1, k2 + 1), i):
        yield tuple(reversed(combo))


def enumerate_index_sets(k1, k2, i):
    if k1 > k2:
        raise HypothesisError(f"need k1 <= k2, got [{k1}, {k2}]")
    if i < 0:
        raise HypothesisError("i must be >= 0")
    width = k2 - k1 + 1
    if 0 <= i <= width and math.comb(width, i) > ENUMERATION_CAP:
        raise EnumerationBudgetError(
            f"family size C({width},{i}) exceeds the enumeration cap")
    return IndexSet(k1=k1, k2=k2, i=i, members=tuple(index_tuples(k1, k2, i)))


def complement(k1, k2, J):
    """``{k1..k2} \\ J`` as a sorted tuple."""
    excl = set(J)
    return tuple(j for j in range(k1, k2 + 1) if j not in excl)


# ---------------------------------------------------------------------------
# Spectral evaluation of product operators


def product_operator(b, J, sched):
    """The commuting product ``prod_{j in J} (I - eta_j B)``; identity for
    the empty set."""
    b = np.asarray(b, dtype=float)
    out = np.eye(b.shape[0])
    for j in J:
        out = out @ (np.eye(b.shape[0]) - float(sched.eta(j)) * b)
    return out


class SpectralProducts:
    """Eigenbasis evaluation of products ``Pi_J(B) B^s`` for one ``(B,
    sched, k)`` triple; all spectral norms and applications reduce to
    per-eigenvalue scalar products."""

    def __init__(self, b, sched, k):
        self.lam, self.q = sym_eig(np.asarray(b, dtype=float))
        self.sched = sched
        self.k = int(k)
        self.eta = np.array([0.0] + [float(sched.eta(j)) for j in range(1, self.k + 1)])
        # factors[j] = 1 - eta_j * lambda, per eigenvalue
        self.factors = np.ones((self.k + 1, self.lam.size))
        for j in range(1, self.k + 1):
            self.factors[j] = 1.0 - self.eta[j] * self.lam

    def prod(self, J):
        """Per-eigenvalue value of ``Pi_J``."""
        if len(J) == 0:
            return np.ones_like(self.lam)
        return np.prod(self.factors[list(J)], axis=0)

    def prod_range_minus(self, a, b, J):
        """``Pi`` over ``{a..b} \\ J`` per eigenvalue."""
        return self.prod(complement(a, b, J))

    def norm(self, values):
        return float(np.max(np.abs(values))) if values.size else 0.0

    def bpow(self, s):
        with np.errstate(divide="ignore"):
            out = np.where(self.lam > 0, self.lam ** float(s), 0.0 if s > 0 else 1.0)
        return out

    def apply_sq(self, values, vec_in_eigbasis):
        """``||diag(values) v||^2`` for ``v`` expressed in the eigenbasis."""
        return float(np.sum((values * vec_in_eigbasis) ** 2))


# ---------------------------------------------------------------------------
# Lemma-level checks


def _require_schedule_vs_b(sched, b_norm):
    if sched.c0 > 1.0 or sched.c0 * b_norm > (1.0 / (2.0 * np.e)) * (1 + 1e-12):
        raise HypothesisError(
            "schedule violates c0 <= 1 or c0*||B|| <= 1/(2e); lemma hypotheses unmet")


def kernel_bound_check(b, sched, k_prime, k, ell, s, J_ell):
    """Spectral-norm bound on ``Pi_{J^c}(B) B^s``: exact lhs via the
    eigendecomposition versus the closed-form rhs."""
    if s <= 0:
        raise HypothesisError("s must be positive")
    if not (k_prime <= k and 0 <= ell < k + 1 - k_prime):
        raise HypothesisError("need k' <= k and 0 <= ell < k+1-k'")
    if len(J_ell) != ell or any(not (k_prime <= j <= k) for j in J_ell):
        raise HypothesisError("J_ell must contain ell indices within [k', k]")
    sp = SpectralProducts(b, sched, k)
    _require_schedule_vs_b(sched, float(np.max(sp.lam)) if sp.lam.size else 0.0)
    vals = sp.prod_range_minus(k_prime, k, J_ell) * sp.bpow(s)
    lhs = sp.norm(vals)
    rhs = (s**s) * (np.e * sched.c0) ** (-s) * (k + 1 - k_prime - ell) ** (-s) * k ** (sched.alpha * s)
    return lhs, rhs, lhs <= rhs * (1 + 1e-10)


def reindex_identity_check(k, i):
    """The two sum-reindexing identities over decreasing multi-indices,
    checked by exact counting."""
    lhs = sum(1 for _ in index_tuples(1, k, i + 1))
    # the empty outer tuple carries the virtual leading index k + 1
    mid = sum(1 for J in index_tuples(2, k, i) for _ in range(1, (J[-1] if J else k + 1)))
    # second form: sum over the innermost index first
    right = sum(
        sum(1 for _ in index_tuples(j + 1, k, i)) for j in range(1, k - i + 1)
    )
    return lhs, mid, right, lhs == mid == right


def indexsum_bound_check(k, i, alpha):
    """Exact ``sum_{J_i} prod j_t**(-2 alpha)`` versus its product bound."""
    if k < 1 or i < 1:
        raise HypothesisError("need k >= 1 and i >= 1")
    if math.comb(k, i) > ENUMERATION_CAP:
        raise EnumerationBudgetError("index family too large")
    lhs = 0.0
    for J in index_tuples(1, k, i):
        lhs += float(np.prod([j ** (-2.0 * alpha) for j in J]))
    rhs = phi(2 * alpha) ** i * kpow_reduced(k, 2 * alpha) ** i
    return lhs, rhs, lhs <= rhs * (1 + 1e-12)


def count_bound_check(k, j, i):
    """``|J_{[j+1,k],i}| = C(k-j, i)`` versus ``(k-j)^i / i!``."""
    if not (0 <= j <= k - 1 and 1 <= i <= k - j):
        raise HypothesisError("need 0 <= j <= k-1 and 1 <= i <= k-j")
    lhs = math.comb(k - j, i)
    rhs = (k - j) ** i / math.factorial(i)
    return lhs, rhs, lhs <= rhs * (1 + 1e-12)


# ---------------------------------------------------------------------------
# The error decomposition


@dataclass(frozen=True)
class DecompositionReport:
    """Enumerated right-hand side of the layered error decomposition at
    ``(k, ell)`` against the exact mean squared error at ``k + 1``."""

    k: int
    ell: int
    terms_apx: tuple
    terms_ppg: tuple
    tail: float
    rhs_total: float
    lhs_exact: float

    @property
    def slack(self):
        return self.rhs_total - self.lhs_exact


def rows_pairwise_orthogonal(a, rtol=ROW_ORTHO_RTOL):
    a = np.asarray(a, dtype=float)
    g = a @ a.T
    off = np.max(np.abs(g - np.diag(np.diag(g))))
    norm_sq = float(np.linalg.norm(a, ord=2) ** 2)
    return off <= rtol * max(norm_sq, 1e-300)


def decomposition_terms(inst, sched, k, ell, moment_states, exact_corollary=False,
                        allow_general_matrix=False):
    """Enumerate every term of the error decomposition exactly.

    ``moment_states`` must contain states for ``k`` indices ``1..k+1``. The
    structural hypothesis (pairwise orthogonal rows) is enforced unless
    ``allow_general_matrix`` requests exploratory evaluation.
    """
    if not (0 <= ell < k):
        raise HypothesisError("need 0 <= ell < k")
    if exact_corollary and inst.delta != 0.0:
        raise HypothesisError("the exact-data decomposition requires delta = 0")
    if not allow_general_matrix and not rows_pairwise_orthogonal(inst.A):
        raise HypothesisError(
            "matrix rows are not pairwise orthogonal; the decomposition "
            "hypothesis fails (pass allow_general_matrix=True to evaluate anyway)")
    states = {s.k: s for s in moment_states}
    for j in list(range(1, k + 1)) + [k + 1]:
        if j not in states:
            raise HypothesisError(f"moment state for k={j} missing")
    if math.comb(k, ell + 1) > ENUMERATION_CAP:
        raise EnumerationBudgetError("decomposition enumeration too large")

    n = inst.n
    b = inst.B
    sp = SpectralProducts(b, sched, k)
    e1 = inst.x1 - inst.x_dag
    e1_hat = sp.q.T @ e1
    dbar2 = inst.delta_bar**2
    # per-j eigenbasis diagonal of M_j, for the tail expectations
    diag_m = {j: np.einsum("di,ij,jd->d", sp.q.T, states[j].M, sp.q)
              for j in range(1, k + 1)}

    # approximation-error layers
    terms_apx = []
    for i in range(ell + 1):
        coef = (1.0 if exact_corollary else 2.0 ** (i + 1)) * (n - 1.0) ** i
        total = 0.0
        bpi = sp.bpow(i)
        for J in index_tuples(1, k, i):
            w = float(np.prod([sp.eta[j] ** 2 for j in J])) if J else 1.0
            vals = sp.prod_range_minus(1, k, J) * bpi
            total += w * sp.apply_sq(vals, e1_hat)
        terms_apx.append(coef * total)

    # propagation-error layers (vanish identically for exact data)
    terms_ppg = []
    if dbar2 > 0 and not exact_corollary:
        bhalf = sp.bpow(0.5)
        for i in range(ell + 1):
            coef = 2.0 ** (i + 1) * (n - 1.0) ** i * dbar2
            total = 0.0
            bpi = sp.bpow(i) * bhalf
            if i == 0:
                acc = np.zeros_like(sp.lam)
                sq_sum = 0.0
                for j in range(1, k + 1):
                    vals = sp.prod_range_minus(j + 1, k, ()) * bhalf
                    acc = acc + sp.eta[j] * vals
                    sq_sum += sp.eta[j] ** 2 * sp.norm(vals) ** 2
                total = sp.norm(acc) ** 2 + (n - 1.0) * sq_sum
            else:
                for J in index_tuples(2, k, i):
                    w = float(np.prod([sp.eta[j] ** 2 for j in J]))
                    j_i = J[-1]
                    acc = np.zeros_like(sp.lam)
                    sq_sum = 0.0
                    for j_next in range(1, j_i):
                        vals = sp.prod_range_minus(j_next + 1, k, J) * bpi
                        acc = acc + sp.eta[j_next] * vals
                        sq_sum += sp.eta[j_next] ** 2 * sp.norm(vals) ** 2
                    total += w * (sp.norm(acc) ** 2 + (n - 1.0) * sq_sum)
            terms_ppg.append(coef * total)
    else:
        terms_ppg = [0.0] * (ell + 1)

    # stochastic tail
    tail_coef = (2.0 ** (ell + 1) if not exact_corollary else 1.0) * (n - 1.0) ** (ell + 1)
    bl1 = sp.bpow(ell + 1)
    tail = 0.0
    for J in index_tuples(1, k, ell + 1):
        w = float(np.prod([sp.eta[j] ** 2 for j in J]))
        j_last = J[-1]
        vals = sp.prod_range_minus(j_last + 1, k, J[:-1]) * bl1
        tail += w * float(np.sum(vals**2 * diag_m[j_last]))
    tail *= tail_coef

    rhs = float(sum(terms_apx) + sum(terms_ppg) + tail)
    lhs = float(np.trace(states[k + 1].M))
    return DecompositionReport(k=k, ell=ell, terms_apx=tuple(terms_apx),
                               terms_ppg=tuple(terms_ppg), tail=tail,
                               rhs_total=rhs, lhs_exact=lhs)


# ---------------------------------------------------------------------------
# Closed-form bounds on the decomposition components


@dataclass(frozen=True)
class BoundContext:
    """Primitives from which every derived bound constant is recomputed."""

    nu: float
    ell: int
    alpha: float
    n: int
    c0: float
    w_norm: float
    delta_bar: float

    def h0(self, k):
        return (2.0 * (self.nu + self.ell) ** 2 * self.n * phi(2 * self.alpha)
                * float(k) ** (-2.0 * (1 - self.alpha)) * kpow_reduced(k, 2 * self.alpha))

    def h1(self, k):
        return (2.0 * (2 * self.ell + 1) ** 2 * self.n * phi(2 * self.alpha)
                * float(k) ** (-2.0 * (1 - self.alpha)) * kpow_reduced(k, 2 * self.alpha))

    def h2(self, k):
        return (2.0 ** (2 * self.alpha - 1) * (self.ell + 2) ** 2 * self.n
                * self.c0 * float(k) ** (-self.alpha))


def apx_bound(ctx, k):
    """Closed-form bound on the total approximation error at iteration ``k``."""
    if ctx.nu <= 0.5:
        raise HypothesisError("nu must exceed 1/2")
    if ctx.ell == 0:
        # single-layer bound; no layer-count constant needed
        c = 2.0 ** (1 - 2 * ctx.nu) * ctx.nu ** (2 * ctx.nu)
        return c * ctx.c0 ** (-2 * ctx.nu) * float(k) ** (-2 * ctx.nu * (1 - ctx.alpha)) * ctx.w_norm**2
    if ctx.ell < ctx.nu:
        raise HypothesisError("need ell >= nu")
    if k < 2 * ctx.ell:
        raise HypothesisError("need k >= 2*ell")
    if ctx.h0(k) <= 0.5:
        c = 4.0 * (ctx.nu + ctx.ell) ** (2 * ctx.nu)
    else:
        h = ctx.h0(2 * ctx.ell)
        c = 2.0 * (ctx.nu + ctx.ell) ** (2 * ctx.nu) * sum(h**i for i in range(ctx.ell + 1))
    return c * ctx.c0 ** (-2 * ctx.nu) * float(k) ** (-2 * ctx.nu * (1 - ctx.alpha)) * ctx.w_norm**2


def ppg_bound(ctx, k):
    """Closed-form bound on the total propagation error at iteration ``k``."""
    if k < 4 * ctx.ell:
        raise HypothesisError("need k >= 4*ell")
    pa = phi(ctx.alpha)
    if ctx.ell == 0 or (ctx.h1(k) <= 0.5 and ctx.h2(k) <= 0.5):
        c = (2.0**4 * (ctx.ell + 1) * ctx.c0 + 203.0) * pa**2
    else:
        k0 = 4 * ctx.ell
        h1, h2 = ctx.h1(k0), ctx.h2(k0)
        c = (8.0 * (ctx.ell + 1) * ctx.c0 * sum(h1**i for i in range(ctx.ell + 2))
             + 103.0 * sum(h2**i for i in range(ctx.ell + 2))) * pa**2
    return c * ctx.delta_bar**2 * float(k) ** (1 - ctx.alpha)


def ppg_sums_check(i, k, sched, b):
    """Exact enumeration of the two propagation sums versus their bounds."""
    if k < 4 * i:
        raise HypothesisError("need k >= 4*i")
    sp = SpectralProducts(b, sched, k)
    b_norm = float(np.max(sp.lam)) if sp.lam.size else 0.0
    _require_schedule_vs_b(sched, b_norm)
    if b_norm > 1.0 + 1e-12:
        raise HypothesisError("need ||B|| <= 1")
    alpha, c0 = sched.alpha, sched.c0
    bpow = sp.bpow(i + 0.5)

    sum_one = 0.0
    sum_two = 0.0
    if i == 0:
        acc = np.zeros_like(sp.lam)
        for j in range(1, k + 1):
            vals = sp.prod_range_minus(j + 1, k, ()) * bpow
            acc = acc + sp.eta[j] * vals
            sum_two += sp.eta[j] ** 2 * sp.norm(vals) ** 2
        sum_one = sp.norm(acc) ** 2
    else:
        for J in index_tuples(2, k, i):
            w = float(np.prod([sp.eta[j] ** 2 for j in J]))
            j_i = J[-1]
            acc = np.zeros_like(sp.lam)
            inner_sq = 0.0
            for j_next in range(1, j_i):
                vals = sp.prod_range_minus(j_next + 1, k, J) * bpow
                acc = acc + sp.eta[j_next] * vals
                inner_sq += sp.eta[j_next] ** 2 * sp.norm(vals) ** 2
            sum_one += w * sp.norm(acc) ** 2
            sum_two += w * inner_sq

    kred = float(k) ** (-2.0 * (1 - alpha)) * kpow_reduced(k, 2 * alpha)
    bound_one = 2.0 * (
        2.0 ** (2 * alpha - 1) / np.e * (2 * i + 1) * c0
        * ((2.0 / np.e) ** 2 * (2 * i + 1) ** 2 * phi(2 * alpha) * kred) ** i
        + 25.0 * c0 ** max(i, 1)
        * (2.0 ** (2 * alpha - 1) / np.e * (i + 2) ** 2 * float(k) ** (-alpha)) ** i
    ) * phi(alpha) ** 2 * float(k) ** (1 - alpha)
    bound_two = (
        np.e * c0 / (2.0 * (2 * i + 1))
        * (4.0 / np.e**2 * (2 * i + 1) ** 2 * phi(2 * alpha) * kred) ** (i + 1)
        + 3.0 * phi(alpha)
        * (2.0 ** (2 * alpha - 1) / np.e * c0 * (i + 1) ** 2 * float(k) ** (-alpha)) ** (i + 1)
    ) * float(k) ** (1 - alpha)

    ok = (sum_one <= bound_one * (1 + SLACK_RTOL)) and (sum_two <= bound_two * (1 + SLACK_RTOL))
    return {"I": (sum_one, bound_one), "II": (sum_two, bound_two), "ok": ok}


# ---------------------------------------------------------------------------
# Constant-stepsize rate bound


def condition41_check(ctx, epsilon):
    """Smallness condition on ``c0`` for the constant-stepsize bound."""
    if not (0.5 < epsilon < 1.0):
        raise HypothesisError("epsilon must lie in (1/2, 1)")
    lhs = 2.0 * (1.0 + phi(2 * epsilon)) * ctx.n * ctx.c0 ** (2.0 - 2.0 * epsilon)
    return lhs, lhs <= 1.0


def rate_bound_al0(ctx, k):
    """Explicit-constant mean-squared-error bound for constant stepsize."""
    if ctx.alpha != 0.0:
        raise HypothesisError("this bound requires alpha = 0")
    if ctx.nu <= 0.5:
        raise HypothesisError("nu must exceed 1/2")
    nu, c0, n = ctx.nu, ctx.c0, ctx.n
    c_star = (2.0 * (2 * nu / (np.e * c0)) ** (2 * nu)
              + 6.0 * n * c0 * (2 * (2 * nu + 1) / (np.e * c0)) ** (2 * nu + 1))
    c_star2 = 3.0 + 6.0 * n * c0
    return c_star * float(k) ** (-2 * nu) * ctx.w_norm**2 + c_star2 * ctx.delta_bar**2 * float(k)


# ---------------------------------------------------------------------------
# Structural-hypothesis obstruction witness


def assumption3_violation_witness(a, entry_tol=1e-8):
    """Explicit witness that the refined decomposition's key identity fails
    for a matrix whose rows are not pairwise orthogonal.

    Returns ``None`` for matrices in diagonal-times-orthonormal form;
    otherwise ``(j, e, lhs, rhs)`` with ``rhs == 0`` and ``lhs > 0``.
    """
    a = np.asarray(a, dtype=float)
    if rows_pairwise_orthogonal(a):
        return None
    u, sigma, vt = np.linalg.svd(a, full_matrices=False)
    rank = int(np.sum(sigma > 1e-12 * max(sigma[0], 1e-300)))
    for j in range(rank):
        heavy = np.flatnonzero(np.abs(u[:, j]) > entry_tol)
        if heavy.size < 2:
            continue
        for jp in range(rank):
            if jp == j:
                continue
            e = vt[jp]
            ae = a @ e
            if np.max(np.abs(ae[heavy])) <= 1e-12 * max(sigma[0], 1e-300):
                continue
            lhs = float(np.sum((u[:, j] * ae) ** 2))
            rhs = float((sigma[j] * (vt[j] @ e)) ** 2)
            if lhs > 0:
                return j, e, lhs, rhs
    return None


# ---------------------------------------------------------------------------
# Audit drivers (randomized suites shared by the CLI and the test suite)


def random_row_orthogonal_matrix(rng, n, m=None, sigma_range=(0.3, 1.0)):
    """Random matrix in diagonal-times-orthonormal form with ``||B|| <= 1``."""
    m = n if m is None else m
    r = min(n, m)
    sigma = rng.uniform(*sigma_range, size=r)
    q, _ = np.linalg.qr(rng.standard_normal((m, m)))
    smat = np.zeros((n, m))
    smat[:r, :r] = np.diag(sigma)
    return smat @ q.T


def random_admissible_schedule(rng, a, alphas=(0.0, 0.2, 0.4, 0.5, 0.7)):
    """Random stepsize schedule satisfying every admissibility constraint."""
    from .solvers import StepSchedule
    from .testproblems import admissible_c0

    alpha = float(rng.choice(alphas))
    c0_max, _ = admissible_c0(a, alpha)
    return StepSchedule(c0=c0_max * rng.uniform(0.3, 1.0), alpha=alpha)


def run_lemma_suite(seed=0, kernel_configs=1000, max_k=12):
    """All lemma-level audits; returns one record per checked inequality."""
    rng = np.random.default_rng(seed)
    records = []

    for s in (-2.0, -1.0, -0.5, 0.0, 0.3, 0.5, 0.8, 1.0, 1.5, 2.0):
        for k in (1, 3, 10, 100, 1000, 10000):
            lhs, rhs, ok = partial_sum_bound_check(s, k)
            records.append({"check": "partial_sum", "s": s, "k": k,
                            "lhs": lhs, "rhs": rhs, "ok": bool(ok)})

    for k in range(2, max_k + 1):
        for i in range(0, 5):
            if i + 1 > k:
                continue
            lhs, mid, right, ok = reindex_identity_check(k, i)
            records.append({"check": "reindex_identity", "k": k, "i": i,
                            "lhs": lhs, "rhs": mid, "ok": bool(ok and lhs == right)})

    for t in range(kernel_configs):
        n = int(rng.integers(3, 7))
        a = random_row_orthogonal_matrix(rng, n)
        b = a.T @ a / n
        sched = random_admissible_schedule(rng, a)
        k = int(rng.integers(2, max_k + 1))
        k_prime = int(rng.integers(1, k + 1))
        ell = int(rng.integers(0, k + 1 - k_prime))
        members = list(range(k_prime, k + 1))
        rng.shuffle(members)
        j_ell = tuple(sorted(members[:ell], reverse=True))
        s = float(rng.uniform(0.05, 3.0))
        lhs, rhs, ok = kernel_bound_check(b, sched, k_prime, k, ell, s, j_ell)
        records.append({"check": "kernel_bound", "trial": t, "k": k,
                        "k_prime": k_prime, "ell": ell, "s": s,
                        "lhs": lhs, "rhs": rhs, "ok": bool(ok)})

    for k in range(1, max_k + 1):
        for i in range(1, min(4, k) + 1):
            for alpha in (0.0, 0.25, 0.5, 0.75, 0.9):
                lhs, rhs, ok = indexsum_bound_check(k, i, alpha)
                records.append({"check": "indexsum_bound", "k": k, "i": i,
                                "alpha": alpha, "lhs": lhs, "rhs": rhs,
                                "ok": bool(ok)})
    for k in range(2, max_k + 1):
        for j in range(0, k):
            for i in range(1, min(4, k - j) + 1):
                lhs, rhs, ok = count_bound_check(k, j, i)
                records.append({"check": "count_bound", "k": k, "j": j, "i": i,
                                "lhs": float(lhs), "rhs": rhs, "ok": bool(ok)})

    for i in range(0, 3):
        for k in range(max(4 * i, 2), max_k + 1):
            n = int(rng.integers(3, 7))
            a = random_row_orthogonal_matrix(rng, n)
            b = a.T @ a / n
            sched = random_admissible_schedule(rng, a)
            rep = ppg_sums_check(i, k, sched, b)
            records.append({"check": "ppg_sums", "i": i, "k": k,
                            "lhs": rep["I"][0], "rhs": rep["I"][1],
                            "lhs2": rep["II"][0], "rhs2": rep["II"][1],
                            "ok": bool(rep["ok"])})
    return records


def _random_decomposition_case(rng, max_k=12):
    n = int(rng.integers(3, 7))
    a = random_row_orthogonal_matrix(rng, n)
    sched = random_admissible_schedule(rng, a)
    ell = int(rng.integers(0, 3))
    k = int(rng.integers(max(2, ell + 1), max_k + 1))
    eps = float(rng.choice([0.0, 1e-2]))
    x_dag = rng.standard_normal(n)
    x1 = rng.standard_normal(n)
    y_dag = a @ x_dag
    if eps > 0:
        xi = eps * np.max(np.abs(y_dag)) * rng.standard_normal(n)
    else:
        xi = np.zeros(n)
    return a, x1, x_dag, xi, sched, k, ell, eps


def run_decomposition_audit(seed=0, count=500, max_k=12):
    """Randomized audit of the layered error decomposition: the exact mean
    squared error versus the enumerated right-hand side."""
    from .instances import make_instance
    from .momentoracle import run_moments

    rng = np.random.default_rng(seed)
    records = []
    for t in range(count):
        a, x1, x_dag, xi, sched, k, ell, eps = _random_decomposition_case(rng, max_k)
        inst = make_instance(a, x_dag, 0.0, 0.0, 0, x1=x1)
        if eps > 0:
            from .instances import InverseInstance
            inst = InverseInstance(
                A=a, x1=x1, x_dag=x_dag, nu=0.0, y_dag=inst.y_dag,
                y_delta=inst.y_dag + xi, xi=xi,
                delta=float(np.linalg.norm(xi)), eps=eps)
        states = run_moments(x1, x_dag, a, xi, sched, k)
        rep = decomposition_terms(inst, sched, k, ell, states)
        ok = rep.slack >= -SLACK_RTOL * rep.rhs_total
        records.append({"check": "decomposition", "trial": t, "k": k,
                        "ell": ell, "eps": eps, "n": inst.n,
                        "lhs": rep.lhs_exact, "rhs": rep.rhs_total,
                        "slack": rep.slack, "ok": bool(ok)})
        if eps == 0.0:
            rep_c = decomposition_terms(inst, sched, k, ell, states,
                                        exact_corollary=True)
            ok_c = rep_c.slack >= -SLACK_RTOL * rep_c.rhs_total
            records.append({"check": "decomposition_exact", "trial": t, "k": k,
                            "ell": ell, "eps": eps, "n": inst.n,
                            "lhs": rep_c.lhs_exact, "rhs": rep_c.rhs_total,
                            "slack": rep_c.slack, "ok": bool(ok_c)})
    return records


def run_rate_audit(seed=0, n=6, nus=(0.75, 1.0, 2.0), max_k=500, eps_levels=(0.0, 1e-2)):
    """Constant-stepsize rate-bound audit against the exact moment oracle."""
    from .instances import make_instance, synthesize_from_source
    from .momentoracle import run_moments
    from .solvers import StepSchedule

    rng = np.random.default_rng(seed)
    a = random_row_orthogonal_matrix(rng, n)
    c0 = 0.99 / (8.0 * n) ** 2  # smallness condition at epsilon = 0.75
    ctx0 = BoundContext(nu=1.0, ell=0, alpha=0.0, n=n, c0=c0, w_norm=1.0, delta_bar=0.0)
    lhs41, ok41 = condition41_check(ctx0, 0.75)
    records = [{"check": "condition_smallness", "lhs": lhs41, "rhs": 1.0,
                "ok": bool(ok41)}]
    sched = StepSchedule(c0=c0, alpha=0.0)
    x1 = np.zeros(n)
    for nu in nus:
        w = rng.standard_normal(n)
        x_dag = synthesize_from_source(a, x1, nu, w)
        w_norm = float(np.linalg.norm(w))
        for eps in eps_levels:
            inst = make_instance(a, x_dag, nu, eps, seed=int(rng.integers(1 << 30)),
                                 x1=x1, w_norm=w_norm)
            ctx = BoundContext(nu=nu, ell=0, alpha=0.0, n=n, c0=c0,
                               w_norm=w_norm, delta_bar=inst.delta_bar)
            states = run_moments(x1, x_dag, a, inst.xi, sched, max_k)
            worst = math.inf
            ok = True
            for st in states:
                lhs = float(np.trace(st.M))
                rhs = rate_bound_al0(ctx, st.k)
                slack = rhs - lhs
                worst = min(worst, slack / rhs)
                if lhs > rhs * (1 + SLACK_RTOL):
                    ok = False
            records.append({"check": "rate_bound", "nu": nu, "eps": eps,
                            "max_k": max_k, "min_rel_slack": worst,
                            "ok": bool(ok)})
    return records


def run_witness_audit(seed=0, count=100):
    """Obstruction-witness audit: random general matrices must produce a
    witness, transformed matrices must not."""
    rng = np.random.default_rng(seed)
    records = []
    for t in range(count):
        n = int(rng.integers(3, 9))
        m = int(rng.integers(3, 9))
        a = rng.standard_normal((n, m))
        wit = assumption3_violation_witness(a)
        ok = wit is not None and wit[2] > 0 and wit[3] <= 1e-20
        records.append({"check": "witness_general", "trial": t,
                        "lhs": None if wit is None else wit[2],
                        "rhs": None if wit is None else wit[3], "ok": bool(ok)})
        _, sigma, vt = np.linalg.svd(a, full_matrices=False)
        wit_t = assumption3_violation_witness(np.diag(sigma) @ vt)
        records.append({"check": "witness_orthogonal", "trial": t,
                        "ok": bool(wit_t is None)})
    return records
