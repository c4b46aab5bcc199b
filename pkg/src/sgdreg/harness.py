"""Monte Carlo experiment orchestration.

Builds table-style comparisons between the stochastic row-action method and
the deterministic full-gradient method, fits empirical convergence rates,
and runs the paired row-orthogonalization study. Everything is deterministic
given the config (including its base seed): runs inside a cell are advanced
in one vectorized batch and all reductions are fixed-order.
"""

import math
import re
from dataclasses import dataclass, field, replace

import numpy as np

from .instances import make_instance, make_true_solution, precondition
from .numerics import spectral_norm
from .solvers import (
    StepSchedule,
    epoch_checkpoints,
    landweber_run,
    oracle_stop,
    sgd_batch,
)
from .testproblems import make_problem, row_norm_constant

DESK_N = 200
DESK_RUNS = 50
DESK_MAX_EPOCHS = 10_000
FULL_N = 1000
FULL_RUNS = 100
DEFAULT_LANDWEBER_MAX_ITERS = 100_000
NOISE_SEED_STRIDE = 7919


class ConfigError(ValueError):
    pass


_C0_PATTERN = re.compile(
    r"""^\s*
        (?P<num>\d+(?:\.\d+)?(?:[eE][+-]?\d+)?)?   # optional leading factor
        \s*\*?\s*c\s*
        (?:/\s*
            (?:
                \(\s*(?P<pnum>\d+(?:\.\d+)?(?:[eE][+-]?\d+)?)?\s*\*?\s*(?P<pn>n)\s*\)
              | (?P<dnum>\d+(?:\.\d+)?(?:[eE][+-]?\d+)?)
              | (?P<dn>n)
            )
        \s*)?
        \s*$""",
    re.VERBOSE,
)


def resolve_c0(expr, a):
    """Resolve a stepsize expression like ``"c"``, ``"2c"``, ``"c/20"``,
    ``"c/n"``, ``"4c/n"`` or ``"c/(30n)"`` against the concrete matrix,
    where ``c = 1/max_i ||a_i||^2`` and ``n`` is the row count.

    A plain positive number is also accepted and used verbatim.
    """
    a = np.asarray(a, dtype=float)
    if not isinstance(expr, str):
        val = float(expr)
        if val <= 0:
            raise ConfigError(f"c0 must be positive, got {val}")
        return val
    m = _C0_PATTERN.match(expr)
    if m is None:
        try:
            val = float(expr)
        except ValueError:
            raise ConfigError(f"unrecognized c0 expression {expr!r}") from None
        if val <= 0:
            raise ConfigError(f"c0 must be positive, got {expr!r}")
        return val
    c = row_norm_constant(a)
    n = a.shape[0]
    val = c * float(m.group("num") or 1.0)
    if m.group("pn") or m.group("dn"):
        val /= n * float(m.group("pnum") or 1.0)
    elif m.group("dnum"):
        val /= float(m.group("dnum"))
    return val


@dataclass(frozen=True)
class ScheduleSpec:
    """Stepsize schedule by expression; ``override`` runs it even when it
    violates the admissibility constraints."""

    c0_expr: str
    alpha: float = 0.0
    override: bool = False


@dataclass(frozen=True)
class ExperimentConfig:
    problem: str
    n: int = DESK_N
    nus: tuple = (1.0,)
    eps_list: tuple = (1e-2,)
    schedules: tuple = (ScheduleSpec("c/n"),)
    runs: int = DESK_RUNS
    max_epochs: int = DESK_MAX_EPOCHS
    base_seed: int = 0
    preconditioned: bool = False
    landweber_max_iters: int = DEFAULT_LANDWEBER_MAX_ITERS
    thin_factor: float | None = None
    label: str = field(default="", compare=False)

    def __post_init__(self):
        if self.runs < 1:
            raise ConfigError("runs must be >= 1")
        if self.max_epochs < 1:
            raise ConfigError("max_epochs must be >= 1")
        if not self.schedules:
            raise ConfigError("at least one schedule is required")
        if any(e < 0 for e in self.eps_list) or any(v < 0 for v in self.nus):
            raise ConfigError("nu and eps values must be nonnegative")

    def full_scale(self):
        """The full-size variant of this config (slow: hours, not minutes)."""
        return replace(self, n=FULL_N, runs=FULL_RUNS)


_CONFIG_KEYS = {
    "problem", "n", "nus", "eps_list", "schedules", "runs", "max_epochs",
    "base_seed", "preconditioned", "landweber_max_iters", "thin_factor", "label",
}


def config_from_dict(d):
    """Build a config from a plain dict; unknown keys are a hard error."""
    unknown = set(d) - _CONFIG_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    if "problem" not in d:
        raise ConfigError("config requires a 'problem' key")
    kw = dict(d)
    if "schedules" in kw:
        specs = []
        for s in kw["schedules"]:
            if isinstance(s, str):
                specs.append(ScheduleSpec(s))
            else:
                extra = set(s) - {"c0", "alpha", "override"}
                if extra:
                    raise ConfigError(f"unknown schedule keys: {sorted(extra)}")
                specs.append(ScheduleSpec(s["c0"], float(s.get("alpha", 0.0)),
                                          bool(s.get("override", False))))
        kw["schedules"] = tuple(specs)
    for key in ("nus", "eps_list"):
        if key in kw:
            kw[key] = tuple(float(v) for v in kw[key])
    return ExperimentConfig(**kw)


def config_to_dict(cfg):
    return {
        "problem": cfg.problem,
        "n": cfg.n,
        "nus": list(cfg.nus),
        "eps_list": list(cfg.eps_list),
        "schedules": [
            {"c0": s.c0_expr, "alpha": s.alpha, "override": s.override}
            for s in cfg.schedules
        ],
        "runs": cfg.runs,
        "max_epochs": cfg.max_epochs,
        "base_seed": cfg.base_seed,
        "preconditioned": cfg.preconditioned,
        "landweber_max_iters": cfg.landweber_max_iters,
        "thin_factor": cfg.thin_factor,
        "label": cfg.label,
    }


@dataclass(frozen=True)
class RunSummary:
    """One table cell: optimal errors and stopping indices for both methods.

    ``k_sgd`` is in epochs (mean of per-run argmin epochs), ``k_lm`` in
    iterations; ``e_sgd`` is the minimum of the mean squared-error
    trajectory; ``stderr`` is the run-to-run standard error of the per-run
    minima; ``slope`` is the log-log rate fit over the trailing window of
    the mean trajectory (nan when the window is unusable).
    """

    problem: str
    n: int
    nu: float
    eps: float
    c0_expr: str
    c0: float
    alpha: float
    e_sgd: float
    k_sgd: float
    e_lm: float
    k_lm: float
    stderr: float
    slope: float
    delta: float
    variant: str = "plain"

    def as_dict(self):
        return {k: getattr(self, k) for k in (
            "problem", "n", "nu", "eps", "c0_expr", "c0", "alpha", "e_sgd",
            "k_sgd", "e_lm", "k_lm", "stderr", "slope", "delta", "variant")}


def mc_mean(sq):
    """Fixed-order mean and standard error of a (runs, checkpoints) array."""
    sq = np.asarray(sq, dtype=float)
    mean = sq.mean(axis=0)
    if sq.shape[0] > 1:
        se = sq.std(axis=0, ddof=1) / math.sqrt(sq.shape[0])
    else:
        se = np.zeros_like(mean)
    return mean, se


def fit_rate(epochs, values, window=None):
    """Least-squares slope of ``log(values)`` against ``log(epochs)``.

    ``window = (lo, hi)`` restricts to ``lo <= epoch <= hi``; at least 10
    positive checkpoints are required.
    """
    epochs = np.asarray(epochs, dtype=float)
    values = np.asarray(values, dtype=float)
    mask = epochs > 0
    if window is not None:
        mask &= (epochs >= window[0]) & (epochs <= window[1])
    if np.any(values[mask] <= 0):
        raise ConfigError("rate window contains nonpositive values")
    if np.count_nonzero(mask) < 10:
        raise ConfigError("rate window needs at least 10 checkpoints")
    lx, ly = np.log(epochs[mask]), np.log(values[mask])
    slope, intercept = np.polyfit(lx, ly, 1)
    pred = slope * lx + intercept
    ss_res = float(np.sum((ly - pred) ** 2))
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return float(slope), float(intercept), r2


def _cell_instance(prob, nu, eps, noise_seed, preconditioned):
    x_dag = make_true_solution(prob.A, prob.x_e, nu)
    inst = make_instance(prob.A, x_dag, nu, eps, noise_seed,
                         label=f"{prob.name}-nu{nu}-eps{eps}")
    if preconditioned:
        from .instances import InverseInstance

        a_t, y_t = precondition(inst.A, inst.y_delta)
        y_dag_t = a_t @ x_dag
        if eps == 0.0:
            y_t = y_dag_t.copy()
        xi_t = y_t - y_dag_t
        inst = InverseInstance(
            A=a_t, x1=inst.x1, x_dag=x_dag, nu=float(nu), y_dag=y_dag_t,
            y_delta=y_t, xi=xi_t, delta=float(np.linalg.norm(xi_t)),
            eps=float(eps), label=inst.label + "-precond")
    return inst


def _sgd_cell(inst, sched, cfg):
    cps = epoch_checkpoints(inst.n, cfg.max_epochs, cfg.thin_factor)
    seeds = [cfg.base_seed + r for r in range(cfg.runs)]
    sq, _ = sgd_batch(inst.A, inst.y_delta, inst.x1, inst.x_dag, sched, cps, seeds,
                      override_admissibility=True)
    epochs = cps / inst.n
    mean, _ = mc_mean(sq)
    e_sgd = float(mean.min())
    per_run_k = epochs[np.argmin(sq, axis=1)]
    k_sgd = float(per_run_k.mean())
    minima = sq.min(axis=1)
    stderr = float(minima.std(ddof=1) / math.sqrt(len(seeds))) if len(seeds) > 1 else 0.0
    try:
        slope, _, _ = fit_rate(epochs, mean, window=(epochs[-1] / 10.0, epochs[-1]))
    except ConfigError:
        slope = float("nan")
    return epochs, mean, sq, e_sgd, k_sgd, stderr, slope


def _landweber_cell(inst, cfg):
    eta = inst.n / spectral_norm(inst.A) ** 2
    traj = landweber_run(inst, eta, cfg.landweber_max_iters)
    k_lm, e_lm = oracle_stop(traj.iters, traj.sq_error)
    return float(e_lm), float(k_lm)


def run_comparison(cfg, progress=None):
    """All table cells of the config: the cross product of ``nus``,
    ``eps_list`` and ``schedules``. Deterministic given the config."""
    prob = make_problem(cfg.problem, cfg.n)
    out = []
    for nu in cfg.nus:
        for ie, eps in enumerate(cfg.eps_list):
            noise_seed = cfg.base_seed + NOISE_SEED_STRIDE * (ie + 1)
            inst = _cell_instance(prob, nu, eps, noise_seed, cfg.preconditioned)
            e_lm, k_lm = _landweber_cell(inst, cfg)
            for spec in cfg.schedules:
                # c0 expressions resolve against the original matrix so the
                # preconditioned variant runs the same numeric stepsize
                sched = StepSchedule(resolve_c0(spec.c0_expr, prob.A), spec.alpha)
                ok, violated = sched.admissibility(inst.A)
                if not ok and not spec.override:
                    raise ConfigError(
                        f"schedule {spec.c0_expr!r} violates {violated!r}; "
                        "tag it with override to run anyway")
                _, _, _, e_sgd, k_sgd, stderr, slope = _sgd_cell(inst, sched, cfg)
                out.append(RunSummary(
                    problem=cfg.problem, n=cfg.n, nu=float(nu), eps=float(eps),
                    c0_expr=spec.c0_expr, c0=sched.c0, alpha=sched.alpha,
                    e_sgd=e_sgd, k_sgd=k_sgd, e_lm=e_lm, k_lm=k_lm,
                    stderr=stderr, slope=slope, delta=inst.delta,
                    variant="preconditioned" if cfg.preconditioned else "plain"))
                if progress is not None:
                    progress(out[-1])
    return out


def rate_vs_noise(cfg):
    """Fitted exponent of the optimal mean squared error against the noise
    amplitude, over the config's noise levels (at least 4 required).

    Uses the first ``nu`` and the first schedule of the config.
    """
    if len(cfg.eps_list) < 4:
        raise ConfigError("rate_vs_noise needs at least 4 noise levels")
    if any(e <= 0 for e in cfg.eps_list):
        raise ConfigError("noise levels must be positive")
    prob = make_problem(cfg.problem, cfg.n)
    nu = cfg.nus[0]
    spec = cfg.schedules[0]
    deltas, e_stars, cells = [], [], []
    for ie, eps in enumerate(cfg.eps_list):
        noise_seed = cfg.base_seed + NOISE_SEED_STRIDE * (ie + 1)
        inst = _cell_instance(prob, nu, eps, noise_seed, cfg.preconditioned)
        sched = StepSchedule(resolve_c0(spec.c0_expr, prob.A), spec.alpha)
        _, _, _, e_sgd, k_sgd, stderr, _ = _sgd_cell(inst, sched, cfg)
        deltas.append(inst.delta)
        e_stars.append(e_sgd)
        cells.append({"eps": eps, "delta": inst.delta, "e_star": e_sgd,
                      "k_star": k_sgd, "stderr": stderr})
    lx, ly = np.log(deltas), np.log(e_stars)
    exponent, intercept = np.polyfit(lx, ly, 1)
    return {"exponent": float(exponent), "intercept": float(intercept),
            "cells": cells}


def preconditioning_study(cfg):
    """Paired comparison of the stochastic method on ``A`` versus its
    row-orthogonalized transform, with matched per-run index streams, plus
    the exact invariance check for the full-gradient method."""
    plain = run_comparison(replace(cfg, preconditioned=False))
    tilde = run_comparison(replace(cfg, preconditioned=True))
    pairs = []
    lm_max_diff = 0.0
    prob = make_problem(cfg.problem, cfg.n)
    for p, t in zip(plain, tilde):
        rel = abs(p.e_sgd - t.e_sgd) / p.e_sgd if p.e_sgd > 0 else 0.0
        pairs.append({"plain": p, "preconditioned": t, "rel_diff_e_sgd": rel})
    # full-gradient invariance on the first cell
    nu, eps = cfg.nus[0], cfg.eps_list[0]
    noise_seed = cfg.base_seed + NOISE_SEED_STRIDE
    inst = _cell_instance(prob, nu, eps, noise_seed, False)
    inst_t = _cell_instance(prob, nu, eps, noise_seed, True)
    eta = inst.n / spectral_norm(inst.A) ** 2
    iters = min(cfg.landweber_max_iters, 200)
    tr = landweber_run(inst, eta, iters)
    tr_t = landweber_run(inst_t, eta, iters)
    lm_max_diff = float(np.max(np.abs(tr.sq_error - tr_t.sq_error)))
    return {"pairs": pairs, "landweber_max_abs_diff": lm_max_diff}
