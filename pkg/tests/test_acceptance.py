"""End-to-end acceptance criteria.

Each test checks one headline claim of the package at its stated tolerance
and prints a single PASS/FAIL line (visible even under output capture).
Tolerances and run parameters are frozen; the suite is deterministic.
"""

import numpy as np
import pytest

from sgdreg.harness import (
    ExperimentConfig,
    ScheduleSpec,
    fit_rate,
    preconditioning_study,
    rate_vs_noise,
    resolve_c0,
    run_comparison,
)
from sgdreg.instances import make_instance, make_true_solution
from sgdreg.momentoracle import enumerate_mse, mse, run_moments
from sgdreg.solvers import StepSchedule, epoch_checkpoints, sgd_batch
from sgdreg.testproblems import admissible_c0, make_problem
from sgdreg.theorybounds import (
    run_decomposition_audit,
    run_lemma_suite,
    run_rate_audit,
    run_witness_audit,
)


def report(capsys, num, title, ok, detail):
    with capsys.disabled():
        print(f"\n[criterion {num:2d}] {title}: "
              f"{'PASS' if ok else 'FAIL'} ({detail})")
    assert ok, f"criterion {num} failed: {detail}"


def audit_failures(records):
    return [r for r in records if not r["ok"]]


def test_01_moment_oracle_matches_path_enumeration(capsys):
    """Exact moment recursion equals brute-force expectation over all
    index paths: 20 random tiny instances, relative error <= 1e-9."""
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(20):
        n = 3
        m = int(rng.integers(2, 5))
        k = int(rng.integers(2, 11))
        a = rng.standard_normal((n, m))
        x1 = rng.standard_normal(m)
        x_dag = rng.standard_normal(m)
        xi = 0.1 * rng.standard_normal(n)
        c0 = 0.5 * admissible_c0(a, 0.0)[0]
        sched = StepSchedule(c0, float(rng.choice([0.0, 0.3, 0.6])))
        state = run_moments(x1, x_dag, a, xi, sched, k, checkpoints=[k + 1])[0]
        exact = enumerate_mse(x1, x_dag, a, xi, sched, k)
        worst = max(worst, abs(mse(state) - exact) / abs(exact))
    report(capsys, 1, "moment oracle vs path enumeration",
           worst <= 1e-9, f"20 instances, max rel err {worst:.2e}")


def test_02_error_decomposition_majorizes_exact_mse(capsys):
    """Layered decomposition upper-bounds the exact mean squared error on
    500 random row-orthogonal configurations with nonnegative slack."""
    records = run_decomposition_audit(seed=0, count=500, max_k=12)
    fails = audit_failures(records)
    report(capsys, 2, "layered error decomposition audit", not fails,
           f"{len(records)} inequalities, {len(fails)} violations")


def test_03_bound_lemma_suite(capsys):
    """Partial-sum, reindexing, kernel, index-count and per-layer sum
    inequalities: zero violations across the full audit grid."""
    records = run_lemma_suite(seed=0, kernel_configs=1000, max_k=12)
    fails = audit_failures(records)
    by_check = {}
    for r in records:
        by_check[r["check"]] = by_check.get(r["check"], 0) + 1
    report(capsys, 3, "bound lemma suite", not fails,
           f"{len(records)} checks in {len(by_check)} families, "
           f"{len(fails)} violations")


def test_04_constant_step_rate_bound(capsys):
    """Closed-form constant-stepsize error bound dominates the exact MSE
    for nu in {0.75, 1, 2}, exact and noisy data, all k <= 500."""
    records = run_rate_audit(seed=0, n=6, nus=(0.75, 1.0, 2.0), max_k=500,
                             eps_levels=(0.0, 1e-2))
    fails = audit_failures(records)
    slacks = [r["min_rel_slack"] for r in records if "min_rel_slack" in r]
    report(capsys, 4, "constant-stepsize rate bound", not fails,
           f"{len(records)} records, min relative slack {min(slacks):.3f}")


def test_05_saturation_signature(capsys):
    """Small initial stepsize escapes saturation: gravity n=200, nu=2,
    exact data. Log-log MSE slope over epochs [100, 1000] is steep for
    c0 = c/(50n) and flat (about -1) for c0 = c."""
    prob = make_problem("gravity", 200)
    x_dag = make_true_solution(prob.A, prob.x_e, 2.0)
    inst = make_instance(prob.A, x_dag, 2.0, 0.0, 0)
    cps = epoch_checkpoints(200, 1000, thin_factor=1.05)
    epochs = cps / 200.0
    win = (epochs >= 100) & (epochs <= 1000)
    slopes = {}
    for expr in ("c/(50n)", "c"):
        sched = StepSchedule(resolve_c0(expr, inst.A), 0.0)
        sq, _ = sgd_batch(inst.A, inst.y_delta, inst.x1, inst.x_dag, sched,
                          cps, seeds=range(100, 120),
                          override_admissibility=True)
        slopes[expr], _, _ = fit_rate(epochs[win], sq.mean(axis=0)[win])
    small, large = slopes["c/(50n)"], slopes["c"]
    ok = small <= -1.5 and large >= -1.3 and (large - small) >= 0.5
    report(capsys, 5, "saturation signature", ok,
           f"slope c/(50n) = {small:.2f} (<= -1.5), "
           f"slope c = {large:.2f} (>= -1.3), gap {large - small:.2f}")


def test_06_noise_rate_exponent(capsys):
    """Optimal squared error scales like delta^p with p in [1.0, 1.6]
    (theory: 4/3 at nu = 1): gravity n=200, four noise levels, 50 runs."""
    cfg = ExperimentConfig(problem="gravity", n=200, nus=(1.0,),
                           eps_list=(1e-3, 5e-3, 1e-2, 5e-2),
                           schedules=(ScheduleSpec("c/n"),), runs=50,
                           max_epochs=1500, base_seed=11,
                           landweber_max_iters=2000, thin_factor=1.02)
    out = rate_vs_noise(cfg)
    p = out["exponent"]
    report(capsys, 6, "noise-rate exponent", 1.0 <= p <= 1.6,
           f"fitted exponent {p:.3f} in [1.0, 1.6], theory 4/3")


def test_07_full_scale_benchmark_cell(capsys):
    """Full-scale phillips cell (n=1000, 100 runs, nu=1, eps=5e-2,
    c0=c/n): oracle-stopped errors of both methods land in the reference
    bands and the full-gradient stopping index is in range."""
    cfg = ExperimentConfig(problem="phillips", n=1000, nus=(1.0,),
                           eps_list=(5e-2,), schedules=(ScheduleSpec("c/n"),),
                           runs=100, max_epochs=100, base_seed=8,
                           landweber_max_iters=500)
    s = run_comparison(cfg)[0]
    ok_sgd = 0.75 * 3.52e-2 <= s.e_sgd <= 1.25 * 3.52e-2
    ok_lm = 0.85 * 3.16e-2 <= s.e_lm <= 1.15 * 3.16e-2
    ok_k = 5 <= s.k_lm <= 11
    report(capsys, 7, "full-scale benchmark cell",
           ok_sgd and ok_lm and ok_k,
           f"e_sgd={s.e_sgd:.3e} (3.52e-2 +-25%), "
           f"e_lm={s.e_lm:.3e} (3.16e-2 +-15%), k_lm={s.k_lm:g} (8 +-3)")


def test_08_preconditioning_invariance_and_comparability(capsys):
    """Row-orthogonalizing rotation leaves the full-gradient trajectory
    unchanged to 1e-10 and moves the stochastic method's oracle error by
    at most 35%: phillips n=200, nu=1, eps=1e-2."""
    cfg = ExperimentConfig(problem="phillips", n=200, nus=(1.0,),
                           eps_list=(1e-2,), schedules=(ScheduleSpec("c/n"),),
                           runs=50, max_epochs=2000, base_seed=8,
                           landweber_max_iters=2000)
    study = preconditioning_study(cfg)
    lm_diff = study["landweber_max_abs_diff"]
    rel = study["pairs"][0]["rel_diff_e_sgd"]
    ok = lm_diff <= 1e-10 and rel <= 0.35
    report(capsys, 8, "preconditioning invariance", ok,
           f"full-gradient max diff {lm_diff:.1e} (<= 1e-10), "
           f"paired e_sgd rel diff {rel:.2f} (<= 0.35)")


def test_09_row_orthogonality_witness(capsys):
    """Every random general matrix yields a concrete obstruction witness;
    every row-orthogonalized matrix yields none (100 matrices each)."""
    records = run_witness_audit(seed=0, count=100)
    fails = audit_failures(records)
    report(capsys, 9, "row-orthogonality witness", not fails,
           f"{len(records)} matrices, {len(fails)} wrong verdicts")


def test_10_monte_carlo_oracle_consistency(capsys):
    """Monte Carlo mean over 20000 runs agrees with the exact moment
    oracle within 5 standard errors at 10 checkpoints (n = m = 10)."""
    rng = np.random.default_rng(1234)
    n = m = 10
    a = rng.standard_normal((n, m))
    x_dag = rng.standard_normal(m)
    x1 = np.zeros(m)
    xi = 0.05 * rng.standard_normal(n)
    y = a @ x_dag + xi
    sched = StepSchedule(0.5 * admissible_c0(a, 0.0)[0], 0.0)
    cps = np.arange(1, 11) * 100
    sq, _ = sgd_batch(a, y, x1, x_dag, sched, cps, seeds=range(20000))
    states = run_moments(x1, x_dag, a, xi, sched, int(cps[-1]),
                         checkpoints=[c + 1 for c in cps])
    mean = sq.mean(axis=0)
    se = sq.std(axis=0, ddof=1) / np.sqrt(sq.shape[0])
    z = np.array([abs(mc - mse(st)) / s
                  for st, mc, s in zip(states, mean, se)])
    report(capsys, 10, "Monte Carlo vs moment oracle", float(z.max()) <= 5.0,
           f"10 checkpoints, max |z| = {z.max():.2f} (<= 5)")
