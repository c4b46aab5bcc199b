"""Command-line entry point.

Subcommands: ``gen`` (emit a test-problem matrix), ``run`` (table-style
comparison from a JSON config), ``traj`` (single-cell trajectories),
``verify-bounds`` (inequality audits), ``precond`` (row-orthogonalization
study). Failures exit nonzero with a machine-readable JSON error on stderr;
``verify-bounds`` exits nonzero iff any audited inequality fails.
"""

import argparse
import dataclasses
import json
import os
import platform
import sys
from pathlib import Path

import numpy as np

from . import __version__, kernels
from . import harness, theorybounds
from .solvers import StepSchedule, landweber_run, sgd_batch, epoch_checkpoints
from .numerics import spectral_norm
from .testproblems import PROBLEM_NAMES, make_problem

CSV_FLOAT = "%.6g"
JSON_DIGITS = 17

SUMMARY_COLUMNS = ("nu", "eps", "c0", "alpha", "e_sgd", "k_sgd", "e_lm",
                   "k_lm", "stderr", "slope")


class CliError(Exception):
    pass


def _round17(obj):
    """Recursively re-express floats at 17 significant digits so JSON output
    is bit-stable across runs."""
    if isinstance(obj, float):
        return float(f"{obj:.{JSON_DIGITS - 1}e}")
    if isinstance(obj, dict):
        return {k: _round17(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round17(v) for v in obj]
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return _round17(dataclasses.asdict(obj))
    if isinstance(obj, np.ndarray):
        return _round17(obj.tolist())
    if isinstance(obj, (np.floating,)):
        return _round17(float(obj))
    if isinstance(obj, (np.integer,)):
        return int(obj)
    return obj


def _manifest(cfg_dict, seed):
    return {
        "config": cfg_dict,
        "seed": seed,
        "environment": {
            "package_version": __version__,
            "python": platform.python_version(),
            "numpy": np.__version__,
            "kernel_backend": kernels.backend(),
            "platform": platform.platform(),
        },
    }


def _write_json(path, payload):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        json.dump(_round17(payload), fh, indent=2, sort_keys=True)
        fh.write("\n")


def export_report(results, out_dir, formats=("csv", "json"), stem="summaries"):
    """Write run summaries as a CSV table and/or JSON, bit-stable for
    identical inputs. Returns the list of files written."""
    if not results:
        raise CliError("no results to export")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    if "csv" in formats:
        path = out_dir / f"{stem}.csv"
        with open(path, "w") as fh:
            fh.write(",".join(SUMMARY_COLUMNS) + "\n")
            for s in results:
                row = []
                for col in SUMMARY_COLUMNS:
                    val = getattr(s, col)
                    row.append(CSV_FLOAT % val if isinstance(val, float) else str(val))
                fh.write(",".join(row) + "\n")
        written.append(str(path))
    if "json" in formats:
        path = out_dir / f"{stem}.json"
        _write_json(path, [s.as_dict() for s in results])
        written.append(str(path))
    return written


def _load_config(path, args):
    with open(path) as fh:
        raw = json.load(fh)
    cfg = harness.config_from_dict(raw)
    if args.seed is not None:
        cfg = dataclasses.replace(cfg, base_seed=args.seed)
    if getattr(args, "full", False):
        print("warning: --full runs the full-size protocol; expect hours",
              file=sys.stderr)
        cfg = cfg.full_scale()
    if getattr(args, "override_admissibility", False):
        cfg = dataclasses.replace(cfg, schedules=tuple(
            dataclasses.replace(s, override=True) for s in cfg.schedules))
    return cfg


def _cmd_gen(args):
    prob = make_problem(args.problem, args.n)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    stem = f"{prob.name}_{prob.n}"
    np.savetxt(out / f"{stem}_matrix.csv", prob.A, delimiter=",", fmt="%.17e")
    np.savetxt(out / f"{stem}_solution.csv",
               np.column_stack([prob.grid, prob.x_e]), delimiter=",",
               fmt="%.17e", header="node,x_e", comments="")
    print(f"wrote {stem}_matrix.csv and {stem}_solution.csv to {out}")
    return 0


def _cmd_run(args):
    cfg = _load_config(args.config, args)
    summaries = harness.run_comparison(cfg)
    files = export_report(summaries, args.out)
    _write_json(Path(args.out) / "manifest.json",
                _manifest(harness.config_to_dict(cfg), cfg.base_seed))
    print("\n".join(files))
    return 0


def _cmd_traj(args):
    cfg = _load_config(args.config, args)
    prob = make_problem(cfg.problem, cfg.n)
    nu, eps = cfg.nus[0], cfg.eps_list[0]
    spec = cfg.schedules[0]
    inst = harness._cell_instance(prob, nu, eps, cfg.base_seed + harness.NOISE_SEED_STRIDE,
                                  cfg.preconditioned)
    sched = StepSchedule(harness.resolve_c0(spec.c0_expr, inst.A), spec.alpha)
    cps = epoch_checkpoints(inst.n, cfg.max_epochs, cfg.thin_factor)
    seeds = [cfg.base_seed + r for r in range(cfg.runs)]
    sq, _ = sgd_batch(inst.A, inst.y_delta, inst.x1, inst.x_dag, sched, cps, seeds,
                      override_admissibility=spec.override)
    mean, se = harness.mc_mean(sq)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    np.savetxt(out / "sgd_mean.csv",
               np.column_stack([cps / inst.n, mean, se]), delimiter=",",
               fmt="%.10g", header="epoch,mean_sq_error,stderr", comments="")
    eta = inst.n / spectral_norm(inst.A) ** 2
    traj = landweber_run(inst, eta, cfg.landweber_max_iters)
    traj.to_csv(out / "landweber.csv")
    _write_json(out / "manifest.json",
                _manifest(harness.config_to_dict(cfg), cfg.base_seed))
    print(f"wrote sgd_mean.csv and landweber.csv to {out}")
    return 0


def _cmd_verify_bounds(args):
    records = []
    suites = ("lemmas", "decomposition", "rates", "witness") \
        if args.suite == "all" else (args.suite,)
    seed = args.seed if args.seed is not None else 0
    if "lemmas" in suites:
        records += theorybounds.run_lemma_suite(
            seed=seed, kernel_configs=args.kernel_configs, max_k=args.max_k)
    if "decomposition" in suites:
        records += theorybounds.run_decomposition_audit(
            seed=seed, count=args.decomposition_count, max_k=args.max_k)
    if "rates" in suites:
        records += theorybounds.run_rate_audit(seed=seed)
    if "witness" in suites:
        records += theorybounds.run_witness_audit(seed=seed)
    failures = [r for r in records if not r["ok"]]
    report = {"suites": list(suites), "checked": len(records),
              "failures": len(failures),
              "failing_records": failures[:50], "all_ok": not failures}
    if args.out:
        _write_json(Path(args.out) / "bounds_report.json", report)
    print(f"checked {len(records)} inequalities, {len(failures)} failures")
    return 0 if not failures else 2


def _cmd_precond(args):
    cfg = _load_config(args.config, args)
    study = harness.preconditioning_study(cfg)
    payload = {
        "landweber_max_abs_diff": study["landweber_max_abs_diff"],
        "pairs": [
            {"plain": p["plain"].as_dict(),
             "preconditioned": p["preconditioned"].as_dict(),
             "rel_diff_e_sgd": p["rel_diff_e_sgd"]}
            for p in study["pairs"]
        ],
    }
    _write_json(Path(args.out) / "precond_report.json", payload)
    _write_json(Path(args.out) / "manifest.json",
                _manifest(harness.config_to_dict(cfg), cfg.base_seed))
    print(f"wrote precond_report.json to {args.out}")
    return 0


def build_parser():
    p = argparse.ArgumentParser(prog="sgdreg")
    p.add_argument("--threads", type=int, default=None,
                   help="BLAS thread count (or set SGDREG_THREADS)")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="emit a test-problem matrix as CSV")
    g.add_argument("--problem", required=True, choices=PROBLEM_NAMES)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--out", default=".")
    g.set_defaults(func=_cmd_gen)

    for name, fn, helptext in (
        ("run", _cmd_run, "run a table-style comparison from a JSON config"),
        ("traj", _cmd_traj, "record single-cell trajectories"),
        ("precond", _cmd_precond, "paired row-orthogonalization study"),
    ):
        q = sub.add_parser(name, help=helptext)
        q.add_argument("--config", required=True)
        q.add_argument("--out", default=".")
        q.add_argument("--seed", type=int, default=None)
        q.add_argument("--full", action="store_true",
                       help="full-size protocol (n=1000, 100 runs); slow")
        q.add_argument("--override-admissibility", action="store_true")
        q.set_defaults(func=fn)

    v = sub.add_parser("verify-bounds", help="audit the proved inequalities")
    v.add_argument("--suite", default="all",
                   choices=("all", "lemmas", "decomposition", "rates", "witness"))
    v.add_argument("--max-k", type=int, default=12)
    v.add_argument("--kernel-configs", type=int, default=1000)
    v.add_argument("--decomposition-count", type=int, default=100)
    v.add_argument("--seed", type=int, default=None)
    v.add_argument("--out", default=None)
    v.set_defaults(func=_cmd_verify_bounds)
    return p


def _apply_threads(args):
    threads = args.threads
    if threads is None and os.environ.get("SGDREG_THREADS"):
        threads = int(os.environ["SGDREG_THREADS"])
    if threads is not None:
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
            os.environ[var] = str(threads)


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    _apply_threads(args)
    try:
        return args.func(args)
    except BrokenPipeError:
        return 1
    except Exception as exc:  # deliberate: uniform machine-readable failure
        payload = {"error": type(exc).__name__, "message": str(exc)}
        print(json.dumps(payload), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
