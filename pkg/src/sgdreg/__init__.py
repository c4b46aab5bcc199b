"""Iterative regularization of linear inverse problems by SGD and Landweber
iteration, plus a numerical verification engine for the underlying error
decomposition and convergence-rate bounds."""

from .numerics import spectral_norm, svd, sym_power
from .testproblems import TestProblem, admissible_c0, make_problem
from .instances import (
    InverseInstance,
    add_noise,
    make_true_solution,
    precondition,
    source_element,
    synthesize_from_source,
)
from .solvers import (
    StepSchedule,
    Trajectory,
    a_priori_stop,
    landweber_run,
    oracle_stop,
    sgd_batch,
    sgd_run,
)
from .momentoracle import MomentState, bias_sq, init_moments, mse, step_moments, variance
from .theorybounds import (
    BoundContext,
    DecompositionReport,
    apx_bound,
    assumption3_violation_witness,
    decomposition_terms,
    phi,
    ppg_bound,
    rate_bound_al0,
)
from .harness import (
    ExperimentConfig,
    RunSummary,
    ScheduleSpec,
    fit_rate,
    preconditioning_study,
    rate_vs_noise,
    resolve_c0,
    run_comparison,
)

__all__ = [
    "svd",
    "sym_power",
    "spectral_norm",
    "TestProblem",
    "make_problem",
    "admissible_c0",
    "InverseInstance",
    "make_true_solution",
    "synthesize_from_source",
    "source_element",
    "add_noise",
    "precondition",
    "StepSchedule",
    "Trajectory",
    "sgd_run",
    "landweber_run",
    "oracle_stop",
    "a_priori_stop",
    "MomentState",
    "init_moments",
    "step_moments",
    "mse",
    "bias_sq",
    "variance",
    "sgd_batch",
    "BoundContext",
    "DecompositionReport",
    "decomposition_terms",
    "apx_bound",
    "ppg_bound",
    "rate_bound_al0",
    "assumption3_violation_witness",
    "phi",
    "ExperimentConfig",
    "RunSummary",
    "ScheduleSpec",
    "resolve_c0",
    "run_comparison",
    "fit_rate",
    "rate_vs_noise",
    "preconditioning_study",
]

__version__ = "0.1.0"
