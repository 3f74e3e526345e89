"""Bayesian optimization with a self-adjusting weighted-EI exploration weight,
plus a black-box benchmark harness."""

from .acqopt import SearchBudget, SearchSpace, maximize, minimize_lcb
from .acquisition import (
    AcquisitionSpec,
    ConfidenceCoefficient,
    HedgeState,
    beta_t,
    eval_bounds,
    eval_ei,
    eval_pi,
    eval_wei,
    hedge_select,
    hedge_update,
    standard_normal,
)
from .benchmarks import TabularObjective, load_tabular, make_synthetic
from .control import (
    ControllerState,
    SchedulePolicy,
    adjust_alpha,
    attitude_terms,
    compute_ubr,
    gradient_converged,
    record_attitude,
    schedule_alpha,
    smooth_iqm,
)
from .gp import Dataset, GpConfig, PosteriorModel, fit, kernel_matern52, predict
from .harness import ExperimentConfig, TaskSpec, ablation_sweep, iqm, ranks_per_step, run_experiment
from .loop import ObservationHistory, RunConfig, RunTrace, initial_design, run_bo, update_incumbent
from .report import emit_report

__version__ = "0.1.0"
