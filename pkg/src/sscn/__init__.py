"""Stochastic subspace cubic Newton: optimizer, schedules, baselines, benchmark CLI."""

from .datasets import SparseDataset, dataset_stats, load_dataset, parse_libsvm, serialize_libsvm
from .model import (
    CubicModel,
    ExactCurvature,
    FiniteDiffCurvature,
    LazyAnchor,
    LazyCurvature,
    ZeroCurvature,
    build_model,
    model_gradient,
    model_value,
)
from .objectives import (
    ObjectiveOracle,
    Quadratic,
    RegularizedLogistic,
    SaddleQuartic,
    finite_diff_check,
)
from .sampling import (
    Adaptive,
    Constant,
    CoordinateSubset,
    Exponential,
    ScheduleState,
    adaptive_tau,
    concentration_probe,
    embed_vector,
    next_tau,
    restrict_vector,
    sample_uniform,
    update_estimates,
)
from .subproblem import (
    HardCaseError,
    SubproblemSolution,
    brute_force_oracle,
    closed_form_zero_curvature,
    kernel_backend,
    solve_alpha_dual,
    solve_global,
)
from .optimizer import (
    AdaptiveDoubling,
    FixedM,
    IterationRecord,
    OptimizerConfig,
    RunAbort,
    RunTrace,
    StopRule,
    Termination,
    TheoryRule,
    criticality_mu,
    m_k_theory,
    run,
    sscn_step,
    theory_rule_for,
)
from .baselines import ArmijoParams, CdConfig, cd_run, cd_step, full_cubic_newton_run
from .problems import make_quadratic, make_saddle, make_synthetic_dataset, make_synthetic_logistic

__version__ = "0.1.0"
