"""Directed network inference from multivariate time series.

Methods: per-target neighborhood SVR with kernel-space feature ranking
(infer_nsvm), a lag-restricted Bayesian network learner (learn_rbn),
and an L1 neighborhood baseline (infer_nlasso); plus simulators with
known ground truth, confusion-rate metrics, and a benchmark harness.
"""

from .data import (
    LagStats,
    Network,
    Standardization,
    TimeSeries,
    build_lagged_pairs,
    load_adjacency_csv,
    load_edges_tsv,
    load_series_csv,
    save_adjacency_csv,
    save_edges_tsv,
    save_series_csv,
    standardize_columns,
    standardize_with_stats,
)
from .errors import (
    ComputationError,
    ConvergenceError,
    DegenerateDesignError,
    ExplosiveSeriesError,
    InvalidInputError,
    NetinferError,
    ParseError,
)
from .feature_select import (
    Ranking,
    SelectionResult,
    intercept_loocv_error,
    prefix_loocv_errors,
    rank_features,
    rank_model,
    select_kopt,
)
from .harness import (
    ALL_METHODS,
    ExperimentConfig,
    ExperimentReport,
    infer_with_method,
    run_experiment,
)
from .kernels import (
    FAMILIES,
    KernelSpec,
    cross_kernel,
    default_spec,
    eval_kernel,
    gram_matrix,
)
from .metrics import Aggregate, ConfusionCounts, Rates, aggregate, confusion, rates
from .nlasso import LassoFit, default_lambda_path, fit_lasso, infer_nlasso
from .nsvm import (
    InferenceResult,
    TargetInfo,
    TuningGrid,
    TuningResult,
    infer_nsvm,
    tune_hyperparameters,
)
from .rbn import LocalModel, RbnResult, bic_local, learn_rbn
from .reference import PUBLISHED, PUBLISHED_LABEL, published_rates
from .simulate import (
    MODES,
    SimConfig,
    SimOutput,
    derive_seed,
    load_sim,
    save_sim,
    simulate,
    simulate_linear,
    simulate_mixture,
    simulate_nonlinear,
)
from .svr import (
    SvrModel,
    SvrParams,
    dual_objective,
    fit_svr,
    predict,
    predict_batch,
    weight_norm_sq,
)

__version__ = "0.1.0"

__all__ = [
    "ALL_METHODS",
    "Aggregate",
    "ComputationError",
    "ConfusionCounts",
    "ConvergenceError",
    "DegenerateDesignError",
    "ExperimentConfig",
    "ExperimentReport",
    "ExplosiveSeriesError",
    "FAMILIES",
    "InferenceResult",
    "InvalidInputError",
    "KernelSpec",
    "LassoFit",
    "LocalModel",
    "MODES",
    "NetinferError",
    "Network",
    "PUBLISHED",
    "PUBLISHED_LABEL",
    "ParseError",
    "Ranking",
    "Rates",
    "RbnResult",
    "SelectionResult",
    "SimConfig",
    "SimOutput",
    "SvrModel",
    "SvrParams",
    "TargetInfo",
    "TimeSeries",
    "TuningGrid",
    "TuningResult",
    "aggregate",
    "bic_local",
    "build_lagged_pairs",
    "LagStats",
    "Standardization",
    "standardize_with_stats",
    "rank_model",
    "confusion",
    "cross_kernel",
    "default_lambda_path",
    "default_spec",
    "derive_seed",
    "dual_objective",
    "eval_kernel",
    "fit_lasso",
    "fit_svr",
    "gram_matrix",
    "infer_nlasso",
    "infer_nsvm",
    "infer_with_method",
    "intercept_loocv_error",
    "learn_rbn",
    "load_adjacency_csv",
    "load_edges_tsv",
    "load_series_csv",
    "load_sim",
    "predict",
    "predict_batch",
    "prefix_loocv_errors",
    "published_rates",
    "rank_features",
    "rates",
    "run_experiment",
    "save_adjacency_csv",
    "save_edges_tsv",
    "save_series_csv",
    "save_sim",
    "select_kopt",
    "simulate",
    "simulate_linear",
    "simulate_mixture",
    "simulate_nonlinear",
    "standardize_columns",
    "tune_hyperparameters",
    "weight_norm_sq",
]
