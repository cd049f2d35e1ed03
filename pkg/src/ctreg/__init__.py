"""Canonical thresholding regression: non-sparse high-dimensional linear
models fit by shrinking canonical (SVD-basis) coefficients, with exact
solution-path cross-validation, an RKHS extension, diagnostics, and a
Monte Carlo study harness."""

from .canonical import (
    CanonicalCoefficients,
    CanonicalDecomposition,
    Dataset,
    canonical_ls,
    canonicalize,
    to_beta,
    to_theta,
)
from .errors import CtregError, NotPositiveSemidefiniteError, ZeroDesignError
from .estimators import (
    FitResult,
    GctConfig,
    PcrConfig,
    RidgeConfig,
    default_tau,
    fit_gct,
    fit_min_norm_ls,
    fit_nct,
    fit_pcr,
    fit_ridge,
    gct_theta,
    predict,
)
from .kernel import (
    InSampleError,
    KernelModel,
    KernelSpec,
    fit_kernel_gct,
    gram,
    in_sample_fit,
    kernel_canonicalize,
    kernel_effective_dimension,
    kernel_in_sample_error,
    predict_kernel,
    predict_kernel_batch,
)
from .metrics import (
    MetricsReport,
    RiskBoundReport,
    effective_rank,
    joint_effective_dimension,
    mse_fixed,
    pe_random,
    relative_error,
    risk_bound,
    snr,
    threshold_scale,
    weighted_risk_bound,
)
from .simstudy import (
    ExperimentTable,
    IsotropicGaussian,
    PolyDecay,
    ScenarioSpec,
    SpikedHead,
    SpikedTailRandom,
    TableRow,
    emit_table,
    generate_scenario,
    parse_table,
    run_experiment,
    scenario_hash,
    spec_from_dict,
    spec_to_dict,
)
from .thresholding import (
    HARD_RULE,
    SOFT_RULE,
    RuleKind,
    RuleReport,
    ThresholdRule,
    apply_rule,
    check_rule,
    hard,
    soft,
)
from .tuning import (
    CvResult,
    PathSegment,
    breakpoints,
    cv_error_at,
    fold_assignment,
    grid_cv_oracle,
    joint_cv,
    kfold_cv,
    kfold_cv_pcr,
    kfold_cv_ridge,
)

__version__ = "0.1.0"

__all__ = [
    "CanonicalCoefficients",
    "CanonicalDecomposition",
    "CtregError",
    "CvResult",
    "Dataset",
    "ExperimentTable",
    "FitResult",
    "GctConfig",
    "HARD_RULE",
    "InSampleError",
    "IsotropicGaussian",
    "KernelModel",
    "KernelSpec",
    "MetricsReport",
    "NotPositiveSemidefiniteError",
    "PathSegment",
    "PcrConfig",
    "PolyDecay",
    "RidgeConfig",
    "RiskBoundReport",
    "RuleKind",
    "RuleReport",
    "SOFT_RULE",
    "ScenarioSpec",
    "SpikedHead",
    "SpikedTailRandom",
    "TableRow",
    "ThresholdRule",
    "ZeroDesignError",
    "apply_rule",
    "breakpoints",
    "canonical_ls",
    "canonicalize",
    "check_rule",
    "cv_error_at",
    "default_tau",
    "effective_rank",
    "emit_table",
    "fit_gct",
    "fit_kernel_gct",
    "fit_min_norm_ls",
    "fit_nct",
    "fit_pcr",
    "fit_ridge",
    "fold_assignment",
    "gct_theta",
    "generate_scenario",
    "gram",
    "grid_cv_oracle",
    "hard",
    "in_sample_fit",
    "joint_cv",
    "joint_effective_dimension",
    "kernel_canonicalize",
    "kernel_effective_dimension",
    "kernel_in_sample_error",
    "kfold_cv",
    "kfold_cv_pcr",
    "kfold_cv_ridge",
    "mse_fixed",
    "parse_table",
    "pe_random",
    "predict",
    "predict_kernel",
    "predict_kernel_batch",
    "relative_error",
    "risk_bound",
    "run_experiment",
    "scenario_hash",
    "snr",
    "soft",
    "spec_from_dict",
    "spec_to_dict",
    "threshold_scale",
    "to_beta",
    "to_theta",
    "weighted_risk_bound",
]
