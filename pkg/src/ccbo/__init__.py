"""Constrained composite Bayesian optimization for target-value experiment design."""

from .acquisition import (
    AcquisitionConfig,
    BatchProposal,
    apply_constraint,
    normal_base_samples,
    optimize_acquisition,
    qei,
    qei_cf,
)
from .benchmark import BenchmarkConfig, BenchmarkResults, auc_trapezoid, run_benchmark
from .classifier import VariationalProbitClassifier
from .errors import CcboError, DomainError, FittingError, NumericError, StateError
from .gp import GPRegressor, PosteriorGaussian, sample_posterior
from .kernels import KernelParams, kernel_hamming, kernel_matern52, kernel_mixed
from .simulator import SimConfig, SimResult, feasible, particle_size, run_experiment
from .space import DesignPoint, DesignSpace, VariableSpec, default_space, standardize
from .stats import mann_whitney_u_one_tailed
from .strategy import (
    STRATEGIES,
    CampaignState,
    Observation,
    check_stopping,
    incumbent,
    regret,
    suggest,
)

__version__ = "0.1.0"

__all__ = [
    "AcquisitionConfig",
    "BatchProposal",
    "BenchmarkConfig",
    "BenchmarkResults",
    "CampaignState",
    "CcboError",
    "DesignPoint",
    "DesignSpace",
    "DomainError",
    "FittingError",
    "GPRegressor",
    "KernelParams",
    "NumericError",
    "Observation",
    "PosteriorGaussian",
    "SimConfig",
    "SimResult",
    "StateError",
    "STRATEGIES",
    "VariableSpec",
    "VariationalProbitClassifier",
    "apply_constraint",
    "auc_trapezoid",
    "check_stopping",
    "default_space",
    "feasible",
    "incumbent",
    "kernel_hamming",
    "kernel_matern52",
    "kernel_mixed",
    "mann_whitney_u_one_tailed",
    "normal_base_samples",
    "optimize_acquisition",
    "particle_size",
    "qei",
    "qei_cf",
    "regret",
    "run_benchmark",
    "run_experiment",
    "sample_posterior",
    "standardize",
    "suggest",
]
