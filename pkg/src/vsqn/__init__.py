"""Variable sample-size stochastic quasi-Newton optimization toolkit."""

from .core import (
    BatchSchedule,
    OracleError,
    ProblemMeta,
    RngStream,
    SampleHandle,
    ScalarSchedule,
    sample_average_gradient,
    schedule_eval,
)
from .hessian import (
    CurvaturePair,
    HessianBounds,
    LbfgsMemory,
    SecantError,
    apply_inverse_hessian,
    collect_pair,
    materialize_dense,
    materialize_inverse,
    theoretical_bounds,
    verify_secant,
)
from .solvers import ConfigError, IterateRecord, RunResult, SolverConfig, run

__all__ = [
    "BatchSchedule", "OracleError", "ProblemMeta", "RngStream", "SampleHandle",
    "ScalarSchedule", "sample_average_gradient", "schedule_eval",
    "CurvaturePair", "HessianBounds", "LbfgsMemory", "SecantError",
    "apply_inverse_hessian", "collect_pair", "materialize_dense",
    "materialize_inverse", "theoretical_bounds", "verify_secant",
    "ConfigError", "IterateRecord", "RunResult", "SolverConfig", "run",
]

__version__ = "0.1.0"
