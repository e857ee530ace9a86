"""Hermite multiplier toolkit.

Evaluation of Hermite functions, quadrature-based L^p norms, Hermite
multiplier operators with kernel series, summability criteria for
nuclearity, and trace computations with independent cross-checks.
"""

from ._accel import BACKEND
from .errors import (
    CapabilityError,
    ConvergenceError,
    DomainError,
    HermultError,
    InconclusiveError,
    TraceCheckRefused,
    UnsupportedRegimeError,
)
from .hermite_core import (
    MAX_DEGREE_DEFAULT,
    HermiteValue,
    MultiIndex,
    count_level,
    count_up_to,
    enumerate_level,
    enumerate_up_to,
    eval_phi_1d,
    eval_phi_nd,
)
from .nuclearity import (
    CriterionReport,
    PartitionCell,
    RatioReport,
    RegimeCase,
    classify_regime,
    compare_sr_kappa,
    gl_condition,
    kappa_sum,
    kappa_weight,
    partition_cell_of,
    partition_cells,
    s_r_sum,
)
from .quadrature import (
    NormEstimate,
    QuadratureRule,
    fit_norm_exponent,
    fit_norm_exponent_p4,
    gauss_hermite_rule,
    norm_model,
    lp_norm_1d,
    lp_norm_phi,
    norm_estimate,
    norm_model_exponent,
    norm_regime,
    truncated_rule,
)
from .spectral_ops import (
    PHI_SUP_BOUND,
    CoefficientVector,
    Envelope,
    KernelValue,
    LowerEnvelope,
    Symbol,
    analyze,
    apply_multiplier,
    constant_symbol,
    custom_symbol,
    effective_weights,
    heat_symbol,
    kernel_series,
    level_tail_bound,
    mehler_kernel,
    power_symbol,
    project_level,
    synthesize,
    table_symbol,
)
from .trace_lab import (
    SpectralTraceReport,
    TraceReport,
    TraceValue,
    galerkin_matrix,
    semigroup_trace_closed_form,
    semigroup_trace_mehler_form,
    spectral_trace_check,
    trace_diagonal_quadrature,
    trace_report,
    trace_symbol_sum,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "CapabilityError",
    "ConvergenceError",
    "DomainError",
    "HermultError",
    "InconclusiveError",
    "TraceCheckRefused",
    "UnsupportedRegimeError",
    "MAX_DEGREE_DEFAULT",
    "HermiteValue",
    "MultiIndex",
    "count_level",
    "count_up_to",
    "enumerate_level",
    "enumerate_up_to",
    "eval_phi_1d",
    "eval_phi_nd",
    "CriterionReport",
    "PartitionCell",
    "RatioReport",
    "RegimeCase",
    "classify_regime",
    "compare_sr_kappa",
    "gl_condition",
    "kappa_sum",
    "kappa_weight",
    "partition_cell_of",
    "partition_cells",
    "s_r_sum",
    "NormEstimate",
    "QuadratureRule",
    "fit_norm_exponent",
    "fit_norm_exponent_p4",
    "gauss_hermite_rule",
    "norm_model",
    "lp_norm_1d",
    "lp_norm_phi",
    "norm_estimate",
    "norm_model_exponent",
    "norm_regime",
    "truncated_rule",
    "PHI_SUP_BOUND",
    "CoefficientVector",
    "Envelope",
    "KernelValue",
    "LowerEnvelope",
    "Symbol",
    "analyze",
    "apply_multiplier",
    "constant_symbol",
    "custom_symbol",
    "effective_weights",
    "heat_symbol",
    "kernel_series",
    "level_tail_bound",
    "mehler_kernel",
    "power_symbol",
    "project_level",
    "synthesize",
    "table_symbol",
    "SpectralTraceReport",
    "TraceReport",
    "TraceValue",
    "galerkin_matrix",
    "semigroup_trace_closed_form",
    "semigroup_trace_mehler_form",
    "spectral_trace_check",
    "trace_diagonal_quadrature",
    "trace_report",
    "trace_symbol_sum",
    "__version__",
]
